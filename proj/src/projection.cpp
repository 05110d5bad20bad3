#include "pfs/projection.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>
#include <random>

namespace pfs {

namespace {

double face_area(const TriangleMesh& mesh, const std::array<int, 3>& f) {
    const Vec3& a = mesh.vertices[static_cast<std::size_t>(f[0])];
    const Vec3& b = mesh.vertices[static_cast<std::size_t>(f[1])];
    const Vec3& c = mesh.vertices[static_cast<std::size_t>(f[2])];
    return 0.5 * (b - a).cross(c - a).norm();
}

}  // namespace

double mesh_surface_area(const TriangleMesh& mesh) {
    double s = 0;
    for (const auto& f : mesh.faces) s += face_area(mesh, f);
    return s;
}

PointCloud sample_mesh(const TriangleMesh& mesh, std::size_t m, std::uint64_t seed) {
    if (mesh.faces.empty() || mesh.vertices.empty()) throw EmptyMesh();
    if (m < 4) throw Error("need at least 4 sample points");

    std::vector<double> cum(mesh.faces.size());
    double total = 0;
    for (std::size_t i = 0; i < mesh.faces.size(); ++i) {
        total += face_area(mesh, mesh.faces[i]);
        cum[i] = total;
    }
    if (total <= 0) throw EmptyMesh("mesh has zero surface area");

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    PointCloud out;
    out.points.reserve(m);
    for (std::size_t i = 0; i < m; ++i) {
        const double pick = uni(rng) * total;
        const auto it = std::lower_bound(cum.begin(), cum.end(), pick);
        const auto& f = mesh.faces[static_cast<std::size_t>(it - cum.begin())];
        double u = uni(rng), v = uni(rng);
        if (u + v > 1.0) {
            u = 1.0 - u;
            v = 1.0 - v;
        }
        const Vec3& a = mesh.vertices[static_cast<std::size_t>(f[0])];
        const Vec3& b = mesh.vertices[static_cast<std::size_t>(f[1])];
        const Vec3& c = mesh.vertices[static_cast<std::size_t>(f[2])];
        out.points.push_back(a + u * (b - a) + v * (c - a));
    }
    return out;
}

PointCloud transformed(const PointCloud& q, const RigidTransform& pose) {
    PointCloud out;
    out.points.reserve(q.points.size());
    for (const auto& p : q.points) out.points.push_back(pose.r * p + pose.t);
    return out;
}

std::vector<Vec2> project_orthographic(const PointCloud& q) {
    std::vector<Vec2> out;
    out.reserve(q.points.size());
    for (const auto& p : q.points) out.emplace_back(p.x(), p.y());
    return out;
}

std::vector<Vec2> project_perspective_normalized(const PointCloud& q, double z_min) {
    std::vector<Vec2> out;
    out.reserve(q.points.size());
    for (const auto& p : q.points) {
        if (p.z() <= z_min) throw PointBehindCamera();
        out.emplace_back(p.x() / p.z(), p.y() / p.z());
    }
    return out;
}

std::vector<Vec2> project_perspective_pixels(const PointCloud& q, const CameraIntrinsics& k,
                                             double z_min) {
    auto out = project_perspective_normalized(q, z_min);
    for (auto& p : out) p = Vec2(k.fx * p.x() + k.cx, k.fy * p.y() + k.cy);
    return out;
}

Silhouette silhouette_of(const PointCloud& q, const RigidTransform& pose,
                         const ProjectionConfig& config) {
    const PointCloud posed = transformed(q, pose);
    const std::vector<Vec2> proj = config.mode == ProjectionMode::Orthographic
                                       ? project_orthographic(posed)
                                       : project_perspective_normalized(posed, config.z_min());
    const double alpha = config.alpha > 0 ? config.alpha : auto_alpha(proj);
    return extract_silhouette(proj, alpha);
}

std::uint64_t cloud_fingerprint(const PointCloud& q) {
    std::uint64_t h = 14695981039346656037ULL;
    auto mix = [&h](double value) {
        std::uint64_t bits;
        std::memcpy(&bits, &value, sizeof(bits));
        for (int b = 0; b < 8; ++b) {
            h ^= (bits >> (8 * b)) & 0xffULL;
            h *= 1099511628211ULL;
        }
    };
    for (const auto& p : q.points) {
        mix(p.x());
        mix(p.y());
        mix(p.z());
    }
    return h;
}

double largest_dimension(const PointCloud& q) {
    if (q.points.empty()) throw Error("empty cloud");
    Vec3 lo = q.points[0], hi = q.points[0];
    for (const auto& p : q.points) {
        lo = lo.cwiseMin(p);
        hi = hi.cwiseMax(p);
    }
    return (hi - lo).maxCoeff();
}

}  // namespace pfs
