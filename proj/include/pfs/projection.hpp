#ifndef PFS_PROJECTION_HPP
#define PFS_PROJECTION_HPP

#include <array>
#include <cstdint>
#include <vector>

#include "pfs/geometry2d.hpp"
#include "pfs/rotations.hpp"

namespace pfs {

struct TriangleMesh {
    std::vector<Vec3> vertices;
    std::vector<std::array<int, 3>> faces;
};

struct PointCloud {
    std::vector<Vec3> points;
};

struct CameraIntrinsics {
    double fx = 1, fy = 1, cx = 0, cy = 0;
};

enum class ProjectionMode { Orthographic, Perspective };

/// How silhouettes are formed from the posed template. In perspective mode
/// the pipeline works in normalized image coordinates; the depth prior is the
/// distance at which signature fields are precomputed. alpha <= 0 selects the
/// automatic 5x-median-spacing radius at every extraction.
struct ProjectionConfig {
    ProjectionMode mode = ProjectionMode::Orthographic;
    CameraIntrinsics intrinsics{};
    double depth_prior = 0;
    double alpha = 0;

    double z_min() const { return depth_prior > 0 ? 1e-6 * depth_prior : 1e-6; }
};

/// Area-uniform surface sampling: faces drawn proportional to area,
/// barycentric-uniform within. Deterministic given the seed.
PointCloud sample_mesh(const TriangleMesh& mesh, std::size_t m, std::uint64_t seed);

PointCloud transformed(const PointCloud& q, const RigidTransform& pose);

std::vector<Vec2> project_orthographic(const PointCloud& q);

/// Normalized image coordinates (x/z, y/z). Throws PointBehindCamera if any
/// depth <= z_min.
std::vector<Vec2> project_perspective_normalized(const PointCloud& q, double z_min);

/// Pixel coordinates, for rendering only.
std::vector<Vec2> project_perspective_pixels(const PointCloud& q, const CameraIntrinsics& k,
                                             double z_min);

/// transform -> project -> extract_silhouette.
Silhouette silhouette_of(const PointCloud& q, const RigidTransform& pose,
                         const ProjectionConfig& config);

/// Maximum axis-aligned bounding-box edge at identity pose (LD).
double largest_dimension(const PointCloud& q);

double mesh_surface_area(const TriangleMesh& mesh);

/// FNV-1a 64-bit hash over the cloud's coordinate bytes. Ties precomputed
/// signature fields to the exact template they were built from.
std::uint64_t cloud_fingerprint(const PointCloud& q);

}  // namespace pfs

#endif
