#include "pfs/rotations.hpp"

#include <Eigen/Dense>
#include <Eigen/Geometry>
#include <algorithm>
#include <cmath>
#include <random>

namespace pfs {

bool is_rotation(const Rotation& m, double tol) {
    return (m.transpose() * m - Mat3::Identity()).cwiseAbs().maxCoeff() < tol &&
           std::abs(m.determinant() - 1.0) < tol;
}

Rotation postel_to_rotation(const AxisAngle& aa) {
    if (aa.alpha == 0) return Rotation::Identity();
    const Vec3 v = aa.axis.normalized();
    Mat3 k;
    k << 0, -v.z(), v.y(), v.z(), 0, -v.x(), -v.y(), v.x(), 0;
    return Mat3::Identity() + std::sin(aa.alpha) * k + (1.0 - std::cos(aa.alpha)) * k * k;
}

AxisAngle rotation_to_postel(const Rotation& r) {
    Eigen::AngleAxisd aa(r);
    AxisAngle out;
    out.alpha = aa.angle();
    out.axis = aa.axis();
    if (out.alpha < 0) {  // Eigen returns [0, pi], but guard anyway
        out.alpha = -out.alpha;
        out.axis = -out.axis;
    }
    if (out.alpha <= 1e-14) return AxisAngle{0.0, Vec3(1, 0, 0)};
    if (out.alpha > M_PI - 1e-9) {
        int imax = 0;
        out.axis.cwiseAbs().maxCoeff(&imax);
        if (out.axis(imax) < 0) out.axis = -out.axis;
    }
    return out;
}

AxisAngle disc_lift(const Eigen::Vector2d& d) {
    const double norm = d.norm();
    if (norm == 0) return AxisAngle{0.0, Vec3(1, 0, 0)};
    return AxisAngle{norm, Vec3(d.x() / norm, 0.0, d.y() / norm)};
}

Rotation z_rotation(double theta) {
    Rotation r = Rotation::Identity();
    const double c = std::cos(theta), s = std::sin(theta);
    r(0, 0) = c;
    r(0, 1) = -s;
    r(1, 0) = s;
    r(1, 1) = c;
    return r;
}

std::pair<double, Eigen::Vector2d> z_decompose(const Rotation& r) {
    Eigen::Quaterniond q(r);
    if (q.w() < 0) q.coeffs() = -q.coeffs();
    // Left-multiplying by z_rotation(-theta) maps the quaternion vector part
    // (x, y, z) to (cx + sy, cy - sx, z') with c = cos(theta/2), s =
    // sin(theta/2); the y component vanishes for theta/2 = atan2(y, x).
    const double half = std::atan2(q.y(), q.x());
    const double c = std::cos(half), s = std::sin(half);
    const Eigen::Quaterniond zq(c, 0, 0, -s);  // z_rotation(-theta)
    Eigen::Quaterniond rest = zq * q;
    if (rest.w() < 0) rest.coeffs() = -rest.coeffs();
    const double vnorm = std::sqrt(rest.x() * rest.x() + rest.y() * rest.y() +
                                   rest.z() * rest.z());
    const double alpha = 2.0 * std::atan2(vnorm, rest.w());
    Eigen::Vector2d d(0, 0);
    if (vnorm > 1e-300) d = alpha * Eigen::Vector2d(rest.x() / vnorm, rest.z() / vnorm);
    return {2.0 * half, d};
}

double geodesic_distance(const Rotation& a, const Rotation& b) {
    const double t = ((a.transpose() * b).trace() - 1.0) / 2.0;
    return std::acos(std::clamp(t, -1.0, 1.0));
}

Rotation horn_align(const std::vector<Vec3>& p, const std::vector<Vec3>& q) {
    if (p.size() != q.size() || p.size() < 3)
        throw DegenerateConfiguration("horn_align needs matched clouds of >= 3 points");
    Vec3 cp = Vec3::Zero(), cq = Vec3::Zero();
    for (const auto& v : p) cp += v;
    for (const auto& v : q) cq += v;
    cp /= static_cast<double>(p.size());
    cq /= static_cast<double>(q.size());

    Mat3 s = Mat3::Zero();
    for (std::size_t i = 0; i < p.size(); ++i) s += (p[i] - cp) * (q[i] - cq).transpose();

    Eigen::JacobiSVD<Mat3> svd(s, Eigen::ComputeFullU | Eigen::ComputeFullV);
    if (svd.singularValues()(1) <= 1e-12 * std::max(svd.singularValues()(0), 1e-300))
        throw DegenerateConfiguration("rank-deficient covariance");

    // Horn's N matrix (quaternion formulation)
    Eigen::Matrix4d n;
    const double sxx = s(0, 0), sxy = s(0, 1), sxz = s(0, 2);
    const double syx = s(1, 0), syy = s(1, 1), syz = s(1, 2);
    const double szx = s(2, 0), szy = s(2, 1), szz = s(2, 2);
    n << sxx + syy + szz, syz - szy, szx - sxz, sxy - syx,
         syz - szy, sxx - syy - szz, sxy + syx, szx + sxz,
         szx - sxz, sxy + syx, -sxx + syy - szz, syz + szy,
         sxy - syx, szx + sxz, syz + szy, -sxx - syy + szz;
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(n);
    Eigen::Vector4d v = es.eigenvectors().col(3);  // largest eigenvalue
    Eigen::Quaterniond quat(v(0), v(1), v(2), v(3));
    quat.normalize();
    return quat.toRotationMatrix();
}

Rotation random_rotation(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::Vector4d v;
    do {
        for (int i = 0; i < 4; ++i) v(i) = gauss(rng);
    } while (v.norm() < 1e-12);
    v.normalize();
    return Eigen::Quaterniond(v(0), v(1), v(2), v(3)).toRotationMatrix();
}

}  // namespace pfs
