#include "pfs/metrics.hpp"

#include <algorithm>
#include <cmath>

namespace pfs {

namespace {

// Intrinsic-XYZ Euler angles of r = Rx(a) * Ry(b) * Rz(c), each in its
// principal range (atan2-based; Eigen's eulerAngles pins the first angle to
// [0, pi], which inflates near-identity residuals to ~180 degrees).
Vec3 euler_xyz(const Rotation& r) {
    const double sb = std::clamp(r(0, 2), -1.0, 1.0);
    const double b = std::asin(sb);
    if (std::abs(sb) > 1.0 - 1e-12) {
        // gimbal lock: only a +/- c is determined; put it all in a
        return Vec3(std::atan2(r(1, 0), r(1, 1)), b, 0.0);
    }
    return Vec3(std::atan2(-r(1, 2), r(2, 2)), b, std::atan2(-r(0, 1), r(0, 0)));
}

}  // namespace

double orientation_error(const PointCloud& q, const RigidTransform& pose_gt,
                         const RigidTransform& pose_est) {
    const PointCloud a = transformed(q, pose_gt);
    const PointCloud b = transformed(q, pose_est);
    const Rotation residual = horn_align(a.points, b.points);
    // the Euler-angle mean is not inversion-invariant; averaging both
    // alignment directions makes the error symmetric in (gt, est)
    const double fwd = euler_xyz(residual).cwiseAbs().mean();
    const double rev = euler_xyz(residual.transpose()).cwiseAbs().mean();
    return 0.5 * (fwd + rev) * 180.0 / M_PI;
}

std::pair<double, double> translation_error(const Vec3& t_gt, const Vec3& t_est, double ld) {
    if (ld <= 0) throw Error("translation_error: ld must be positive");
    const double e = (t_gt - t_est).norm();
    return {e, 100.0 * e / ld};
}

std::pair<double, double> rmse(const PointCloud& q, const RigidTransform& pose_gt,
                               const RigidTransform& pose_est, double ld) {
    if (ld <= 0) throw Error("rmse: ld must be positive");
    if (q.points.empty()) throw Error("rmse: empty cloud");
    double acc = 0;
    for (const Vec3& p : q.points)
        acc += ((pose_gt.r * p + pose_gt.t) - (pose_est.r * p + pose_est.t)).squaredNorm();
    const double e = std::sqrt(acc / static_cast<double>(q.points.size()));
    return {e, 100.0 * e / ld};
}

PoseError pose_error(const PointCloud& q, const RigidTransform& pose_gt,
                     const RigidTransform& pose_est, double ld) {
    PoseError err;
    err.oe_deg = orientation_error(q, pose_gt, pose_est);
    std::tie(err.te, err.te_percent) = translation_error(pose_gt.t, pose_est.t, ld);
    std::tie(err.rmse, err.rmse_percent) = rmse(q, pose_gt, pose_est, ld);
    return err;
}

bool is_success(const PoseError& err) {
    return err.oe_deg <= 6.0 && err.te_percent <= 2.0;
}

}  // namespace pfs
