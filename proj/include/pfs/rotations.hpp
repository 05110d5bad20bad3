#ifndef PFS_ROTATIONS_HPP
#define PFS_ROTATIONS_HPP

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "pfs/errors.hpp"

namespace pfs {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Rotation = Mat3;

struct AxisAngle {
    double alpha = 0;           // [0, pi]
    Vec3 axis{1, 0, 0};         // unit
};

struct RigidTransform {
    Rotation r = Rotation::Identity();
    Vec3 t = Vec3::Zero();
};

/// mᵀm = I and det(m) = 1, both within 1e-9.
bool is_rotation(const Rotation& m, double tol = 1e-9);

/// Rodrigues' formula. alpha = 0 returns identity regardless of axis.
Rotation postel_to_rotation(const AxisAngle& aa);

/// Principal axis-angle with alpha in [0, pi]. At alpha = pi the axis sign is
/// fixed so its largest-magnitude component is positive.
AxisAngle rotation_to_postel(const Rotation& r);

/// Lift of a Postel-disc point: alpha = |d|, axis = (d1, 0, d2)/|d|.
/// d = 0 lifts to the identity (placeholder axis (1,0,0)).
AxisAngle disc_lift(const Eigen::Vector2d& d);

Rotation z_rotation(double theta);

/// Splits r = z_rotation(theta) * postel_to_rotation(disc_lift(d)) with d in
/// the Postel disc. Every rotation admits such a split, which is what makes
/// the disc (plus an in-plane sweep) a sufficient search domain.
std::pair<double, Eigen::Vector2d> z_decompose(const Rotation& r);

/// arccos((trace(aᵀb) - 1)/2), clamped to [0, pi].
double geodesic_distance(const Rotation& a, const Rotation& b);

/// Horn's closed-form quaternion alignment: the rotation minimizing
/// sum |q_i - R p_i|^2 after centroid removal.
Rotation horn_align(const std::vector<Vec3>& p, const std::vector<Vec3>& q);

/// Haar-uniform rotation from normalized 4D Gaussian quaternions.
Rotation random_rotation(std::uint64_t seed);

}  // namespace pfs

#endif
