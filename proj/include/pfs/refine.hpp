#ifndef PFS_REFINE_HPP
#define PFS_REFINE_HPP

#include "pfs/projection.hpp"

namespace pfs {

/// Knobs of the local SE(3) refinement. finite_difference_scale multiplies
/// the template's largest dimension for the translation coordinates and is
/// used directly (radians) for the rotation coordinates.
struct RefineParams {
    int max_iterations = 100;
    double step_tolerance = 1e-6;  // combined tangent-step norm threshold
    double cost_tolerance = 1e-9;  // relative surrogate decrease threshold
    double finite_difference_scale = 1e-4;
    double damping_init = 1.0;
    // optional speed knob: surrogate cost/gradient evaluations run on a
    // deterministic strided subsample of at most this many points (0 = use
    // the full cloud). Subsampling biases the surrogate optimum by roughly
    // the subsample's extraction noise; the final Hausdorff gate always uses
    // the full cloud, so the monotonicity guarantee is unaffected.
    std::size_t max_surrogate_points = 0;

    /// Throws Error unless every numeric field is positive.
    void validate() const;
};

/// Tangent coordinates: (w_x, w_y, w_z, t_x, t_y, t_z); the rotation block is
/// an axis-angle increment applied on the left (world frame).
using Tangent = Eigen::Matrix<double, 6, 1>;

/// Retraction: left-multiplies the rotation by exp([w]_x) and adds the
/// translation increment. Never updates the matrix additively, so the result
/// is orthonormal to machine precision.
RigidTransform apply_tangent(const RigidTransform& pose, const Tangent& delta);

/// Symmetric mean squared nearest-neighbour distance between the posed
/// template silhouette and g_star: the smooth surrogate of the Hausdorff
/// objective.
double surrogate_cost(const PointCloud& q, const Silhouette& g_star,
                      const RigidTransform& pose, const ProjectionConfig& config);

/// Central finite differences of surrogate_cost on the 6 tangent coordinates.
/// fd_rot / fd_trans are the half-step sizes in radians / length units. In
/// orthographic mode the t_z component is exactly zero and is not evaluated.
Tangent surrogate_gradient(const PointCloud& q, const Silhouette& g_star,
                           const RigidTransform& pose, double fd_rot, double fd_trans,
                           const ProjectionConfig& config, int threads = 1);

/// Damped first-order descent on the surrogate with manifold retraction,
/// accept-only-improving steps, and damping that halves on reject and doubles
/// on accept. Returns the final iterate when its true Hausdorff value does
/// not exceed init's (the discrete Hausdorff cannot rank poses below its
/// vertex-spacing floor, where the surrogate optimum is the accurate pose);
/// otherwise the lowest-Hausdorff pose seen, init included — so the result
/// is never worse than init. In orthographic mode t_z is frozen at its
/// initial value (unobservable).
RigidTransform refine_pose(const PointCloud& q, const Silhouette& g_star,
                           const RigidTransform& init, const RefineParams& params,
                           const ProjectionConfig& config, int threads = 1);

}  // namespace pfs

#endif
