#ifndef PFS_METRICS_HPP
#define PFS_METRICS_HPP

#include <utility>

#include "pfs/projection.hpp"

namespace pfs {

/// The three evaluation metrics of a pose estimate against ground truth.
struct PoseError {
    double oe_deg = 0;        // orientation error, degrees
    double te = 0;            // translation error, length units
    double te_percent = 0;    // ... as % of the template's largest dimension
    double rmse = 0;          // per-point RMSE, length units
    double rmse_percent = 0;  // ... as % of the largest dimension
};

/// Mean absolute intrinsic-XYZ Euler angle (degrees) of the optimal rotation
/// between the cloud posed by pose_gt and by pose_est (Horn alignment).
/// Throws DegenerateConfiguration when the cloud cannot anchor a rotation
/// (fewer than 3 points or collinear).
double orientation_error(const PointCloud& q, const RigidTransform& pose_gt,
                         const RigidTransform& pose_est);

/// (||t_gt - t_est||, the same as a percentage of ld). Throws Error on ld <= 0.
std::pair<double, double> translation_error(const Vec3& t_gt, const Vec3& t_est, double ld);

/// Root mean squared distance between corresponding points of the cloud under
/// the two poses, absolute and as a percentage of ld.
std::pair<double, double> rmse(const PointCloud& q, const RigidTransform& pose_gt,
                               const RigidTransform& pose_est, double ld);

/// All three metrics at once.
PoseError pose_error(const PointCloud& q, const RigidTransform& pose_gt,
                     const RigidTransform& pose_est, double ld);

/// Success criterion of the noise study: OE <= 6 degrees and TE <= 2% of LD.
bool is_success(const PoseError& err);

}  // namespace pfs

#endif
