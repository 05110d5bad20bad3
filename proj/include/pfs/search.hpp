#ifndef PFS_SEARCH_HPP
#define PFS_SEARCH_HPP

#include <cstdint>
#include <utility>
#include <vector>

#include "pfs/signatures.hpp"

namespace pfs {

/// Tolerances and budgets of the global search. Fractional tolerances are
/// resolved against the template: eps_xy against the maximum area-field
/// value, eps_z and eps_h against the template's largest dimension (LD).
struct SearchParams {
    double eps_xy = 0.02;   // area tolerance, fraction of max area-field value
    double eps_z = 0.03;    // extent tolerance, fraction of LD
    double eps_e = 0.05;    // aspect-ratio tolerance, absolute
    double eps_cap = 0.08;  // disc-distance tolerance, Postel-disc units
    double eps_h = 0.02;    // acceptance Hausdorff threshold, fraction of LD
    int n_z = 360;          // in-plane sweep sample count
    int lambda_c = 128;     // candidate cap
    // multiplicative (eps_cap, eps_z) factors per escalation level
    std::vector<std::pair<double, double>> pyramid = default_pyramid();
    std::uint64_t seed = 0;
    bool use_aspect = true;  // aspect-field acceleration (never affects
                             // correctness, only the amount of pruning)

    static std::vector<std::pair<double, double>> default_pyramid() {
        return {{1.0, 1.0}, {1.6, 1.6}, {2.56, 2.56}, {4.096, 4.096}};
    }

    /// Throws Error on non-positive tolerances, n_z < 4, lambda_c < 1, or an
    /// empty pyramid.
    void validate() const;
};

/// One pose hypothesis: an in-plane angle theta stacked on a disc-lifted
/// rotation, with the translation that aligns silhouette centroids. The
/// origin indices make candidate ordering a total order.
struct Candidate {
    Rotation rotation = Rotation::Identity();
    Vec3 translation = Vec3::Zero();  // z = 0 orthographic, depth in perspective
    double score = 0;                 // Hausdorff distance once evaluated
    Vec2 disc_point = Vec2::Zero();
    int disc_index = -1;   // index into the surviving disc-point list
    int theta_index = -1;  // index into the in-plane sweep
    double theta = 0;
};

struct SearchDiagnostics {
    std::size_t n_area = 0;          // area iso-contour points
    std::size_t n_aspect = 0;        // aspect iso-contour points
    std::size_t n_intersection = 0;  // disc points surviving intersection + area check
    std::size_t n_candidates = 0;    // |C| before the lambda_c cap
    double wall_seconds = 0;         // excluded from any serialized output
};

struct SearchResult {
    Candidate best;
    std::vector<Candidate> candidates;  // ascending score, best first
    int pyramid_level_used = 0;
    SearchDiagnostics diagnostics;
};

/// Translation aligning the centroid of the template's identity-pose
/// silhouette with the centroid of g_star. Orthographic: exact image-plane
/// shift. Perspective: image shift scaled by the depth prior (first-order;
/// refinement absorbs the residual).
Vec2 compute_translation(const PointCloud& q, const Silhouette& g_star,
                         const ProjectionConfig& config);

/// Area iso-contour points at level area_star, kept only if the directly
/// re-evaluated silhouette area at the lifted pose is within eps_xy
/// (absolute area units) of area_star. Throws NoCandidates when empty.
IsoContourSet area_candidates(const PointCloud& q, const SignatureField& pal,
                              double area_star, double eps_xy,
                              const ProjectionConfig& config);

/// Aspect-ratio iso-contour points at level ar_star, re-evaluation-filtered
/// within eps_e. Throws NoCandidates when empty.
IsoContourSet ear_candidates(const PointCloud& q, const SignatureField& pearl,
                             double ar_star, double eps_e,
                             const ProjectionConfig& config);

/// Subset of u_a within eps_cap of some point of u_e. An empty u_e disables
/// the acceleration and returns u_a unchanged.
IsoContourSet intersect_candidates(const IsoContourSet& u_a, const IsoContourSet& u_e,
                                   double eps_cap);

/// In-plane sweep at disc point d: n_z uniform angles, accepted when both
/// axis-aligned extents match g_star within eps_z (absolute length units).
/// Scores stay unset; translations align centroids per candidate, making the
/// hint t from compute_translation redundant on clean inputs.
std::vector<Candidate> z_sweep(const PointCloud& q, const Vec2& d, const Silhouette& g_star,
                               const Vec2& t, double eps_z, int n_z,
                               const ProjectionConfig& config);

/// Union of the per-disc lists; a uniform seeded subsample of size lambda_c
/// when the union is larger. Deterministic given the seed.
std::vector<Candidate> assemble_candidates(const std::vector<std::vector<Candidate>>& per_disc,
                                           int lambda_c, std::uint64_t seed);

/// Scores every candidate by the Hausdorff distance between its posed
/// template silhouette and g_star, then sorts ascending with ties broken by
/// (disc_index, theta_index).
std::vector<Candidate> evaluate_candidates(std::vector<Candidate> c, const PointCloud& q,
                                           const Silhouette& g_star,
                                           const ProjectionConfig& config, int threads = 1);

/// The full global search: candidate generation from the signature fields,
/// extent sweep, capped assembly, Hausdorff ranking, and the escalation
/// schedule on (eps_cap, eps_z) when the best score misses eps_h * LD.
/// Throws FingerprintMismatch if the fields were not built from q with this
/// config, NoCandidates if every level comes up empty.
SearchResult estimate_pose(const PointCloud& q, const SignatureField& pal,
                           const SignatureField& pearl, const Silhouette& g_star,
                           const SearchParams& params, const ProjectionConfig& config,
                           int threads = 1);

/// |C| at the first escalation level before the lambda_c cap; scales with the
/// template's rotational symmetry.
std::size_t count_candidates(const PointCloud& q, const SignatureField& pal,
                             const SignatureField& pearl, const Silhouette& g_star,
                             const SearchParams& params, const ProjectionConfig& config,
                             int threads = 1);

}  // namespace pfs

#endif
