#ifndef PFS_SIGNATURES_HPP
#define PFS_SIGNATURES_HPP

#include <cstdint>
#include <utility>
#include <vector>

#include "pfs/projection.hpp"

namespace pfs {

/// Regular N x N grid over [-pi, pi]^2; nodes inside the Postel disc
/// (norm <= pi) are masked valid. One structure serves both field
/// precomputation and marching-squares contouring.
struct DiscGrid {
    explicit DiscGrid(int resolution = 96);

    int n = 0;

    double coord(int i) const { return -M_PI + spacing() * i; }
    double spacing() const { return 2.0 * M_PI / (n - 1); }
    Vec2 node(int ix, int iy) const { return Vec2(coord(ix), coord(iy)); }
    bool masked(int ix, int iy) const { return node(ix, iy).norm() <= M_PI + 1e-12; }
};

enum class SignatureKind { Area, Aspect };

struct FieldMeta {
    std::uint64_t fingerprint = 0;  // of the template cloud
    std::size_t point_count = 0;
    ProjectionMode mode = ProjectionMode::Orthographic;
    double depth_prior = 0;
    double alpha = 0;  // 0 = automatic radius at every extraction
    std::uint64_t seed = 0;
};

/// Scalar signature over the Postel disc: PAL (silhouette area) or PEARL
/// (fitted-ellipse aspect ratio). Row-major n x n storage; unmasked entries
/// hold the sentinel.
struct SignatureField {
    static constexpr double sentinel = -1.0;

    DiscGrid grid{8};
    SignatureKind kind = SignatureKind::Area;
    FieldMeta meta{};
    std::vector<double> values;  // grid.n * grid.n, row-major (iy * n + ix)

    double at(int ix, int iy) const {
        return values[static_cast<std::size_t>(iy) * static_cast<std::size_t>(grid.n) +
                      static_cast<std::size_t>(ix)];
    }
    double& at(int ix, int iy) {
        return values[static_cast<std::size_t>(iy) * static_cast<std::size_t>(grid.n) +
                      static_cast<std::size_t>(ix)];
    }
    double max_value() const;
    double min_value() const;
};

struct IsoContourSet {
    std::vector<Vec2> points;  // all inside the Postel disc
};

/// Evaluates both signatures in one pass: for each masked node d, the
/// template is posed at the disc-lifted rotation, its silhouette extracted
/// once, and the area plus ellipse aspect ratio recorded. A node whose
/// ellipse fit fails stores the bounding-box edge ratio instead — the aspect
/// field only accelerates the search, so a coarse surrogate is safe.
/// Deterministic for any thread count.
std::pair<SignatureField, SignatureField> precompute_fields(const PointCloud& q,
                                                            const DiscGrid& grid,
                                                            const ProjectionConfig& config,
                                                            std::uint64_t seed, int threads = 1);

/// Single-kind convenience wrapper around precompute_fields.
SignatureField precompute_field(const PointCloud& q, const DiscGrid& grid, SignatureKind kind,
                                const ProjectionConfig& config, std::uint64_t seed,
                                int threads = 1);

/// Bilinear interpolation over the enclosing cell. Throws OutsideField when
/// the cell has an unmasked corner or d leaves the grid.
double interpolate(const SignatureField& field, const Vec2& d);

/// Marching-squares crossing points of {field = level}, restricted to edges
/// between masked nodes, with linear interpolation along each crossing edge.
/// Empty when the level misses the field's range. Only the crossing points
/// are reported (candidate seeds, not connected curves), so the classic
/// saddle-cell ambiguity never arises.
IsoContourSet iso_contour(const SignatureField& field, double level);

}  // namespace pfs

#endif
