#ifndef PFS_GEOMETRY2D_HPP
#define PFS_GEOMETRY2D_HPP

#include <Eigen/Core>
#include <span>
#include <utility>
#include <vector>

#include "pfs/errors.hpp"

namespace pfs {

using Vec2 = Eigen::Vector2d;

/// Closed polyline; the last vertex connects back to the first implicitly.
struct Silhouette {
    std::vector<Vec2> points;
};

struct Ellipse {
    Vec2 center{0, 0};
    double semi_major = 0;  // >= semi_minor > 0
    double semi_minor = 0;
    double angle = 0;  // radians, orientation of the major axis

    double aspect_ratio() const { return semi_major / semi_minor; }
};

/// Throws DegenerateSilhouette unless the polygon has >= 3 vertices and
/// encloses area > 1e-12 x its bounding-box area.
void check_silhouette(const Silhouette& sil);

/// Absolute shoelace area; orientation independent.
double polygon_area(const Silhouette& sil);

/// Area-weighted centroid of the enclosed region.
Vec2 polygon_centroid(const Silhouette& sil);

/// Plain vertex mean, kept as a cross-check against the area centroid.
Vec2 vertex_mean(const Silhouette& sil);

/// Symmetric Hausdorff distance over the discrete vertex sets. Grid
/// accelerated but exact: identical to the O(nm) brute force.
double hausdorff(const Silhouette& a, const Silhouette& b);

/// 5 x median nearest-neighbour spacing, the default alpha for extraction.
double auto_alpha(std::span<const Vec2> pts);

/// Outer boundary of a 2D point set via the alpha shape with characteristic
/// radius alpha; falls back to the convex hull when the alpha complex yields
/// no closed outer loop. The result is CCW-oriented.
Silhouette extract_silhouette(std::span<const Vec2> pts, double alpha);

/// Convex hull (CCW), exposed for the fallback path and tests.
Silhouette convex_hull(std::span<const Vec2> pts);

/// Direct algebraic least-squares ellipse fit (stable Fitzgibbon variant).
Ellipse fit_ellipse(const Silhouette& sil);

/// (max x - min x, max y - min y) over the vertex set.
std::pair<double, double> extents(const Silhouette& sil);

/// Uniform exact nearest-neighbour structure over a fixed point set.
class PointGrid {
public:
    explicit PointGrid(std::span<const Vec2> pts);

    /// Exact squared distance from q to the nearest stored point.
    double nearest_sq(const Vec2& q) const;

    std::size_t size() const { return pts_.size(); }

private:
    std::vector<Vec2> pts_;
    std::vector<int> cell_start_;  // CSR layout over grid cells
    std::vector<int> cell_items_;
    double x0_ = 0, y0_ = 0, cell_ = 1;
    int nx_ = 0, ny_ = 0;

    int cell_index(int cx, int cy) const { return cy * nx_ + cx; }
};

/// Mean of squared nearest-neighbour distances from each vertex of a to b,
/// symmetrized. Smooth surrogate for the Hausdorff objective.
double mean_sq_nn(const Silhouette& a, const Silhouette& b);

}  // namespace pfs

#endif
