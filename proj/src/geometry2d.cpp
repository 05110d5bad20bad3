#include "pfs/geometry2d.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>

namespace pfs {

namespace {

double signed_area2(const std::vector<Vec2>& p) {
    // Twice the signed shoelace area.
    double s = 0;
    const std::size_t n = p.size();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        s += p[j].x() * p[i].y() - p[i].x() * p[j].y();
    }
    return s;
}

double bbox_area(const std::vector<Vec2>& p) {
    double xmin = p[0].x(), xmax = p[0].x(), ymin = p[0].y(), ymax = p[0].y();
    for (const auto& v : p) {
        xmin = std::min(xmin, v.x());
        xmax = std::max(xmax, v.x());
        ymin = std::min(ymin, v.y());
        ymax = std::max(ymax, v.y());
    }
    return (xmax - xmin) * (ymax - ymin);
}

double cross2(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

}  // namespace

void check_silhouette(const Silhouette& sil) {
    if (sil.points.size() < 3) throw DegenerateSilhouette("silhouette needs >= 3 points");
    const double a = std::abs(signed_area2(sil.points)) * 0.5;
    const double bb = bbox_area(sil.points);
    if (bb <= 0 || a <= 1e-12 * bb) throw DegenerateSilhouette("silhouette encloses no area");
}

double polygon_area(const Silhouette& sil) {
    check_silhouette(sil);
    return std::abs(signed_area2(sil.points)) * 0.5;
}

Vec2 polygon_centroid(const Silhouette& sil) {
    check_silhouette(sil);
    const auto& p = sil.points;
    const std::size_t n = p.size();
    double a2 = 0, cx = 0, cy = 0;
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const double w = cross2(p[j], p[i]);
        a2 += w;
        cx += (p[j].x() + p[i].x()) * w;
        cy += (p[j].y() + p[i].y()) * w;
    }
    return Vec2(cx, cy) / (3.0 * a2);
}

Vec2 vertex_mean(const Silhouette& sil) {
    if (sil.points.empty()) throw DegenerateSilhouette("empty silhouette");
    Vec2 m(0, 0);
    for (const auto& v : sil.points) m += v;
    return m / static_cast<double>(sil.points.size());
}

std::pair<double, double> extents(const Silhouette& sil) {
    check_silhouette(sil);
    double xmin = sil.points[0].x(), xmax = xmin;
    double ymin = sil.points[0].y(), ymax = ymin;
    for (const auto& v : sil.points) {
        xmin = std::min(xmin, v.x());
        xmax = std::max(xmax, v.x());
        ymin = std::min(ymin, v.y());
        ymax = std::max(ymax, v.y());
    }
    return {xmax - xmin, ymax - ymin};
}

// ---------------------------------------------------------------------------
// PointGrid

PointGrid::PointGrid(std::span<const Vec2> pts) : pts_(pts.begin(), pts.end()) {
    const std::size_t n = pts_.size();
    double xmin = pts_[0].x(), xmax = xmin, ymin = pts_[0].y(), ymax = ymin;
    for (const auto& p : pts_) {
        xmin = std::min(xmin, p.x());
        xmax = std::max(xmax, p.x());
        ymin = std::min(ymin, p.y());
        ymax = std::max(ymax, p.y());
    }
    const double w = xmax - xmin, h = ymax - ymin;
    const double diag = std::sqrt(w * w + h * h);
    cell_ = std::max(diag / std::sqrt(static_cast<double>(n)), 1e-12);
    x0_ = xmin;
    y0_ = ymin;
    nx_ = std::max(1, static_cast<int>(w / cell_) + 1);
    ny_ = std::max(1, static_cast<int>(h / cell_) + 1);

    // counting sort into CSR cells
    std::vector<int> counts(static_cast<std::size_t>(nx_) * ny_ + 1, 0);
    std::vector<int> cell_of(n);
    for (std::size_t i = 0; i < n; ++i) {
        int cx = std::clamp(static_cast<int>((pts_[i].x() - x0_) / cell_), 0, nx_ - 1);
        int cy = std::clamp(static_cast<int>((pts_[i].y() - y0_) / cell_), 0, ny_ - 1);
        cell_of[i] = cell_index(cx, cy);
        ++counts[cell_of[i] + 1];
    }
    std::partial_sum(counts.begin(), counts.end(), counts.begin());
    cell_start_ = counts;
    cell_items_.resize(n);
    std::vector<int> cursor(cell_start_.begin(), cell_start_.end() - 1);
    for (std::size_t i = 0; i < n; ++i) cell_items_[cursor[cell_of[i]]++] = static_cast<int>(i);
}

double PointGrid::nearest_sq(const Vec2& q) const {
    const int cx = std::clamp(static_cast<int>((q.x() - x0_) / cell_), 0, nx_ - 1);
    const int cy = std::clamp(static_cast<int>((q.y() - y0_) / cell_), 0, ny_ - 1);
    double best = std::numeric_limits<double>::infinity();
    const int rmax = std::max(nx_, ny_);
    for (int r = 0; r <= rmax; ++r) {
        // points in unscanned rings >= r are at distance >= (r - 1) * cell
        const double safe = (static_cast<double>(r) - 1.0) * cell_;
        if (r > 1 && best <= safe * safe) break;
        const int xlo = std::max(0, cx - r), xhi = std::min(nx_ - 1, cx + r);
        const int ylo = std::max(0, cy - r), yhi = std::min(ny_ - 1, cy + r);
        for (int gy = ylo; gy <= yhi; ++gy) {
            const bool edge_row = (gy == cy - r || gy == cy + r);
            for (int gx = xlo; gx <= xhi; ++gx) {
                if (r > 0 && !edge_row && gx != cx - r && gx != cx + r) continue;
                const int c = cell_index(gx, gy);
                for (int k = cell_start_[c]; k < cell_start_[c + 1]; ++k) {
                    best = std::min(best, (pts_[cell_items_[k]] - q).squaredNorm());
                }
            }
        }
    }
    return best;
}

double hausdorff(const Silhouette& a, const Silhouette& b) {
    check_silhouette(a);
    check_silhouette(b);
    PointGrid ga(a.points), gb(b.points);
    double m = 0;
    for (const auto& p : a.points) m = std::max(m, gb.nearest_sq(p));
    for (const auto& p : b.points) m = std::max(m, ga.nearest_sq(p));
    return std::sqrt(m);
}

double mean_sq_nn(const Silhouette& a, const Silhouette& b) {
    PointGrid ga(a.points), gb(b.points);
    double sa = 0, sb = 0;
    for (const auto& p : a.points) sa += gb.nearest_sq(p);
    for (const auto& p : b.points) sb += ga.nearest_sq(p);
    return 0.5 * (sa / static_cast<double>(a.points.size()) +
                  sb / static_cast<double>(b.points.size()));
}

// ---------------------------------------------------------------------------
// Boundary extraction

namespace {

// Flat uniform grid of point indices, cell size chosen by the caller.
struct IndexGrid {
    double x0 = 0, y0 = 0, cell = 1;
    int nx = 0, ny = 0;
    std::vector<int> start, items;

    void build(std::span<const Vec2> pts, double cell_size) {
        cell = cell_size;
        double xmin = pts[0].x(), xmax = xmin, ymin = pts[0].y(), ymax = ymin;
        for (const auto& p : pts) {
            xmin = std::min(xmin, p.x());
            xmax = std::max(xmax, p.x());
            ymin = std::min(ymin, p.y());
            ymax = std::max(ymax, p.y());
        }
        x0 = xmin;
        y0 = ymin;
        nx = std::max(1, static_cast<int>((xmax - xmin) / cell) + 1);
        ny = std::max(1, static_cast<int>((ymax - ymin) / cell) + 1);
        std::vector<int> counts(static_cast<std::size_t>(nx) * ny + 1, 0);
        std::vector<int> cof(pts.size());
        for (std::size_t i = 0; i < pts.size(); ++i) {
            cof[i] = index_of(pts[i]);
            ++counts[cof[i] + 1];
        }
        std::partial_sum(counts.begin(), counts.end(), counts.begin());
        start = counts;
        items.resize(pts.size());
        std::vector<int> cur(start.begin(), start.end() - 1);
        for (std::size_t i = 0; i < pts.size(); ++i) items[cur[cof[i]]++] = static_cast<int>(i);
    }

    int cx_of(double x) const { return std::clamp(static_cast<int>((x - x0) / cell), 0, nx - 1); }
    int cy_of(double y) const { return std::clamp(static_cast<int>((y - y0) / cell), 0, ny - 1); }
    int index_of(const Vec2& p) const { return cy_of(p.y()) * nx + cx_of(p.x()); }
    bool cell_empty(int cx, int cy) const {
        if (cx < 0 || cy < 0 || cx >= nx || cy >= ny) return true;
        const int c = cy * nx + cx;
        return start[c] == start[c + 1];
    }
};

// True iff the open disc of radius `radius` around c contains no input point
// other than pa/pb.
bool disc_empty(const IndexGrid& grid, std::span<const Vec2> pts, const Vec2& c, double radius,
                int pa, int pb) {
    const double r2 = radius * radius * (1.0 - 1e-12);
    const int reach = static_cast<int>(radius / grid.cell) + 1;
    const int cx = grid.cx_of(c.x()), cy = grid.cy_of(c.y());
    // Scan rings outwards from the centre cell: a witness point inside the
    // disc usually sits close to its centre, so most non-empty calls exit
    // after a handful of checks.
    for (int r = 0; r <= reach; ++r) {
        const int xlo = std::max(0, cx - r), xhi = std::min(grid.nx - 1, cx + r);
        const int ylo = std::max(0, cy - r), yhi = std::min(grid.ny - 1, cy + r);
        for (int gy = ylo; gy <= yhi; ++gy) {
            const bool edge_row = (gy == cy - r || gy == cy + r);
            for (int gx = xlo; gx <= xhi; ++gx) {
                if (r > 0 && !edge_row && gx != cx - r && gx != cx + r) continue;
                const int cc = gy * grid.nx + gx;
                for (int k = grid.start[cc]; k < grid.start[cc + 1]; ++k) {
                    const int i = grid.items[k];
                    if (i == pa || i == pb) continue;
                    if ((pts[i] - c).squaredNorm() < r2) return false;
                }
            }
        }
    }
    return true;
}

void check_not_collinear(std::span<const Vec2> pts) {
    Vec2 mean(0, 0);
    for (const auto& p : pts) mean += p;
    mean /= static_cast<double>(pts.size());
    Eigen::Matrix2d cov = Eigen::Matrix2d::Zero();
    for (const auto& p : pts) {
        Vec2 d = p - mean;
        cov += d * d.transpose();
    }
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(cov);
    if (es.eigenvalues()(0) <= 1e-16 * std::max(es.eigenvalues()(1), 1e-300))
        throw DegenerateProjection("all points (near-)collinear");
}

}  // namespace

Silhouette convex_hull(std::span<const Vec2> pts) {
    if (pts.size() < 3) throw InsufficientPoints("convex hull needs >= 3 points");
    check_not_collinear(pts);
    std::vector<Vec2> p(pts.begin(), pts.end());
    std::sort(p.begin(), p.end(), [](const Vec2& a, const Vec2& b) {
        return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
    });
    p.erase(std::unique(p.begin(), p.end(),
                        [](const Vec2& a, const Vec2& b) { return a == b; }),
            p.end());
    const std::size_t n = p.size();
    std::vector<Vec2> h(2 * n);
    std::size_t k = 0;
    for (std::size_t i = 0; i < n; ++i) {  // lower hull
        while (k >= 2 && cross2(h[k - 1] - h[k - 2], p[i] - h[k - 2]) <= 0) --k;
        h[k++] = p[i];
    }
    for (std::size_t i = n - 1, t = k + 1; i-- > 0;) {  // upper hull
        while (k >= t && cross2(h[k - 1] - h[k - 2], p[i] - h[k - 2]) <= 0) --k;
        h[k++] = p[i];
    }
    h.resize(k - 1);
    Silhouette out{std::move(h)};
    check_silhouette(out);
    return out;
}

double auto_alpha(std::span<const Vec2> pts) {
    if (pts.size() < 2) throw InsufficientPoints("need >= 2 points for spacing estimate");
    const std::size_t n = pts.size();
    double xmin = pts[0].x(), xmax = xmin, ymin = pts[0].y(), ymax = ymin;
    for (const auto& p : pts) {
        xmin = std::min(xmin, p.x());
        xmax = std::max(xmax, p.x());
        ymin = std::min(ymin, p.y());
        ymax = std::max(ymax, p.y());
    }
    const double area = std::max((xmax - xmin) * (ymax - ymin), 1e-300);
    IndexGrid grid;
    grid.build(pts, std::max(std::sqrt(area / static_cast<double>(n)) * 2.0, 1e-12));
    // The median is estimated from an evenly strided subset of at least 4096
    // query points (against the full set), which is deterministic and keeps
    // the estimate within a fraction of a percent of the full median.
    const std::size_t stride = std::max<std::size_t>(1, n / 4096);
    std::vector<double> nn;
    nn.reserve(n / stride + 1);
    const int rmax = std::max(grid.nx, grid.ny);
    for (std::size_t i = 0; i < n; i += stride) {
        const int cx = grid.cx_of(pts[i].x()), cy = grid.cy_of(pts[i].y());
        double best = std::numeric_limits<double>::infinity();
        for (int r = 0; r <= rmax; ++r) {
            const double safe = (static_cast<double>(r) - 1.0) * grid.cell;
            if (r > 1 && best <= safe * safe) break;
            const int xlo = std::max(0, cx - r), xhi = std::min(grid.nx - 1, cx + r);
            const int ylo = std::max(0, cy - r), yhi = std::min(grid.ny - 1, cy + r);
            for (int gy = ylo; gy <= yhi; ++gy) {
                const bool edge_row = (gy == cy - r || gy == cy + r);
                for (int gx = xlo; gx <= xhi; ++gx) {
                    if (r > 0 && !edge_row && gx != cx - r && gx != cx + r) continue;
                    const int c = gy * grid.nx + gx;
                    for (int k = grid.start[c]; k < grid.start[c + 1]; ++k) {
                        const int j = grid.items[k];
                        if (static_cast<std::size_t>(j) == i) continue;
                        best = std::min(best, (pts[j] - pts[i]).squaredNorm());
                    }
                }
            }
        }
        nn.push_back(best);
    }
    auto mid = nn.begin() + static_cast<std::ptrdiff_t>(nn.size() / 2);
    std::nth_element(nn.begin(), mid, nn.end());
    const double med = std::sqrt(*mid);
    if (!std::isfinite(med) || med <= 0) throw DegenerateProjection("duplicate point set");
    return 5.0 * med;
}

Silhouette extract_silhouette(std::span<const Vec2> pts, double alpha) {
    if (pts.size() < 3) throw InsufficientPoints("silhouette extraction needs >= 3 points");
    if (!(alpha > 0)) throw Error("alpha must be positive");
    check_not_collinear(pts);
    const std::size_t n = pts.size();

    IndexGrid grid;
    grid.build(pts, alpha);

    // Candidate boundary points. A boundary point p has an empty witness disc
    // of radius alpha touching it, i.e. some location c with |c - p| = alpha
    // whose distance to the cloud is >= alpha. A chamfer transform on an
    // alpha/6 grid decides this conservatively: CD is the chamfer distance to
    // the occupied cells, and any cell containing a location of clearance
    // >= alpha must satisfy CD >= alpha/h - 1.42 (chamfer >= Euclidean minus
    // two half-cell-diagonal offsets for query and sample). A boundary
    // point's witness cell lies within Euclidean alpha + 1.42h = 7.42h of its
    // own cell centre, so a depth-8 breadth-first dilation of those "far"
    // cells (chessboard distance bounds Euclidean from below) marks every
    // cell that can hold a boundary point; points elsewhere are provably
    // interior and pruned. For small inputs the pruning is pointless,
    // consider everything.
    std::vector<char> cand(n, 0);
    const double h = alpha / 6.0;
    double bx0 = pts[0].x(), bx1 = bx0, by0 = pts[0].y(), by1 = by0;
    for (const auto& p : pts) {
        bx0 = std::min(bx0, p.x());
        bx1 = std::max(bx1, p.x());
        by0 = std::min(by0, p.y());
        by1 = std::max(by1, p.y());
    }
    const int cnx = static_cast<int>((bx1 - bx0) / h) + 1;
    const int cny = static_cast<int>((by1 - by0) / h) + 1;
    const float far_cells = 6.0f - 1.42f - 1e-3f;  // alpha minus slack, in cells
    std::vector<float> cd;
    if (n <= 4096 || cnx < 16 || cny < 16 || static_cast<long>(cnx) * cny > 4'000'000) {
        std::fill(cand.begin(), cand.end(), 1);
    } else {
        const std::size_t ncells = static_cast<std::size_t>(cnx) * cny;
        const float inf = std::numeric_limits<float>::infinity();
        const float diag = std::sqrt(2.0f);
        cd.assign(ncells, inf);
        for (const auto& p : pts) {
            const int cx = std::clamp(static_cast<int>((p.x() - bx0) / h), 0, cnx - 1);
            const int cy = std::clamp(static_cast<int>((p.y() - by0) / h), 0, cny - 1);
            cd[static_cast<std::size_t>(cy) * cnx + cx] = 0.0f;
        }
        for (int y = 0; y < cny; ++y) {  // forward chamfer pass
            float* row = cd.data() + static_cast<std::size_t>(y) * cnx;
            const float* up = row - cnx;
            if (y > 0) {
                row[0] = std::min({row[0], up[0] + 1.0f, up[1] + diag});
                for (int x = 1; x + 1 < cnx; ++x)
                    row[x] = std::min({row[x], row[x - 1] + 1.0f, up[x] + 1.0f,
                                       up[x - 1] + diag, up[x + 1] + diag});
                row[cnx - 1] = std::min({row[cnx - 1], row[cnx - 2] + 1.0f, up[cnx - 1] + 1.0f,
                                         up[cnx - 2] + diag});
            } else {
                for (int x = 1; x < cnx; ++x) row[x] = std::min(row[x], row[x - 1] + 1.0f);
            }
        }
        for (int y = cny - 1; y >= 0; --y) {  // backward chamfer pass
            float* row = cd.data() + static_cast<std::size_t>(y) * cnx;
            const float* dn = row + cnx;
            if (y + 1 < cny) {
                row[cnx - 1] = std::min({row[cnx - 1], dn[cnx - 1] + 1.0f, dn[cnx - 2] + diag});
                for (int x = cnx - 2; x > 0; --x)
                    row[x] = std::min({row[x], row[x + 1] + 1.0f, dn[x] + 1.0f,
                                       dn[x + 1] + diag, dn[x - 1] + diag});
                row[0] = std::min({row[0], row[1] + 1.0f, dn[0] + 1.0f, dn[1] + diag});
            } else {
                for (int x = cnx - 2; x >= 0; --x) row[x] = std::min(row[x], row[x + 1] + 1.0f);
            }
        }
        // Far cells in the uncertain chamfer band get an exact check: a cell
        // truly holding a clearance-alpha location has an empty disc of
        // radius alpha - 0.71h around its centre. Cells with cd >= 6.5 pass
        // that check automatically (cd/1.082 - 0.71 >= 5.3 cells), so only a
        // thin band pays for exact scans; false far cells from sparse
        // interior regions die here instead of spawning candidates.
        std::vector<char> keep(ncells, 0);
        std::vector<int> frontier, next;
        const double verify_radius = alpha - 0.71 * h;
        for (int y = 0; y < cny; ++y) {
            for (int x = 0; x < cnx; ++x) {
                const std::size_t c = static_cast<std::size_t>(y) * cnx + x;
                const bool border = x == 0 || y == 0 || x == cnx - 1 || y == cny - 1;
                if (cd[c] < far_cells && !border) continue;
                if (cd[c] < 6.5f && !border) {
                    const Vec2 centre(bx0 + (x + 0.5) * h, by0 + (y + 0.5) * h);
                    if (!disc_empty(grid, pts, centre, verify_radius, -1, -1)) continue;
                }
                keep[c] = 1;
            }
        }
        // Interface cells seed the dilation. A kept cell with cd >= 9 cannot
        // touch a non-kept one (its neighbours have cd >= 7.58 and are kept
        // automatically), so the scan stays within the thin clearance band.
        for (int y = 0; y < cny; ++y) {
            for (int x = 0; x < cnx; ++x) {
                const std::size_t c = static_cast<std::size_t>(y) * cnx + x;
                if (!keep[c] || cd[c] >= 9.0f) continue;
                bool interface = false;
                for (int dy = -1; dy <= 1 && !interface; ++dy)
                    for (int dx = -1; dx <= 1; ++dx) {
                        if (x + dx < 0 || y + dy < 0 || x + dx >= cnx || y + dy >= cny)
                            continue;
                        if (!keep[static_cast<std::size_t>(y + dy) * cnx + (x + dx)]) {
                            interface = true;
                            break;
                        }
                    }
                if (interface) frontier.push_back(static_cast<int>(c));
            }
        }
        // dilate by 8 chessboard steps; chessboard distance bounds Euclidean
        // from below, so every cell within 7.42 cells of a far cell is kept
        for (int depth = 0; depth < 8; ++depth) {
            next.clear();
            for (int c : frontier) {
                const int x = c % cnx, y = c / cnx;
                for (int dy = -1; dy <= 1; ++dy) {
                    if (y + dy < 0 || y + dy >= cny) continue;
                    for (int dx = -1; dx <= 1; ++dx) {
                        if (x + dx < 0 || x + dx >= cnx) continue;
                        const std::size_t nb =
                            static_cast<std::size_t>(y + dy) * cnx + (x + dx);
                        if (!keep[nb]) {
                            keep[nb] = 1;
                            next.push_back(static_cast<int>(nb));
                        }
                    }
                }
            }
            frontier.swap(next);
        }
        for (std::size_t i = 0; i < n; ++i) {
            const int cx = std::clamp(static_cast<int>((pts[i].x() - bx0) / h), 0, cnx - 1);
            const int cy = std::clamp(static_cast<int>((pts[i].y() - by0) / h), 0, cny - 1);
            cand[i] = keep[static_cast<std::size_t>(cy) * cnx + cx];
        }
    }

    // Alpha-complex boundary edges: pairs closer than 2*alpha with at least
    // one empty circumscribing disc of radius alpha. Directed so the empty
    // side is on the right; the outer loop then runs CCW.
    const double two_alpha_sq = 4.0 * alpha * alpha;
    // Chamfer prescreen for witness-disc centres: a cell value below the far
    // threshold proves a point strictly inside the disc, so the expensive
    // exact emptiness scan can be skipped. Centres off the grid (or when
    // pruning is disabled) stay undecided.
    auto maybe_empty = [&](const Vec2& c) {
        if (cd.empty()) return true;
        const int x = static_cast<int>(std::floor((c.x() - bx0) / h));
        const int y = static_cast<int>(std::floor((c.y() - by0) / h));
        if (x < 0 || y < 0 || x >= cnx || y >= cny) return true;
        return cd[static_cast<std::size_t>(y) * cnx + x] >= far_cells;
    };
    std::vector<std::pair<int, int>> edges;
    for (std::size_t i = 0; i < n; ++i) {
        if (!cand[i]) continue;
        const int cx = grid.cx_of(pts[i].x()), cy = grid.cy_of(pts[i].y());
        for (int gy = std::max(0, cy - 2); gy <= std::min(grid.ny - 1, cy + 2); ++gy) {
            for (int gx = std::max(0, cx - 2); gx <= std::min(grid.nx - 1, cx + 2); ++gx) {
                const int c = gy * grid.nx + gx;
                for (int k = grid.start[c]; k < grid.start[c + 1]; ++k) {
                    const int j = grid.items[k];
                    if (j <= static_cast<int>(i) || !cand[j]) continue;
                    const Vec2 d = pts[j] - pts[static_cast<std::size_t>(i)];
                    const double d2 = d.squaredNorm();
                    if (d2 >= two_alpha_sq || d2 < 1e-24) continue;
                    const double dist = std::sqrt(d2);
                    const double h = std::sqrt(std::max(alpha * alpha - 0.25 * d2, 0.0));
                    const Vec2 mid = 0.5 * (pts[static_cast<std::size_t>(i)] + pts[j]);
                    const Vec2 nrm(-d.y() / dist, d.x() / dist);  // left of i->j
                    const Vec2 cl = mid + h * nrm;                // centre on left of i->j
                    const Vec2 cr = mid - h * nrm;
                    const int ii = static_cast<int>(i);
                    if (maybe_empty(cl) && disc_empty(grid, pts, cl, alpha, ii, j))
                        edges.emplace_back(j, ii);
                    if (maybe_empty(cr) && disc_empty(grid, pts, cr, alpha, ii, j))
                        edges.emplace_back(ii, j);
                }
            }
        }
    }
    if (edges.size() < 3) return convex_hull(pts);
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

    // out-adjacency
    std::vector<std::vector<int>> out_of(n);
    for (std::size_t e = 0; e < edges.size(); ++e)
        out_of[static_cast<std::size_t>(edges[e].first)].push_back(static_cast<int>(e));

    // Planar face traversal: each directed edge has one successor, the most
    // clockwise continuation relative to the reversed incoming direction
    // (keeps the enclosed region on the left). The reverse edge scores 2*pi,
    // so dead ends trace back and form degenerate 2-cycles that lose the
    // area vote below.
    std::vector<int> succ(edges.size(), -1);
    for (std::size_t e = 0; e < edges.size(); ++e) {
        const int u = edges[e].first, v = edges[e].second;
        const Vec2 din = pts[static_cast<std::size_t>(v)] - pts[static_cast<std::size_t>(u)];
        double best_angle = std::numeric_limits<double>::infinity();
        for (int cand_e : out_of[static_cast<std::size_t>(v)]) {
            const auto& [a, b] = edges[static_cast<std::size_t>(cand_e)];
            const Vec2 dout = pts[static_cast<std::size_t>(b)] - pts[static_cast<std::size_t>(a)];
            // clockwise angle from -din to dout, in (0, 2*pi]
            double ang = std::atan2(cross2(dout, -din), dout.dot(-din));
            if (ang <= 1e-12) ang += 2 * M_PI;
            if (ang < best_angle) {
                best_angle = ang;
                succ[e] = cand_e;
            }
        }
    }

    // Decompose the successor graph into its cycles; edges on a tail leading
    // into a cycle are dropped.
    std::vector<int> mark(edges.size(), -1);
    std::vector<int> pos(edges.size(), -1);
    std::vector<std::vector<Vec2>> loops;
    for (std::size_t e0 = 0; e0 < edges.size(); ++e0) {
        if (mark[e0] >= 0) continue;
        std::vector<int> path;
        int e = static_cast<int>(e0);
        while (e >= 0 && mark[static_cast<std::size_t>(e)] < 0) {
            mark[static_cast<std::size_t>(e)] = static_cast<int>(e0);
            pos[static_cast<std::size_t>(e)] = static_cast<int>(path.size());
            path.push_back(e);
            e = succ[static_cast<std::size_t>(e)];
        }
        if (e >= 0 && mark[static_cast<std::size_t>(e)] == static_cast<int>(e0)) {
            std::vector<Vec2> loop;
            for (std::size_t k = static_cast<std::size_t>(pos[static_cast<std::size_t>(e)]);
                 k < path.size(); ++k) {
                loop.push_back(pts[static_cast<std::size_t>(
                    edges[static_cast<std::size_t>(path[k])].first)]);
            }
            if (loop.size() >= 3) loops.push_back(std::move(loop));
        }
    }
    if (loops.empty()) return convex_hull(pts);

    std::size_t best = 0;
    double best_area = -1;
    for (std::size_t i = 0; i < loops.size(); ++i) {
        const double a = std::abs(signed_area2(loops[i]));
        if (a > best_area) {
            best_area = a;
            best = i;
        }
    }
    std::vector<Vec2> outer = std::move(loops[best]);
    if (signed_area2(outer) < 0) std::reverse(outer.begin(), outer.end());
    Silhouette out{std::move(outer)};
    try {
        check_silhouette(out);
    } catch (const DegenerateSilhouette&) {
        return convex_hull(pts);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Ellipse fitting (Halir & Flusser's numerically stable direct fit)

Ellipse fit_ellipse(const Silhouette& sil) {
    const auto& p = sil.points;
    if (p.size() < 5) throw EllipseFitFailure("ellipse fit needs >= 5 points");

    Vec2 mean(0, 0);
    for (const auto& v : p) mean += v;
    mean /= static_cast<double>(p.size());
    double scale = 0;
    for (const auto& v : p) scale += (v - mean).norm();
    scale /= static_cast<double>(p.size());
    if (scale <= 0) throw EllipseFitFailure("coincident points");

    const std::size_t n = p.size();
    Eigen::MatrixXd d1(n, 3), d2(n, 3);
    for (std::size_t i = 0; i < n; ++i) {
        const double x = (p[i].x() - mean.x()) / scale;
        const double y = (p[i].y() - mean.y()) / scale;
        d1(static_cast<Eigen::Index>(i), 0) = x * x;
        d1(static_cast<Eigen::Index>(i), 1) = x * y;
        d1(static_cast<Eigen::Index>(i), 2) = y * y;
        d2(static_cast<Eigen::Index>(i), 0) = x;
        d2(static_cast<Eigen::Index>(i), 1) = y;
        d2(static_cast<Eigen::Index>(i), 2) = 1.0;
    }
    const Eigen::Matrix3d s1 = d1.transpose() * d1;
    const Eigen::Matrix3d s2 = d1.transpose() * d2;
    const Eigen::Matrix3d s3 = d2.transpose() * d2;
    Eigen::FullPivLU<Eigen::Matrix3d> lu(s3);
    if (!lu.isInvertible()) throw EllipseFitFailure("degenerate conic (collinear input)");
    const Eigen::Matrix3d t = -lu.solve(s2.transpose());
    const Eigen::Matrix3d m = s1 + s2 * t;
    Eigen::Matrix3d mred;
    mred.row(0) = m.row(2) / 2.0;
    mred.row(1) = -m.row(1);
    mred.row(2) = m.row(0) / 2.0;

    Eigen::EigenSolver<Eigen::Matrix3d> es(mred);
    Eigen::Vector3d a1 = Eigen::Vector3d::Zero();
    bool found = false;
    for (int i = 0; i < 3; ++i) {
        if (std::abs(es.eigenvalues()(i).imag()) > 1e-9) continue;
        const Eigen::Vector3d v = es.eigenvectors().col(i).real();
        if (4.0 * v(0) * v(2) - v(1) * v(1) > 0) {
            a1 = v;
            found = true;
            break;
        }
    }
    if (!found) throw EllipseFitFailure("no elliptical solution");
    const Eigen::Vector3d a2 = t * a1;
    const double A = a1(0), B = a1(1), C = a1(2), D = a2(0), E = a2(1), F = a2(2);

    const double den = 4.0 * A * C - B * B;
    if (den <= 0) throw EllipseFitFailure("conic is not an ellipse");
    const double cx = (B * E - 2.0 * C * D) / den;
    const double cy = (B * D - 2.0 * A * E) / den;
    const double f0 = A * cx * cx + B * cx * cy + C * cy * cy + D * cx + E * cy + F;

    Eigen::Matrix2d q;
    q << A, B / 2.0, B / 2.0, C;
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> qe(q);
    const double l0 = qe.eigenvalues()(0), l1 = qe.eigenvalues()(1);
    if (!(-f0 / l0 > 0) || !(-f0 / l1 > 0)) throw EllipseFitFailure("conic is not an ellipse");
    const double ax0 = std::sqrt(-f0 / l0);
    const double ax1 = std::sqrt(-f0 / l1);
    const int major_col = ax0 >= ax1 ? 0 : 1;

    Ellipse e;
    e.center = mean + scale * Vec2(cx, cy);
    e.semi_major = scale * std::max(ax0, ax1);
    e.semi_minor = scale * std::min(ax0, ax1);
    const Eigen::Vector2d major_dir = qe.eigenvectors().col(major_col);
    e.angle = std::atan2(major_dir.y(), major_dir.x());
    if (e.angle >= M_PI / 2) e.angle -= M_PI;
    if (e.angle < -M_PI / 2) e.angle += M_PI;
    return e;
}

}  // namespace pfs
