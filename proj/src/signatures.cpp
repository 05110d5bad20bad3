#include "pfs/signatures.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pfs/parallel.hpp"

namespace pfs {

DiscGrid::DiscGrid(int resolution) : n(resolution) {
    if (n < 8) throw Error("disc grid resolution must be >= 8");
}

double SignatureField::max_value() const {
    double m = -std::numeric_limits<double>::infinity();
    for (int iy = 0; iy < grid.n; ++iy)
        for (int ix = 0; ix < grid.n; ++ix)
            if (grid.masked(ix, iy)) m = std::max(m, at(ix, iy));
    return m;
}

double SignatureField::min_value() const {
    double m = std::numeric_limits<double>::infinity();
    for (int iy = 0; iy < grid.n; ++iy)
        for (int ix = 0; ix < grid.n; ++ix)
            if (grid.masked(ix, iy)) m = std::min(m, at(ix, iy));
    return m;
}

std::pair<SignatureField, SignatureField> precompute_fields(const PointCloud& q,
                                                            const DiscGrid& grid,
                                                            const ProjectionConfig& config,
                                                            std::uint64_t seed, int threads) {
    if (q.points.empty()) throw EmptyMesh("empty template cloud");
    if (config.mode == ProjectionMode::Perspective && config.depth_prior <= 0)
        throw Error("perspective precomputation needs a positive depth prior");

    FieldMeta meta;
    meta.fingerprint = cloud_fingerprint(q);
    meta.point_count = q.points.size();
    meta.mode = config.mode;
    meta.depth_prior = config.depth_prior;
    meta.alpha = config.alpha;
    meta.seed = seed;

    SignatureField pal;
    pal.grid = grid;
    pal.kind = SignatureKind::Area;
    pal.meta = meta;
    pal.values.assign(static_cast<std::size_t>(grid.n) * static_cast<std::size_t>(grid.n),
                      SignatureField::sentinel);
    SignatureField pearl = pal;
    pearl.kind = SignatureKind::Aspect;

    // In perspective mode the template is pushed to the depth prior before
    // projecting, mirroring what the search does with its depth estimate.
    const Vec3 offset = config.mode == ProjectionMode::Perspective
                            ? Vec3(0, 0, config.depth_prior)
                            : Vec3::Zero();

    std::vector<std::pair<int, int>> nodes;
    for (int iy = 0; iy < grid.n; ++iy)
        for (int ix = 0; ix < grid.n; ++ix)
            if (grid.masked(ix, iy)) nodes.emplace_back(ix, iy);

    parallel_for(nodes.size(), threads, [&](std::size_t k) {
        const auto [ix, iy] = nodes[k];
        const Rotation r = postel_to_rotation(disc_lift(grid.node(ix, iy)));
        const Silhouette sil = silhouette_of(q, {r, offset}, config);
        pal.at(ix, iy) = polygon_area(sil);
        double aspect;
        try {
            aspect = fit_ellipse(sil).aspect_ratio();
        } catch (const EllipseFitFailure&) {
            const auto [lx, ly] = extents(sil);
            aspect = std::max(lx, ly) / std::max(std::min(lx, ly), 1e-300);
        }
        pearl.at(ix, iy) = std::max(aspect, 1.0);
    });

    return {std::move(pal), std::move(pearl)};
}

SignatureField precompute_field(const PointCloud& q, const DiscGrid& grid, SignatureKind kind,
                                const ProjectionConfig& config, std::uint64_t seed,
                                int threads) {
    auto [pal, pearl] = precompute_fields(q, grid, config, seed, threads);
    return kind == SignatureKind::Area ? std::move(pal) : std::move(pearl);
}

double interpolate(const SignatureField& field, const Vec2& d) {
    const DiscGrid& g = field.grid;
    const double h = g.spacing();
    const double fx = (d.x() + M_PI) / h;
    const double fy = (d.y() + M_PI) / h;
    int ix = static_cast<int>(std::floor(fx));
    int iy = static_cast<int>(std::floor(fy));
    // points exactly on the top/right border belong to the last cell
    ix = std::clamp(ix, 0, g.n - 2);
    iy = std::clamp(iy, 0, g.n - 2);
    if (fx < -1e-9 || fy < -1e-9 || fx > g.n - 1 + 1e-9 || fy > g.n - 1 + 1e-9)
        throw OutsideField("query outside the grid");
    if (!g.masked(ix, iy) || !g.masked(ix + 1, iy) || !g.masked(ix, iy + 1) ||
        !g.masked(ix + 1, iy + 1))
        throw OutsideField("cell corner outside the Postel disc");
    const double tx = std::clamp(fx - ix, 0.0, 1.0);
    const double ty = std::clamp(fy - iy, 0.0, 1.0);
    const double v00 = field.at(ix, iy), v10 = field.at(ix + 1, iy);
    const double v01 = field.at(ix, iy + 1), v11 = field.at(ix + 1, iy + 1);
    return (1 - tx) * (1 - ty) * v00 + tx * (1 - ty) * v10 + (1 - tx) * ty * v01 +
           tx * ty * v11;
}

IsoContourSet iso_contour(const SignatureField& field, double level) {
    const DiscGrid& g = field.grid;
    IsoContourSet out;
    auto edge = [&](int ax, int ay, int bx, int by) {
        if (!g.masked(ax, ay) || !g.masked(bx, by)) return;
        const double va = field.at(ax, ay) - level;
        const double vb = field.at(bx, by) - level;
        if (va * vb > 0) return;
        if (va == 0 && vb == 0) {
            out.points.push_back(0.5 * (g.node(ax, ay) + g.node(bx, by)));
            return;
        }
        const double t = va / (va - vb);
        out.points.push_back(g.node(ax, ay) +
                             t * (g.node(bx, by) - g.node(ax, ay)));
    };
    for (int iy = 0; iy < g.n; ++iy) {
        for (int ix = 0; ix < g.n; ++ix) {
            if (ix + 1 < g.n) edge(ix, iy, ix + 1, iy);
            if (iy + 1 < g.n) edge(ix, iy, ix, iy + 1);
        }
    }
    return out;
}

}  // namespace pfs
