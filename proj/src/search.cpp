#include "pfs/search.hpp"

#include <Eigen/Geometry>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <limits>
#include <map>
#include <optional>
#include <random>

#include "pfs/parallel.hpp"

namespace pfs {

namespace {

double aspect_of(const Silhouette& sil) {
    double aspect;
    try {
        aspect = fit_ellipse(sil).aspect_ratio();
    } catch (const EllipseFitFailure&) {
        const auto [lx, ly] = extents(sil);
        aspect = std::max(lx, ly) / std::max(std::min(lx, ly), 1e-300);
    }
    return std::max(aspect, 1.0);
}

Vec3 disc_offset(const ProjectionConfig& config) {
    return config.mode == ProjectionMode::Perspective ? Vec3(0, 0, config.depth_prior)
                                                      : Vec3::Zero();
}

RigidTransform disc_pose(const Vec2& d, const ProjectionConfig& config) {
    return {postel_to_rotation(disc_lift(d)), disc_offset(config)};
}

// World xy-translation realizing an image-plane shift. Orthographic: the
// shift itself. Perspective: first-order at the depth prior.
Vec3 world_translation(const Vec2& image_shift, const ProjectionConfig& config) {
    if (config.mode == ProjectionMode::Perspective)
        return Vec3(image_shift.x() * config.depth_prior, image_shift.y() * config.depth_prior,
                    config.depth_prior);
    return Vec3(image_shift.x(), image_shift.y(), 0);
}

Vec2 image_shift_of(const Candidate& c, const ProjectionConfig& config) {
    if (config.mode == ProjectionMode::Perspective)
        return Vec2(c.translation.x(), c.translation.y()) / config.depth_prior;
    return Vec2(c.translation.x(), c.translation.y());
}

// Image of the candidate's silhouette, from the cached canonical extraction
// at its disc pose: a z-rotation of the template rotates the image exactly
// (both modes fix the view axis), and the translation is an image shift.
Silhouette posed_silhouette(const Silhouette& canonical, const Candidate& c,
                            const ProjectionConfig& config) {
    const Eigen::Rotation2Dd rot(c.theta);
    const Vec2 shift = image_shift_of(c, config);
    Silhouette out;
    out.points.reserve(canonical.points.size());
    for (const auto& p : canonical.points) out.points.push_back(rot * p + shift);
    return out;
}

struct TargetStats {
    double area = 0;
    double aspect = 1;
    double lx = 0, ly = 0;
    Vec2 centroid = Vec2::Zero();
};

// Contour at the level snapped into the field's attained range: the contour
// only seeds candidates (direct re-evaluation decides acceptance), so a
// query slightly outside the range — a near-minimal aspect ratio, a target
// area at the field's edge — still yields the nearest attained level's seeds
// instead of nothing. Genuinely infeasible queries then die in re-evaluation.
IsoContourSet contour_clamped(const SignatureField& field, double level) {
    return iso_contour(field, std::clamp(level, field.min_value(), field.max_value()));
}

TargetStats target_stats(const Silhouette& g_star) {
    TargetStats s;
    s.area = polygon_area(g_star);
    s.aspect = aspect_of(g_star);
    std::tie(s.lx, s.ly) = extents(g_star);
    s.centroid = polygon_centroid(g_star);
    return s;
}

// Uniform circular moving average of the boundary vertices: per-vertex noise
// shrinks by sqrt(window) while sharp corners round slightly. window 1 is the
// identity. Escalation levels assume an increasingly noisy target, where the
// variance reduction matters far more than the corner bias — an unsmoothed
// area estimate can miss by several percent of the field maximum, which
// displaces the whole candidate contour, and unsmoothed extents overshoot
// the escalated extent gate.
Silhouette smoothed_target(const Silhouette& g, int window) {
    const int n = static_cast<int>(g.points.size());
    if (window <= 1 || n < 2 * window) return g;
    const int half = window / 2;
    Silhouette out;
    out.points.resize(g.points.size());
    Vec2 acc = Vec2::Zero();
    for (int j = -half; j <= half; ++j) acc += g.points[static_cast<std::size_t>((j + n) % n)];
    for (int i = 0; i < n; ++i) {
        out.points[static_cast<std::size_t>(i)] = acc / window;
        acc -= g.points[static_cast<std::size_t>((i - half + n) % n)];
        acc += g.points[static_cast<std::size_t>((i + half + 1) % n)];
    }
    return out;
}

// Extent-gated in-plane sweep over a canonical disc-pose silhouette.
std::vector<Candidate> sweep_canonical(const Silhouette& canonical, int disc_index,
                                       const Vec2& d, const TargetStats& target, double eps_z,
                                       int n_z, const ProjectionConfig& config) {
    const Vec2 cs = polygon_centroid(canonical);
    const Rotation lifted = postel_to_rotation(disc_lift(d));
    std::vector<Candidate> accepted;
    for (int k = 0; k < n_z; ++k) {
        const double theta = 2.0 * M_PI * k / n_z;
        const Eigen::Rotation2Dd rot(theta);
        double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
        double ymin = xmin, ymax = -xmin;
        for (const auto& p : canonical.points) {
            const Vec2 r = rot * p;
            xmin = std::min(xmin, r.x());
            xmax = std::max(xmax, r.x());
            ymin = std::min(ymin, r.y());
            ymax = std::max(ymax, r.y());
        }
        if (std::abs((xmax - xmin) - target.lx) > eps_z ||
            std::abs((ymax - ymin) - target.ly) > eps_z)
            continue;
        Candidate c;
        c.rotation = z_rotation(theta) * lifted;
        c.translation = world_translation(target.centroid - rot * cs, config);
        c.disc_point = d;
        c.disc_index = disc_index;
        c.theta_index = k;
        c.theta = theta;
        accepted.push_back(std::move(c));
    }
    return accepted;
}

void sort_ranked(std::vector<Candidate>& c) {
    std::sort(c.begin(), c.end(), [](const Candidate& a, const Candidate& b) {
        if (a.score != b.score) return a.score < b.score;
        if (a.disc_index != b.disc_index) return a.disc_index < b.disc_index;
        return a.theta_index < b.theta_index;
    });
}

void check_field(const SignatureField& field, SignatureKind kind, const PointCloud& q,
                 const ProjectionConfig& config) {
    if (field.kind != kind) throw Error("signature field has the wrong kind");
    if (field.meta.fingerprint != cloud_fingerprint(q))
        throw FingerprintMismatch("signature field was built from a different template");
    if (field.meta.mode != config.mode)
        throw FingerprintMismatch("signature field was built in a different projection mode");
    if (config.mode == ProjectionMode::Perspective &&
        field.meta.depth_prior != config.depth_prior)
        throw FingerprintMismatch("signature field was built at a different depth prior");
}

// Canonical silhouettes per disc point, shared across escalation levels.
class DiscCache {
public:
    DiscCache(const PointCloud& q, const ProjectionConfig& config) : q_(q), config_(config) {}

    // Extracts any missing disc points (in parallel), then returns entries.
    void ensure(const std::vector<Vec2>& ds, int threads) {
        std::vector<Vec2> missing;
        for (const auto& d : ds)
            if (!index_.count(key(d))) {
                index_.emplace(key(d), entries_.size() + missing.size());
                missing.push_back(d);
            }
        const std::size_t base = entries_.size();
        entries_.resize(base + missing.size());
        parallel_for(missing.size(), threads, [&](std::size_t i) {
            Entry e;
            e.d = missing[i];
            try {
                e.silhouette = silhouette_of(q_, disc_pose(missing[i], config_), config_);
                e.area = polygon_area(e.silhouette);
                e.aspect = aspect_of(e.silhouette);
            } catch (const Error&) {
                e.degenerate = true;
            }
            entries_[base + i] = std::move(e);
        });
    }

    struct Entry {
        Vec2 d = Vec2::Zero();
        Silhouette silhouette;
        double area = 0;
        double aspect = 1;
        bool degenerate = false;
    };

    const Entry& at(const Vec2& d) const { return entries_[index_.at(key(d))]; }

private:
    static std::pair<std::uint64_t, std::uint64_t> key(const Vec2& d) {
        std::uint64_t a, b;
        std::memcpy(&a, &d.x(), 8);
        std::memcpy(&b, &d.y(), 8);
        return {a, b};
    }

    const PointCloud& q_;
    ProjectionConfig config_;
    std::map<std::pair<std::uint64_t, std::uint64_t>, std::size_t> index_;
    std::vector<Entry> entries_;
};

struct LevelOutcome {
    std::vector<Candidate> candidates;  // capped, unscored
    std::size_t n_intersection = 0;
    std::size_t n_precap = 0;
};

LevelOutcome run_level(DiscCache& cache, const IsoContourSet& u_a, const IsoContourSet& u_e,
                       const TargetStats& target, double eps_xy_abs, double eps_cap,
                       double eps_z_abs, const SearchParams& params,
                       const ProjectionConfig& config, std::uint64_t level_seed, int threads) {
    const IsoContourSet u_i = intersect_candidates(u_a, u_e, eps_cap);
    cache.ensure(u_i.points, threads);

    std::vector<Vec2> survivors;
    for (const auto& d : u_i.points) {
        const auto& e = cache.at(d);
        if (!e.degenerate && std::abs(e.area - target.area) <= eps_xy_abs)
            survivors.push_back(d);
    }

    std::vector<std::vector<Candidate>> per_disc(survivors.size());
    parallel_for(survivors.size(), threads, [&](std::size_t j) {
        per_disc[j] = sweep_canonical(cache.at(survivors[j]).silhouette, static_cast<int>(j),
                                      survivors[j], target, eps_z_abs, params.n_z, config);
    });

    LevelOutcome out;
    out.n_intersection = survivors.size();
    for (const auto& list : per_disc) out.n_precap += list.size();
    out.candidates = assemble_candidates(per_disc, params.lambda_c, level_seed);
    return out;
}

}  // namespace

void SearchParams::validate() const {
    if (!(eps_xy > 0 && eps_z > 0 && eps_e > 0 && eps_cap > 0 && eps_h > 0))
        throw Error("search tolerances must be positive");
    if (n_z < 4) throw Error("n_z must be >= 4");
    if (lambda_c < 1) throw Error("lambda_c must be >= 1");
    if (pyramid.empty()) throw Error("escalation schedule must be non-empty");
}

Vec2 compute_translation(const PointCloud& q, const Silhouette& g_star,
                         const ProjectionConfig& config) {
    const Silhouette identity_sil = silhouette_of(q, {Rotation::Identity(), disc_offset(config)},
                                                  config);
    const Vec2 shift = polygon_centroid(g_star) - polygon_centroid(identity_sil);
    if (config.mode == ProjectionMode::Perspective) return shift * config.depth_prior;
    return shift;
}

IsoContourSet area_candidates(const PointCloud& q, const SignatureField& pal,
                              double area_star, double eps_xy,
                              const ProjectionConfig& config) {
    if (!(area_star > 0)) throw Error("target area must be positive");
    const IsoContourSet raw = contour_clamped(pal, area_star);
    IsoContourSet out;
    for (const auto& d : raw.points) {
        try {
            const Silhouette sil = silhouette_of(q, disc_pose(d, config), config);
            if (std::abs(polygon_area(sil) - area_star) <= eps_xy) out.points.push_back(d);
        } catch (const DegenerateSilhouette&) {
        } catch (const DegenerateProjection&) {
        }
    }
    if (out.points.empty()) throw NoCandidates("no disc points match the target area");
    return out;
}

IsoContourSet ear_candidates(const PointCloud& q, const SignatureField& pearl,
                             double ar_star, double eps_e, const ProjectionConfig& config) {
    if (!(ar_star >= 1)) throw Error("aspect ratio must be >= 1");
    const IsoContourSet raw = contour_clamped(pearl, ar_star);
    IsoContourSet out;
    for (const auto& d : raw.points) {
        try {
            const Silhouette sil = silhouette_of(q, disc_pose(d, config), config);
            if (std::abs(aspect_of(sil) - ar_star) <= eps_e) out.points.push_back(d);
        } catch (const DegenerateSilhouette&) {
        } catch (const DegenerateProjection&) {
        }
    }
    if (out.points.empty()) throw NoCandidates("no disc points match the target aspect ratio");
    return out;
}

IsoContourSet intersect_candidates(const IsoContourSet& u_a, const IsoContourSet& u_e,
                                   double eps_cap) {
    if (u_e.points.empty()) return u_a;
    IsoContourSet out;
    const PointGrid grid(u_e.points);
    const double cap_sq = eps_cap * eps_cap;
    for (const auto& d : u_a.points)
        if (grid.nearest_sq(d) <= cap_sq) out.points.push_back(d);
    return out;
}

std::vector<Candidate> z_sweep(const PointCloud& q, const Vec2& d, const Silhouette& g_star,
                               const Vec2& t, double eps_z, int n_z,
                               const ProjectionConfig& config) {
    (void)t;  // per-candidate centroid alignment supersedes the global hint
    const Silhouette canonical = silhouette_of(q, disc_pose(d, config), config);
    return sweep_canonical(canonical, 0, d, target_stats(g_star), eps_z, n_z, config);
}

std::vector<Candidate> assemble_candidates(const std::vector<std::vector<Candidate>>& per_disc,
                                           int lambda_c, std::uint64_t seed) {
    std::vector<Candidate> all;
    for (const auto& list : per_disc) all.insert(all.end(), list.begin(), list.end());
    if (all.size() <= static_cast<std::size_t>(lambda_c)) return all;
    // seeded Fisher-Yates prefix; avoids distribution classes so the sample
    // is identical on every platform
    std::mt19937_64 rng(seed);
    for (std::size_t i = 0; i < static_cast<std::size_t>(lambda_c); ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng() % (all.size() - i));
        std::swap(all[i], all[j]);
    }
    all.resize(static_cast<std::size_t>(lambda_c));
    return all;
}

std::vector<Candidate> evaluate_candidates(std::vector<Candidate> c, const PointCloud& q,
                                           const Silhouette& g_star,
                                           const ProjectionConfig& config, int threads) {
    check_silhouette(g_star);
    parallel_for(c.size(), threads, [&](std::size_t i) {
        c[i].score = hausdorff(silhouette_of(q, {c[i].rotation, c[i].translation}, config),
                               g_star);
    });
    sort_ranked(c);
    return c;
}

SearchResult estimate_pose(const PointCloud& q, const SignatureField& pal,
                           const SignatureField& pearl, const Silhouette& g_star,
                           const SearchParams& params, const ProjectionConfig& config,
                           int threads) {
    const auto t_start = std::chrono::steady_clock::now();
    params.validate();
    check_field(pal, SignatureKind::Area, q, config);
    check_field(pearl, SignatureKind::Aspect, q, config);
    check_silhouette(g_star);

    const double ld = largest_dimension(q);
    const double eps_xy_abs = params.eps_xy * pal.max_value();
    const double eps_h_abs = params.eps_h * ld;

    DiscCache cache(q, config);
    std::optional<SearchResult> best_result;

    for (std::size_t level = 0; level < params.pyramid.size(); ++level) {
        // level 0 reads the target exactly; escalated levels (entered when
        // the exact reading found nothing acceptable, typically on noisy
        // silhouettes) re-measure it from a progressively smoothed boundary
        const int window = level == 0 ? 1 : 4 * static_cast<int>(level) + 1;
        const Silhouette tgt = smoothed_target(g_star, window);
        const TargetStats target = target_stats(tgt);
        const IsoContourSet u_a = contour_clamped(pal, target.area);
        const IsoContourSet u_e =
            params.use_aspect ? contour_clamped(pearl, target.aspect) : IsoContourSet{};

        const auto [f_cap, f_z] = params.pyramid[level];
        LevelOutcome outcome =
            run_level(cache, u_a, u_e, target, eps_xy_abs, params.eps_cap * f_cap,
                      params.eps_z * ld * f_z, params, config, params.seed + level, threads);
        if (outcome.candidates.empty()) continue;

        std::vector<Candidate>& ranked = outcome.candidates;
        parallel_for(ranked.size(), threads, [&](std::size_t i) {
            ranked[i].score = hausdorff(
                posed_silhouette(cache.at(ranked[i].disc_point).silhouette, ranked[i], config),
                g_star);
        });
        sort_ranked(ranked);

        SearchResult result;
        result.best = ranked.front();
        result.candidates = std::move(ranked);
        result.pyramid_level_used = static_cast<int>(level);
        result.diagnostics.n_area = u_a.points.size();
        result.diagnostics.n_aspect = u_e.points.size();
        result.diagnostics.n_intersection = outcome.n_intersection;
        result.diagnostics.n_candidates = outcome.n_precap;

        if (!best_result || result.best.score < best_result->best.score)
            best_result = std::move(result);
        if (best_result->best.score <= eps_h_abs) break;
    }

    if (!best_result) throw NoCandidates("candidate set empty at every escalation level");
    best_result->diagnostics.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return *best_result;
}

std::size_t count_candidates(const PointCloud& q, const SignatureField& pal,
                             const SignatureField& pearl, const Silhouette& g_star,
                             const SearchParams& params, const ProjectionConfig& config,
                             int threads) {
    params.validate();
    check_field(pal, SignatureKind::Area, q, config);
    check_field(pearl, SignatureKind::Aspect, q, config);
    check_silhouette(g_star);

    const double ld = largest_dimension(q);
    const TargetStats target = target_stats(g_star);
    const IsoContourSet u_a = contour_clamped(pal, target.area);
    const IsoContourSet u_e =
        params.use_aspect ? contour_clamped(pearl, target.aspect) : IsoContourSet{};
    DiscCache cache(q, config);
    const auto [f_cap, f_z] = params.pyramid.front();
    return run_level(cache, u_a, u_e, target, params.eps_xy * pal.max_value(),
                     params.eps_cap * f_cap, params.eps_z * ld * f_z, params, config,
                     params.seed, threads)
        .n_precap;
}

}  // namespace pfs
