#include "pfs/shapes.hpp"

#include <array>
#include <cmath>
#include <map>

namespace pfs {

TriangleMesh make_box(double lx, double ly, double lz) {
    TriangleMesh m;
    const double hx = lx / 2, hy = ly / 2, hz = lz / 2;
    for (int i = 0; i < 8; ++i) {
        m.vertices.emplace_back((i & 1) ? hx : -hx, (i & 2) ? hy : -hy, (i & 4) ? hz : -hz);
    }
    const int quads[6][4] = {
        {0, 2, 3, 1}, {4, 5, 7, 6},  // z faces
        {0, 1, 5, 4}, {2, 6, 7, 3},  // y faces
        {0, 4, 6, 2}, {1, 3, 7, 5},  // x faces
    };
    for (const auto& q : quads) {
        m.faces.push_back({q[0], q[1], q[2]});
        m.faces.push_back({q[0], q[2], q[3]});
    }
    return m;
}

TriangleMesh make_icosphere(double radius, int subdivisions) {
    const double t = (1.0 + std::sqrt(5.0)) / 2.0;
    TriangleMesh m;
    m.vertices = {
        {-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0}, {0, -1, t},  {0, 1, t},
        {0, -1, -t}, {0, 1, -t}, {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1},
    };
    m.faces = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11}, {1, 5, 9},
               {5, 11, 4}, {11, 10, 2}, {10, 7, 6},  {7, 1, 8},  {3, 9, 4},   {3, 4, 2},
               {3, 2, 6},  {3, 6, 8},  {3, 8, 9},   {4, 9, 5},  {2, 4, 11},  {6, 2, 10},
               {8, 6, 7},  {9, 8, 1}};
    for (auto& v : m.vertices) v.normalize();

    for (int s = 0; s < subdivisions; ++s) {
        std::map<std::pair<int, int>, int> midpoint;
        auto mid = [&](int a, int b) {
            auto key = std::minmax(a, b);
            auto it = midpoint.find(key);
            if (it != midpoint.end()) return it->second;
            Vec3 v = (m.vertices[static_cast<std::size_t>(a)] +
                      m.vertices[static_cast<std::size_t>(b)])
                         .normalized();
            m.vertices.push_back(v);
            const int idx = static_cast<int>(m.vertices.size()) - 1;
            midpoint.emplace(key, idx);
            return idx;
        };
        std::vector<std::array<int, 3>> next;
        next.reserve(m.faces.size() * 4);
        for (const auto& f : m.faces) {
            const int ab = mid(f[0], f[1]), bc = mid(f[1], f[2]), ca = mid(f[2], f[0]);
            next.push_back({f[0], ab, ca});
            next.push_back({f[1], bc, ab});
            next.push_back({f[2], ca, bc});
            next.push_back({ab, bc, ca});
        }
        m.faces = std::move(next);
    }
    for (auto& v : m.vertices) v *= radius;
    return m;
}

TriangleMesh make_l_prism() {
    // L outline, CCW, with arms of unequal width and length so that no
    // mirrored or rotated view of the outline resembles the outline itself —
    // the silhouette then identifies the pose without near-symmetric
    // imposters. (0, 0.8) is added so both rectangles of the L triangulate
    // from outline vertices.
    const std::array<Vec2, 6> outline = {Vec2(0, 0),     Vec2(2, 0),     Vec2(2, 0.8),
                                         Vec2(1.1, 0.8), Vec2(1.1, 1.7), Vec2(0, 1.7)};
    const Vec2 extra(0, 0.8);
    const double height = 1.2;
    const Vec2 taper_center(0.5, 0.45);
    const double taper = 0.55;

    auto top_of = [&](const Vec2& p) { return taper_center + taper * (p - taper_center); };

    TriangleMesh m;
    auto add = [&](const Vec2& p, double z) {
        m.vertices.emplace_back(p.x(), p.y(), z);
        return static_cast<int>(m.vertices.size()) - 1;
    };
    std::array<int, 7> bot{}, top{};
    for (int i = 0; i < 6; ++i) bot[static_cast<std::size_t>(i)] = add(outline[static_cast<std::size_t>(i)], 0.0);
    bot[6] = add(extra, 0.0);
    for (int i = 0; i < 6; ++i) top[static_cast<std::size_t>(i)] = add(top_of(outline[static_cast<std::size_t>(i)]), height);
    top[6] = add(top_of(extra), height);

    // caps: rect A = (0,0)(2,0)(2,1)(0,1); rect B = (0,1)(1,1)(1,2)(0,2)
    auto cap = [&](const std::array<int, 7>& v) {
        m.faces.push_back({v[0], v[1], v[2]});
        m.faces.push_back({v[0], v[2], v[6]});
        m.faces.push_back({v[6], v[3], v[4]});
        m.faces.push_back({v[6], v[4], v[5]});
    };
    cap(bot);
    cap(top);
    for (int i = 0; i < 6; ++i) {
        const int j = (i + 1) % 6;
        m.faces.push_back({bot[static_cast<std::size_t>(i)], bot[static_cast<std::size_t>(j)], top[static_cast<std::size_t>(j)]});
        m.faces.push_back({bot[static_cast<std::size_t>(i)], top[static_cast<std::size_t>(j)], top[static_cast<std::size_t>(i)]});
    }

    // centre at the bounding-box centre
    Vec3 lo = m.vertices[0], hi = m.vertices[0];
    for (const auto& v : m.vertices) {
        lo = lo.cwiseMin(v);
        hi = hi.cwiseMax(v);
    }
    const Vec3 c = 0.5 * (lo + hi);
    for (auto& v : m.vertices) v -= c;
    return m;
}

bool is_builtin_name(const std::string& name) { return name.rfind("builtin:", 0) == 0; }

TriangleMesh make_builtin(const std::string& name) {
    if (name == "builtin:cube") return make_cube();
    if (name == "builtin:box") return make_box(2.0, 1.0, 0.6);
    if (name == "builtin:sphere") return make_icosphere(1.0, 4);
    if (name == "builtin:lprism") return make_l_prism();
    throw UnsupportedFormat("unknown builtin shape: " + name);
}

}  // namespace pfs
