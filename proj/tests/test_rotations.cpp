#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "pfs/rotations.hpp"

using namespace pfs;

TEST_CASE("postel_to_rotation basics") {
    CHECK(postel_to_rotation({0.0, Vec3(0, 0, 1)}).isApprox(Mat3::Identity(), 1e-12));
    const Rotation r = postel_to_rotation({M_PI / 2, Vec3(1, 0, 0)});
    CHECK((r * Vec3(0, 1, 0) - Vec3(0, 0, 1)).norm() < 1e-12);
    CHECK(is_rotation(r));
}

TEST_CASE("rotation_to_postel basics") {
    CHECK(rotation_to_postel(Mat3::Identity()).alpha == doctest::Approx(0.0));
    const AxisAngle aa = rotation_to_postel(z_rotation(M_PI));
    CHECK(aa.alpha == doctest::Approx(M_PI));
    CHECK((aa.axis - Vec3(0, 0, 1)).norm() < 1e-9);
}

TEST_CASE("postel roundtrip within 1e-9 geodesic") {
    for (std::uint64_t seed = 0; seed < 1000; ++seed) {
        const Rotation r = random_rotation(seed);
        const AxisAngle aa = rotation_to_postel(r);
        if (aa.alpha < 1e-6 || aa.alpha > M_PI - 1e-6) continue;  // sign ambiguity at pi
        CHECK(geodesic_distance(postel_to_rotation(aa), r) < 1e-7);
    }
}

TEST_CASE("disc_lift") {
    AxisAngle a = disc_lift({M_PI / 2, 0});
    CHECK(a.alpha == doctest::Approx(M_PI / 2));
    CHECK((a.axis - Vec3(1, 0, 0)).norm() < 1e-12);

    AxisAngle b = disc_lift({0, M_PI / 2});
    CHECK(b.alpha == doctest::Approx(M_PI / 2));
    CHECK((b.axis - Vec3(0, 0, 1)).norm() < 1e-12);

    CHECK(postel_to_rotation(disc_lift({0, 0})).isApprox(Mat3::Identity(), 1e-12));
}

TEST_CASE("disc lift axes always have zero Y component") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> uni(-M_PI, M_PI);
    for (int trial = 0; trial < 200; ++trial) {
        Eigen::Vector2d d(uni(rng), uni(rng));
        if (d.norm() > M_PI) continue;
        const AxisAngle aa = disc_lift(d);
        CHECK(std::abs(aa.axis.y()) < 1e-15);
        CHECK(is_rotation(postel_to_rotation(aa)));
    }
}

TEST_CASE("z_rotation") {
    CHECK(z_rotation(0).isApprox(Mat3::Identity(), 1e-15));
    CHECK((z_rotation(M_PI / 2) * Vec3(1, 0, 0) - Vec3(0, 1, 0)).norm() < 1e-12);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> uni(-10, 10);
    for (int trial = 0; trial < 50; ++trial) {
        const double a = uni(rng), b = uni(rng);
        CHECK((z_rotation(a) * z_rotation(b) - z_rotation(a + b)).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("z_decompose reconstructs any rotation from a disc point") {
    for (std::uint64_t s = 0; s < 500; ++s) {
        const Rotation r = random_rotation(s + 5000);
        const auto [theta, d] = z_decompose(r);
        CHECK(d.norm() <= M_PI + 1e-12);
        const Rotation rebuilt = z_rotation(theta) * postel_to_rotation(disc_lift(d));
        CHECK(geodesic_distance(rebuilt, r) < 1e-7);
    }
    // a pure Z rotation decomposes with its axis inside the disc (x = 0)
    const auto [theta, d] = z_decompose(z_rotation(1.25));
    CHECK(std::abs(d.x()) < 1e-12);
    const Rotation rebuilt = z_rotation(theta) * postel_to_rotation(disc_lift(d));
    CHECK(geodesic_distance(rebuilt, z_rotation(1.25)) < 1e-9);
}

TEST_CASE("geodesic_distance") {
    const Rotation r = random_rotation(42);
    CHECK(geodesic_distance(r, r) == doctest::Approx(0.0));
    for (double th : {0.1, 0.7, 1.9, 3.0}) {
        CHECK(geodesic_distance(Mat3::Identity(), z_rotation(th)) == doctest::Approx(th));
    }
    for (std::uint64_t s = 0; s < 100; ++s) {
        const Rotation a = random_rotation(2 * s), b = random_rotation(2 * s + 1);
        CHECK(geodesic_distance(a, b) == doctest::Approx(geodesic_distance(b, a)));
    }
}

TEST_CASE("geodesic triangle inequality") {
    for (std::uint64_t s = 0; s < 100; ++s) {
        const Rotation a = random_rotation(3 * s), b = random_rotation(3 * s + 1),
                       c = random_rotation(3 * s + 2);
        CHECK(geodesic_distance(a, b) <=
              geodesic_distance(a, c) + geodesic_distance(c, b) + 1e-9);
    }
}

namespace {
std::vector<Vec3> random_cloud(std::mt19937_64& rng, int n) {
    std::normal_distribution<double> g(0, 1);
    std::vector<Vec3> out;
    for (int i = 0; i < n; ++i) out.emplace_back(g(rng), g(rng), g(rng));
    return out;
}
}  // namespace

TEST_CASE("horn_align recovery") {
    std::mt19937_64 rng(9);
    auto p = random_cloud(rng, 100);
    CHECK(geodesic_distance(horn_align(p, p), Mat3::Identity()) < 1e-7);

    for (std::uint64_t s = 0; s < 20; ++s) {
        const Rotation r0 = random_rotation(s + 100);
        std::vector<Vec3> q;
        for (const auto& v : p) q.push_back(r0 * v);
        CHECK(geodesic_distance(horn_align(p, q), r0) < 1e-7);

        // invariance to common translation
        std::vector<Vec3> qs, ps;
        for (const auto& v : q) qs.push_back(v + Vec3(5, -2, 1));
        for (const auto& v : p) ps.push_back(v + Vec3(-3, 7, 2));
        CHECK(geodesic_distance(horn_align(ps, qs), r0) < 1e-7);
    }

    // noisy recovery
    std::normal_distribution<double> g(0, 1e-3);
    const Rotation r0 = random_rotation(1234);
    std::vector<Vec3> q;
    for (const auto& v : p) q.push_back(r0 * v + Vec3(g(rng), g(rng), g(rng)));
    CHECK(geodesic_distance(horn_align(p, q), r0) < 1e-2);
}

TEST_CASE("horn_align degenerate input") {
    std::vector<Vec3> line, same;
    for (int i = 0; i < 10; ++i) {
        line.emplace_back(i, 0, 0);
        same.emplace_back(i, 0, 0);
    }
    CHECK_THROWS_AS(horn_align(line, same), DegenerateConfiguration);
    CHECK_THROWS_AS(horn_align({}, {}), DegenerateConfiguration);
}

TEST_CASE("random_rotation determinism and Haar statistics") {
    CHECK(random_rotation(77).isApprox(random_rotation(77), 0.0));
    double trace_sum = 0;
    for (std::uint64_t s = 0; s < 10000; ++s) {
        const Rotation r = random_rotation(s);
        CHECK(is_rotation(r));
        trace_sum += r.trace();
    }
    CHECK(std::abs(trace_sum / 10000.0) < 0.05);
}
