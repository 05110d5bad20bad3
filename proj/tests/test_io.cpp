#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "pfs/io.hpp"
#include "pfs/shapes.hpp"

using namespace pfs;
namespace fs = std::filesystem;

namespace {

fs::path tmp_path(const std::string& name) {
    return fs::temp_directory_path() / ("pfs_io_test_" + name);
}

void write_file(const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    out << text;
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

const char* cube_obj =
    "# unit cube\n"
    "v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\n"
    "v 0 0 1\nv 1 0 1\nv 1 1 1\nv 0 1 1\n"
    "f 1 3 2\nf 1 4 3\nf 5 6 7\nf 5 7 8\n"
    "f 1 2 6\nf 1 6 5\nf 2 3 7\nf 2 7 6\n"
    "f 3 4 8\nf 3 8 7\nf 4 1 5\nf 4 5 8\n";

}  // namespace

TEST_CASE("load_mesh: cube OBJ fixture") {
    const fs::path p = tmp_path("cube.obj");
    write_file(p, cube_obj);
    const TriangleMesh mesh = load_mesh(p.string());
    CHECK(mesh.vertices.size() == 8);
    CHECK(mesh.faces.size() == 12);
    CHECK(mesh.vertices[6].isApprox(Vec3(1, 1, 1)));
    CHECK(mesh.faces[0] == std::array<int, 3>{0, 2, 1});
}

TEST_CASE("load_mesh: quad faces fan-triangulate") {
    const fs::path p = tmp_path("quad.obj");
    write_file(p, "v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nf 1 2 3 4\n");
    const TriangleMesh mesh = load_mesh(p.string());
    REQUIRE(mesh.faces.size() == 2);
    CHECK(mesh.faces[0] == std::array<int, 3>{0, 1, 2});
    CHECK(mesh.faces[1] == std::array<int, 3>{0, 2, 3});
    // slash-separated index tuples and negative indices both resolve
    write_file(p, "v 0 0 0\nv 1 0 0\nv 1 1 0\nf 1/1 2/2/2 -1//3\n");
    const TriangleMesh slashes = load_mesh(p.string());
    REQUIRE(slashes.faces.size() == 1);
    CHECK(slashes.faces[0] == std::array<int, 3>{0, 1, 2});
}

TEST_CASE("load_mesh: malformed OBJ reports the line") {
    const fs::path p = tmp_path("bad.obj");
    write_file(p, "v 0 0 0\nv 1 0\nf 1 2 3\n");
    CHECK_THROWS_WITH_AS(load_mesh(p.string()), doctest::Contains(":2:"), ParseError);
    write_file(p, "v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 9\n");
    CHECK_THROWS_WITH_AS(load_mesh(p.string()), doctest::Contains(":4:"), ParseError);
    write_file(p, "v 0 0 0\nv 1 0 0\nf 1 2\n");
    CHECK_THROWS_AS(load_mesh(p.string()), ParseError);
}

TEST_CASE("load_mesh: ascii PLY with quad faces") {
    const fs::path p = tmp_path("tet.ply");
    write_file(p,
               "ply\nformat ascii 1.0\ncomment test\n"
               "element vertex 4\n"
               "property float x\nproperty float y\nproperty float z\n"
               "element face 2\n"
               "property list uchar int vertex_indices\n"
               "end_header\n"
               "0 0 0\n1 0 0\n0 1 0\n0 0 1\n"
               "3 0 1 2\n4 0 1 2 3\n");
    const TriangleMesh mesh = load_mesh(p.string());
    CHECK(mesh.vertices.size() == 4);
    CHECK(mesh.faces.size() == 3);  // triangle + fan-split quad
    CHECK(mesh.faces[2] == std::array<int, 3>{0, 2, 3});
}

TEST_CASE("load_mesh: unsupported content") {
    const fs::path p = tmp_path("binary.ply");
    write_file(p, "ply\nformat binary_little_endian 1.0\nend_header\n");
    CHECK_THROWS_AS(load_mesh(p.string()), UnsupportedFormat);
    const fs::path q = tmp_path("noise.txt");
    write_file(q, "this is not a mesh\n");
    CHECK_THROWS_AS(load_mesh(q.string()), UnsupportedFormat);
}

TEST_CASE("silhouette CSV and JSON roundtrips are bit-exact") {
    Silhouette sil;
    sil.points = {Vec2(0.1234567890123456789, -1e-17), Vec2(1.0 / 3.0, 2.0),
                  Vec2(-0.7, M_PI), Vec2(-1.1, 0.2)};
    for (const char* name : {"roundtrip.csv", "roundtrip.json"}) {
        const fs::path p = tmp_path(name);
        save_silhouette(sil, p.string());
        const Silhouette back = load_silhouette(p.string());
        REQUIRE(back.points.size() == sil.points.size());
        for (std::size_t i = 0; i < sil.points.size(); ++i) {
            CHECK(std::memcmp(&back.points[i].x(), &sil.points[i].x(), 8) == 0);
            CHECK(std::memcmp(&back.points[i].y(), &sil.points[i].y(), 8) == 0);
        }
    }
}

TEST_CASE("silhouette: JSON and CSV of the same polygon load equal") {
    const PointCloud q = sample_mesh(make_l_prism(), 2000, 41);
    ProjectionConfig cfg;
    const Silhouette sil = silhouette_of(q, {random_rotation(42), Vec3::Zero()}, cfg);
    const fs::path pc = tmp_path("same.csv"), pj = tmp_path("same.json");
    save_silhouette(sil, pc.string());
    save_silhouette(sil, pj.string());
    const Silhouette a = load_silhouette(pc.string());
    const Silhouette b = load_silhouette(pj.string());
    REQUIRE(a.points.size() == b.points.size());
    for (std::size_t i = 0; i < a.points.size(); ++i) CHECK(a.points[i] == b.points[i]);
}

TEST_CASE("silhouette load errors") {
    const fs::path p = tmp_path("bad.csv");
    write_file(p, "0,0\n1,0\n");  // two vertices: not a polygon
    CHECK_THROWS_AS(load_silhouette(p.string()), DegenerateSilhouette);
    write_file(p, "0,0\n1,zero\n2,2\n");
    CHECK_THROWS_WITH_AS(load_silhouette(p.string()), doctest::Contains(":2:"), ParseError);
    write_file(p, "0 0\n1 0\n");
    CHECK_THROWS_AS(load_silhouette(p.string()), ParseError);
    const fs::path pj = tmp_path("bad.json");
    write_file(pj, "{\"points\": [[0, 0], [1]]}");
    CHECK_THROWS_AS(load_silhouette(pj.string()), ParseError);
    write_file(pj, "not json");
    CHECK_THROWS_AS(load_silhouette(pj.string()), ParseError);
}

TEST_CASE("bundle roundtrip is bit-exact") {
    const PointCloud sphere = sample_mesh(make_icosphere(1.0, 3), 2000, 43);
    ProjectionConfig cfg;
    cfg.alpha = auto_alpha(
        project_orthographic(transformed(sphere, {random_rotation(4242), Vec3::Zero()})));
    const SignatureField pal =
        precompute_field(sphere, DiscGrid(12), SignatureKind::Area, cfg, 43, 0);
    const fs::path p = tmp_path("pal.bundle");
    save_bundle(pal, p.string());
    const SignatureField back = load_bundle(p.string());
    CHECK(back.grid.n == pal.grid.n);
    CHECK(back.kind == pal.kind);
    CHECK(back.meta.fingerprint == pal.meta.fingerprint);
    CHECK(back.meta.point_count == pal.meta.point_count);
    CHECK(back.meta.mode == pal.meta.mode);
    CHECK(back.meta.depth_prior == pal.meta.depth_prior);
    CHECK(back.meta.alpha == pal.meta.alpha);
    CHECK(back.meta.seed == pal.meta.seed);
    REQUIRE(back.values.size() == pal.values.size());
    CHECK(std::memcmp(back.values.data(), pal.values.data(),
                      pal.values.size() * sizeof(double)) == 0);
    // saving the loaded field reproduces the file byte for byte
    const fs::path p2 = tmp_path("pal2.bundle");
    save_bundle(back, p2.string());
    CHECK(read_file(p) == read_file(p2));
}

TEST_CASE("bundle corruption and version checks") {
    const PointCloud sphere = sample_mesh(make_icosphere(1.0, 2), 500, 44);
    ProjectionConfig cfg;
    cfg.alpha = auto_alpha(
        project_orthographic(transformed(sphere, {random_rotation(4242), Vec3::Zero()})));
    const SignatureField pal =
        precompute_field(sphere, DiscGrid(8), SignatureKind::Area, cfg, 44, 0);
    const fs::path p = tmp_path("corrupt.bundle");
    save_bundle(pal, p.string());
    const std::string good = read_file(p);

    // flip one payload byte
    std::string flipped = good;
    flipped[flipped.size() / 2] = static_cast<char>(flipped[flipped.size() / 2] ^ 0x40);
    write_file(p, flipped);
    CHECK_THROWS_AS(load_bundle(p.string()), CorruptPayload);

    // truncation
    write_file(p, good.substr(0, good.size() - 12));
    CHECK_THROWS_AS(load_bundle(p.string()), CorruptPayload);

    // unrecognized version outranks the checksum
    std::string reversioned = good;
    const std::size_t at = reversioned.find("\"version\":1");
    REQUIRE(at != std::string::npos);
    reversioned.replace(at, 11, "\"version\":2");
    write_file(p, reversioned);
    CHECK_THROWS_AS(load_bundle(p.string()), VersionMismatch);

    // not a bundle at all
    write_file(p, "{\"format\":\"something-else\"}\n");
    CHECK_THROWS_AS(load_bundle(p.string()), UnsupportedFormat);
}

TEST_CASE("write_report aggregates match hand computation") {
    std::vector<PoseError> trials(3);
    trials[0] = {1.0, 0.1, 1.0, 0.2, 2.0};
    trials[1] = {2.0, 0.2, 2.0, 0.3, 3.0};
    trials[2] = {9.0, 0.3, 3.0, 0.4, 4.0};  // oe 9 > 6: failed trial
    const fs::path p = tmp_path("report.json");
    write_report(trials, p.string());
    const auto doc = nlohmann::json::parse(read_file(p));
    CHECK(doc["trial_count"] == 3);
    CHECK(doc["trials"].size() == 3);
    CHECK(doc["trials"][0]["success"] == true);
    CHECK(doc["trials"][2]["success"] == false);
    // hand-rolled mean/sd/max of oe: mean 4, population sd sqrt(38/3), max 9
    CHECK(doc["aggregates"]["oe_deg"]["mean"].get<double>() == doctest::Approx(4.0));
    CHECK(doc["aggregates"]["oe_deg"]["sd"].get<double>() ==
          doctest::Approx(std::sqrt(38.0 / 3.0)));
    CHECK(doc["aggregates"]["oe_deg"]["max"].get<double>() == doctest::Approx(9.0));
    CHECK(doc["aggregates"]["success_rate"].get<double>() == doctest::Approx(2.0 / 3.0));
    // byte-identical on rewrite
    const fs::path p2 = tmp_path("report2.json");
    write_report(trials, p2.string());
    CHECK(read_file(p) == read_file(p2));
}

TEST_CASE("write_report with no trials") {
    const fs::path p = tmp_path("empty_report.json");
    write_report({}, p.string());
    const std::string text = read_file(p);
    CHECK(text.find("no trials") != std::string::npos);
    CHECK(text.find("nan") == std::string::npos);
    CHECK(text.find("NaN") == std::string::npos);
    const auto doc = nlohmann::json::parse(text);  // still valid JSON
    CHECK(doc["trial_count"] == 0);
}

TEST_CASE("write_csv shape") {
    const fs::path p = tmp_path("table.csv");
    write_csv(p.string(), {"value", "rmse", "seconds"},
              {{0.02, 0.5, 1.25}, {0.08, 0.25, 2.5}});
    std::istringstream in(read_file(p));
    std::string line;
    REQUIRE(std::getline(in, line));
    CHECK(line == "value,rmse,seconds");
    REQUIRE(std::getline(in, line));
    CHECK(line == "0.02,0.5,1.25");
    REQUIRE(std::getline(in, line));
    CHECK(line == "0.080000000000000002,0.25,2.5");
    CHECK(!std::getline(in, line));
}
