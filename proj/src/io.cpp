#include "pfs/io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace pfs {

static_assert(std::endian::native == std::endian::little,
              "bundle payload I/O assumes a little-endian host");

namespace {

using nlohmann::json;

[[noreturn]] void parse_fail(const std::string& path, std::size_t line,
                             const std::string& what) {
    throw ParseError(path + ":" + std::to_string(line) + ": " + what);
}

std::string read_all(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_all(const std::string& path, const std::string& data) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open " + path + " for writing");
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
    if (!out) throw Error("write failed: " + path);
}

// 17 significant digits: enough for strtod to reproduce the exact double
std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::uint64_t fnv1a(const void* data, std::size_t n, std::uint64_t h = 14695981039346656037ull) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 1099511628211ull;
    }
    return h;
}

// ---- mesh loading -------------------------------------------------------

int resolve_index(long long idx, std::size_t n_vertices, const std::string& path,
                  std::size_t line) {
    // OBJ-style: 1-based, negative counts from the end
    long long resolved = idx > 0 ? idx - 1 : static_cast<long long>(n_vertices) + idx;
    if (resolved < 0 || resolved >= static_cast<long long>(n_vertices))
        parse_fail(path, line, "vertex index out of range");
    return static_cast<int>(resolved);
}

void fan_triangulate(const std::vector<int>& poly, std::vector<std::array<int, 3>>& faces) {
    for (std::size_t k = 2; k < poly.size(); ++k)
        faces.push_back({poly[0], poly[static_cast<int>(k) - 1], poly[k]});
}

TriangleMesh load_obj(const std::string& path, const std::string& text) {
    TriangleMesh mesh;
    std::istringstream in(text);
    std::string raw;
    std::size_t lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        if (!raw.empty() && raw.back() == '\r') raw.pop_back();
        std::istringstream line(raw);
        std::string tag;
        if (!(line >> tag) || tag[0] == '#') continue;
        if (tag == "v") {
            Vec3 v;
            if (!(line >> v.x() >> v.y() >> v.z()))
                parse_fail(path, lineno, "vertex needs three coordinates");
            mesh.vertices.push_back(v);
        } else if (tag == "f") {
            std::vector<int> poly;
            std::string tok;
            while (line >> tok) {
                // accept i, i/j, i//k, i/j/k — only the vertex index matters
                const std::size_t slash = tok.find('/');
                const std::string head = slash == std::string::npos ? tok : tok.substr(0, slash);
                try {
                    std::size_t used = 0;
                    const long long idx = std::stoll(head, &used);
                    if (used != head.size()) throw std::invalid_argument("trailing");
                    poly.push_back(resolve_index(idx, mesh.vertices.size(), path, lineno));
                } catch (const ParseError&) {
                    throw;
                } catch (const std::exception&) {
                    parse_fail(path, lineno, "bad face index '" + tok + "'");
                }
            }
            if (poly.size() < 3) parse_fail(path, lineno, "face needs at least 3 vertices");
            fan_triangulate(poly, mesh.faces);
        }
        // vn/vt/o/g/s/usemtl/mtllib and other records are ignored
    }
    if (mesh.vertices.empty() || mesh.faces.empty())
        throw ParseError(path + ": no geometry (expected v and f records)");
    return mesh;
}

TriangleMesh load_ply(const std::string& path, const std::string& text) {
    std::istringstream in(text);
    std::string raw;
    std::size_t lineno = 0;
    auto next_line = [&](std::string& out) {
        while (std::getline(in, raw)) {
            ++lineno;
            if (!raw.empty() && raw.back() == '\r') raw.pop_back();
            if (raw.empty()) continue;
            out = raw;
            return true;
        }
        return false;
    };

    std::string line;
    if (!next_line(line) || line != "ply") parse_fail(path, lineno, "missing ply magic");
    std::size_t n_vertices = 0, n_faces = 0;
    int coord_props = 0;          // properties of the vertex element, in order
    int xi = -1, yi = -1, zi = -1;
    enum { None, Vertex, Face } current = None;
    bool ascii = false, in_header = true;
    while (in_header) {
        if (!next_line(line)) parse_fail(path, lineno, "unterminated header");
        std::istringstream ls(line);
        std::string tag;
        ls >> tag;
        if (tag == "comment") continue;
        if (tag == "format") {
            std::string kind;
            ls >> kind;
            ascii = kind == "ascii";
            if (!ascii) throw UnsupportedFormat(path + ": only ascii PLY is supported");
        } else if (tag == "element") {
            std::string name;
            std::size_t count = 0;
            if (!(ls >> name >> count)) parse_fail(path, lineno, "bad element record");
            if (name == "vertex") {
                current = Vertex;
                n_vertices = count;
            } else if (name == "face") {
                current = Face;
                n_faces = count;
            } else {
                current = None;
            }
        } else if (tag == "property") {
            if (current == Vertex) {
                std::string type, name;
                ls >> type;
                if (type == "list") parse_fail(path, lineno, "list property on vertices");
                ls >> name;
                if (name == "x") xi = coord_props;
                if (name == "y") yi = coord_props;
                if (name == "z") zi = coord_props;
                ++coord_props;
            }
        } else if (tag == "end_header") {
            in_header = false;
        } else if (tag != "ply") {
            parse_fail(path, lineno, "unknown header record '" + tag + "'");
        }
    }
    if (xi < 0 || yi < 0 || zi < 0) throw ParseError(path + ": vertex element lacks x/y/z");

    TriangleMesh mesh;
    mesh.vertices.reserve(n_vertices);
    for (std::size_t i = 0; i < n_vertices; ++i) {
        if (!next_line(line)) parse_fail(path, lineno, "truncated vertex list");
        std::istringstream ls(line);
        std::vector<double> vals(static_cast<std::size_t>(coord_props), 0.0);
        for (int k = 0; k < coord_props; ++k)
            if (!(ls >> vals[static_cast<std::size_t>(k)]))
                parse_fail(path, lineno, "bad vertex line");
        mesh.vertices.emplace_back(vals[static_cast<std::size_t>(xi)],
                                   vals[static_cast<std::size_t>(yi)],
                                   vals[static_cast<std::size_t>(zi)]);
    }
    for (std::size_t i = 0; i < n_faces; ++i) {
        if (!next_line(line)) parse_fail(path, lineno, "truncated face list");
        std::istringstream ls(line);
        std::size_t count = 0;
        if (!(ls >> count) || count < 3) parse_fail(path, lineno, "bad face count");
        std::vector<int> poly;
        for (std::size_t k = 0; k < count; ++k) {
            long long idx = 0;
            if (!(ls >> idx)) parse_fail(path, lineno, "truncated face line");
            if (idx < 0 || idx >= static_cast<long long>(mesh.vertices.size()))
                parse_fail(path, lineno, "vertex index out of range");
            poly.push_back(static_cast<int>(idx));
        }
        fan_triangulate(poly, mesh.faces);
    }
    if (mesh.vertices.empty() || mesh.faces.empty())
        throw ParseError(path + ": no geometry");
    return mesh;
}

// ---- report helpers -----------------------------------------------------

struct Stats {
    double mean = 0, sd = 0, max = 0;
};

Stats aggregate(const std::vector<double>& xs) {
    Stats s;
    for (double x : xs) {
        s.mean += x;
        s.max = std::max(s.max, x);
    }
    s.mean /= static_cast<double>(xs.size());
    double var = 0;
    for (double x : xs) var += (x - s.mean) * (x - s.mean);
    s.sd = std::sqrt(var / static_cast<double>(xs.size()));
    return s;
}

void emit_stats(std::ostringstream& out, const char* name, const std::vector<double>& xs,
                bool last) {
    const Stats s = aggregate(xs);
    out << "    \"" << name << "\": {\"mean\": " << fmt_double(s.mean)
        << ", \"sd\": " << fmt_double(s.sd) << ", \"max\": " << fmt_double(s.max) << "}"
        << (last ? "\n" : ",\n");
}

}  // namespace

TriangleMesh load_mesh(const std::string& path) {
    const std::string text = read_all(path);
    if (text.rfind("ply", 0) == 0) return load_ply(path, text);
    // OBJ has no magic; accept it when the content looks like OBJ records
    for (const char* tag : {"v ", "v\t", "f ", "#"})
        if (text.rfind(tag, 0) == 0) return load_obj(path, text);
    if (text.find("\nv ") != std::string::npos || text.find("\nf ") != std::string::npos)
        return load_obj(path, text);
    throw UnsupportedFormat(path + ": expected ASCII OBJ or ASCII PLY");
}

Silhouette load_silhouette(const std::string& path) {
    const std::string text = read_all(path);
    Silhouette sil;
    if (path.size() >= 5 && path.substr(path.size() - 5) == ".json") {
        json doc;
        try {
            doc = json::parse(text);
        } catch (const std::exception& e) {
            throw ParseError(path + ": " + e.what());
        }
        if (!doc.is_object() || !doc.contains("points") || !doc["points"].is_array())
            throw ParseError(path + ": expected {\"points\": [[x, y], ...]}");
        for (const auto& p : doc["points"]) {
            if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number())
                throw ParseError(path + ": every point must be a [x, y] pair");
            sil.points.emplace_back(p[0].get<double>(), p[1].get<double>());
        }
    } else {
        std::istringstream in(text);
        std::string raw;
        std::size_t lineno = 0;
        while (std::getline(in, raw)) {
            ++lineno;
            if (!raw.empty() && raw.back() == '\r') raw.pop_back();
            if (raw.empty()) continue;
            const std::size_t comma = raw.find(',');
            if (comma == std::string::npos) parse_fail(path, lineno, "expected 'x,y'");
            try {
                std::size_t ux = 0, uy = 0;
                const std::string xs = raw.substr(0, comma), ys = raw.substr(comma + 1);
                const double x = std::stod(xs, &ux);
                const double y = std::stod(ys, &uy);
                if (ux != xs.size() || uy != ys.size())
                    throw std::invalid_argument("trailing");
                sil.points.emplace_back(x, y);
            } catch (const std::exception&) {
                parse_fail(path, lineno, "bad coordinate in '" + raw + "'");
            }
        }
    }
    check_silhouette(sil);
    return sil;
}

void save_silhouette(const Silhouette& sil, const std::string& path) {
    std::ostringstream out;
    if (path.size() >= 5 && path.substr(path.size() - 5) == ".json") {
        out << "{\"points\": [";
        for (std::size_t i = 0; i < sil.points.size(); ++i)
            out << (i ? ", [" : "[") << fmt_double(sil.points[i].x()) << ", "
                << fmt_double(sil.points[i].y()) << "]";
        out << "]}\n";
    } else {
        for (const Vec2& p : sil.points)
            out << fmt_double(p.x()) << "," << fmt_double(p.y()) << "\n";
    }
    write_all(path, out.str());
}

void save_bundle(const SignatureField& field, const std::string& path) {
    const int n = field.grid.n;
    // header line
    json header;
    header["format"] = "signature-bundle";
    header["version"] = 1;
    header["kind"] = field.kind == SignatureKind::Area ? "area" : "aspect";
    header["n"] = n;
    header["mode"] =
        field.meta.mode == ProjectionMode::Orthographic ? "orthographic" : "perspective";
    header["depth_prior"] = field.meta.depth_prior;
    header["fingerprint"] = field.meta.fingerprint;
    header["point_count"] = field.meta.point_count;
    header["alpha"] = field.meta.alpha;
    header["seed"] = field.meta.seed;
    std::string data = header.dump() + "\n";

    // packed mask bits, row-major, LSB-first within each byte
    const std::size_t n_cells = static_cast<std::size_t>(n) * static_cast<std::size_t>(n);
    std::vector<unsigned char> mask((n_cells + 7) / 8, 0);
    std::vector<double> masked_values;
    for (int iy = 0; iy < n; ++iy) {
        for (int ix = 0; ix < n; ++ix) {
            if (!field.grid.masked(ix, iy)) continue;
            const std::size_t c = static_cast<std::size_t>(iy) * static_cast<std::size_t>(n) +
                                  static_cast<std::size_t>(ix);
            mask[c / 8] |= static_cast<unsigned char>(1u << (c % 8));
            masked_values.push_back(field.at(ix, iy));
        }
    }
    data.append(reinterpret_cast<const char*>(mask.data()), mask.size());
    data.append(reinterpret_cast<const char*>(masked_values.data()),
                masked_values.size() * sizeof(double));
    const std::uint64_t checksum = fnv1a(data.data(), data.size());
    data.append(reinterpret_cast<const char*>(&checksum), sizeof(checksum));
    write_all(path, data);
}

SignatureField load_bundle(const std::string& path) {
    const std::string data = read_all(path);
    const std::size_t nl = data.find('\n');
    if (nl == std::string::npos) throw CorruptPayload(path + ": missing header line");
    json header;
    try {
        header = json::parse(data.substr(0, nl));
    } catch (const std::exception& e) {
        throw CorruptPayload(path + ": bad header: " + e.what());
    }
    if (!header.is_object() || header.value("format", "") != "signature-bundle")
        throw UnsupportedFormat(path + ": not a signature bundle");
    if (header.value("version", -1) != 1)
        throw VersionMismatch(path + ": unrecognized bundle version");

    SignatureField field;
    const int n = header.value("n", 0);
    try {
        field.grid = DiscGrid(n);
    } catch (const Error&) {
        throw CorruptPayload(path + ": bad grid resolution");
    }
    const std::string kind = header.value("kind", "");
    if (kind == "area")
        field.kind = SignatureKind::Area;
    else if (kind == "aspect")
        field.kind = SignatureKind::Aspect;
    else
        throw CorruptPayload(path + ": bad kind");
    const std::string mode = header.value("mode", "");
    if (mode == "orthographic")
        field.meta.mode = ProjectionMode::Orthographic;
    else if (mode == "perspective")
        field.meta.mode = ProjectionMode::Perspective;
    else
        throw CorruptPayload(path + ": bad mode");
    field.meta.depth_prior = header.value("depth_prior", 0.0);
    field.meta.fingerprint = header.value("fingerprint", std::uint64_t{0});
    field.meta.point_count = header.value("point_count", std::size_t{0});
    field.meta.alpha = header.value("alpha", 0.0);
    field.meta.seed = header.value("seed", std::uint64_t{0});

    // payload layout check
    const std::size_t n_cells = static_cast<std::size_t>(n) * static_cast<std::size_t>(n);
    const std::size_t mask_bytes = (n_cells + 7) / 8;
    const std::size_t payload_off = nl + 1;
    if (data.size() < payload_off + mask_bytes + sizeof(std::uint64_t))
        throw CorruptPayload(path + ": truncated payload");
    const unsigned char* mask =
        reinterpret_cast<const unsigned char*>(data.data() + payload_off);
    std::size_t n_masked = 0;
    for (std::size_t c = 0; c < n_cells; ++c)
        if (mask[c / 8] & (1u << (c % 8))) ++n_masked;
    const std::size_t expected =
        payload_off + mask_bytes + n_masked * sizeof(double) + sizeof(std::uint64_t);
    if (data.size() != expected)
        throw CorruptPayload(path + ": payload length mismatch");

    std::uint64_t stored = 0;
    std::memcpy(&stored, data.data() + data.size() - sizeof(stored), sizeof(stored));
    if (fnv1a(data.data(), data.size() - sizeof(stored)) != stored)
        throw CorruptPayload(path + ": checksum mismatch");

    field.values.assign(n_cells, SignatureField::sentinel);
    const char* vals = data.data() + payload_off + mask_bytes;
    std::size_t next = 0;
    for (std::size_t c = 0; c < n_cells; ++c) {
        if (!(mask[c / 8] & (1u << (c % 8)))) continue;
        std::memcpy(&field.values[c], vals + next * sizeof(double), sizeof(double));
        ++next;
    }
    return field;
}

void write_report(const std::vector<PoseError>& results, const std::string& path) {
    std::ostringstream out;
    out << "{\n  \"trial_count\": " << results.size() << ",\n";
    out << "  \"trials\": [";
    for (std::size_t i = 0; i < results.size(); ++i) {
        const PoseError& e = results[i];
        out << (i ? ",\n    " : "\n    ") << "{\"oe_deg\": " << fmt_double(e.oe_deg)
            << ", \"te\": " << fmt_double(e.te)
            << ", \"te_percent\": " << fmt_double(e.te_percent)
            << ", \"rmse\": " << fmt_double(e.rmse)
            << ", \"rmse_percent\": " << fmt_double(e.rmse_percent)
            << ", \"success\": " << (is_success(e) ? "true" : "false") << "}";
    }
    out << (results.empty() ? "],\n" : "\n  ],\n");
    if (results.empty()) {
        out << "  \"aggregates\": \"no trials\"\n}\n";
        write_all(path, out.str());
        return;
    }
    std::vector<double> oe, te, tep, rm, rmp;
    std::size_t successes = 0;
    for (const PoseError& e : results) {
        oe.push_back(e.oe_deg);
        te.push_back(e.te);
        tep.push_back(e.te_percent);
        rm.push_back(e.rmse);
        rmp.push_back(e.rmse_percent);
        if (is_success(e)) ++successes;
    }
    out << "  \"aggregates\": {\n";
    emit_stats(out, "oe_deg", oe, false);
    emit_stats(out, "te", te, false);
    emit_stats(out, "te_percent", tep, false);
    emit_stats(out, "rmse", rm, false);
    emit_stats(out, "rmse_percent", rmp, false);
    out << "    \"success_rate\": "
        << fmt_double(static_cast<double>(successes) / static_cast<double>(results.size()))
        << "\n  }\n}\n";
    write_all(path, out.str());
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
    std::ostringstream out;
    for (std::size_t i = 0; i < header.size(); ++i)
        out << (i ? "," : "") << header[i];
    out << "\n";
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i)
            out << (i ? "," : "") << fmt_double(row[i]);
        out << "\n";
    }
    write_all(path, out.str());
}

}  // namespace pfs
