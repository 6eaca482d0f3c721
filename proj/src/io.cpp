#include "matern/io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <vector>

#include "matern/error.hpp"

namespace matern::io {

namespace {

[[noreturn]] void parse_error(const std::string& path, std::size_t line, const std::string& what) {
    std::ostringstream os;
    os << path << ":" << line << ": " << what;
    fail(ErrorKind::Parse, os.str());
}

std::string lower_extension(const std::string& path) {
    std::string ext = std::filesystem::path(path).extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    return ext;
}

std::ifstream open_input(const std::string& path) {
    std::error_code ec;
    if (!std::filesystem::is_regular_file(path, ec)) fail(ErrorKind::Io, "input not found: " + path);
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorKind::Io, "cannot open " + path);
    return in;
}

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorKind::Io, "cannot write " + path);
    return out;
}

std::vector<std::string_view> split_ws(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
        const std::size_t start = i;
        while (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i]))) ++i;
        if (i > start) out.push_back(s.substr(start, i - start));
    }
    return out;
}

std::optional<double> to_double(std::string_view s) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

std::optional<long long> to_int(std::string_view s) {
    long long v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

void strip_cr(std::string& line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
}

// ---------------------------------------------------------------- PLY

enum class PlyType { Int8, UInt8, Int16, UInt16, Int32, UInt32, Float32, Float64 };

std::optional<PlyType> ply_type(std::string_view name) {
    if (name == "char" || name == "int8") return PlyType::Int8;
    if (name == "uchar" || name == "uint8") return PlyType::UInt8;
    if (name == "short" || name == "int16") return PlyType::Int16;
    if (name == "ushort" || name == "uint16") return PlyType::UInt16;
    if (name == "int" || name == "int32") return PlyType::Int32;
    if (name == "uint" || name == "uint32") return PlyType::UInt32;
    if (name == "float" || name == "float32") return PlyType::Float32;
    if (name == "double" || name == "float64") return PlyType::Float64;
    return std::nullopt;
}

std::size_t ply_size(PlyType t) {
    switch (t) {
        case PlyType::Int8:
        case PlyType::UInt8: return 1;
        case PlyType::Int16:
        case PlyType::UInt16: return 2;
        case PlyType::Int32:
        case PlyType::UInt32:
        case PlyType::Float32: return 4;
        case PlyType::Float64: return 8;
    }
    return 0;
}

struct PlyProperty {
    std::string name;
    PlyType type = PlyType::Float32;
    bool is_list = false;
    PlyType count_type = PlyType::UInt8;
};

struct PlyElement {
    std::string name;
    std::size_t count = 0;
    std::vector<PlyProperty> props;

    int find(std::string_view n) const {
        for (std::size_t i = 0; i < props.size(); ++i) {
            if (props[i].name == n) return static_cast<int>(i);
        }
        return -1;
    }
};

// Scalars per element row plus list payloads, in property order.
struct PlyData {
    std::vector<std::vector<double>> scalars;
    std::vector<std::vector<std::vector<long long>>> lists;
};

struct PlyFile {
    bool binary = false;
    std::vector<PlyElement> elements;
    std::vector<PlyData> data;

    int element(std::string_view n) const {
        for (std::size_t i = 0; i < elements.size(); ++i) {
            if (elements[i].name == n) return static_cast<int>(i);
        }
        return -1;
    }
};

template <class T>
T read_le(const unsigned char* p) {
    std::array<unsigned char, sizeof(T)> b{};
    std::memcpy(b.data(), p, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(b.begin(), b.end());
    T v;
    std::memcpy(&v, b.data(), sizeof(T));
    return v;
}

double decode(PlyType t, const unsigned char* p) {
    switch (t) {
        case PlyType::Int8: return read_le<std::int8_t>(p);
        case PlyType::UInt8: return read_le<std::uint8_t>(p);
        case PlyType::Int16: return read_le<std::int16_t>(p);
        case PlyType::UInt16: return read_le<std::uint16_t>(p);
        case PlyType::Int32: return read_le<std::int32_t>(p);
        case PlyType::UInt32: return read_le<std::uint32_t>(p);
        case PlyType::Float32: return read_le<float>(p);
        case PlyType::Float64: return read_le<double>(p);
    }
    return 0.0;
}

bool is_integer_type(PlyType t) { return t != PlyType::Float32 && t != PlyType::Float64; }

PlyFile read_ply(const std::string& path) {
    std::ifstream in = open_input(path);
    PlyFile ply;
    std::string line;
    std::size_t line_no = 0;
    bool saw_format = false;

    auto next_line = [&]() {
        if (!std::getline(in, line)) parse_error(path, line_no + 1, "unexpected end of file in PLY header");
        ++line_no;
        strip_cr(line);
    };

    next_line();
    if (line != "ply") parse_error(path, line_no, "missing 'ply' magic");
    while (true) {
        next_line();
        const auto tok = split_ws(line);
        if (tok.empty()) continue;
        if (tok[0] == "end_header") break;
        if (tok[0] == "comment" || tok[0] == "obj_info") continue;
        if (tok[0] == "format") {
            if (tok.size() != 3) parse_error(path, line_no, "malformed format line");
            if (tok[1] == "ascii") {
                ply.binary = false;
            } else if (tok[1] == "binary_little_endian") {
                ply.binary = true;
            } else if (tok[1] == "binary_big_endian") {
                parse_error(path, line_no, "binary_big_endian PLY is not supported");
            } else {
                parse_error(path, line_no, "unknown PLY format '" + std::string(tok[1]) + "'");
            }
            saw_format = true;
        } else if (tok[0] == "element") {
            if (tok.size() != 3) parse_error(path, line_no, "malformed element line");
            const auto count = to_int(tok[2]);
            if (!count || *count < 0) parse_error(path, line_no, "bad element count");
            ply.elements.push_back({std::string(tok[1]), static_cast<std::size_t>(*count), {}});
        } else if (tok[0] == "property") {
            if (ply.elements.empty()) parse_error(path, line_no, "property before any element");
            PlyProperty prop;
            if (tok.size() == 5 && tok[1] == "list") {
                const auto ct = ply_type(tok[2]);
                const auto it = ply_type(tok[3]);
                if (!ct || !it || !is_integer_type(*ct)) parse_error(path, line_no, "bad list property types");
                prop.is_list = true;
                prop.count_type = *ct;
                prop.type = *it;
                prop.name = std::string(tok[4]);
            } else if (tok.size() == 3) {
                const auto t = ply_type(tok[1]);
                if (!t) parse_error(path, line_no, "unknown property type '" + std::string(tok[1]) + "'");
                prop.type = *t;
                prop.name = std::string(tok[2]);
            } else {
                parse_error(path, line_no, "malformed property line");
            }
            ply.elements.back().props.push_back(prop);
        } else {
            parse_error(path, line_no, "unexpected header keyword '" + std::string(tok[0]) + "'");
        }
    }
    if (!saw_format) parse_error(path, line_no, "PLY header has no format line");

    ply.data.resize(ply.elements.size());
    if (!ply.binary) {
        for (std::size_t e = 0; e < ply.elements.size(); ++e) {
            const auto& el = ply.elements[e];
            auto& data = ply.data[e];
            data.scalars.resize(el.count);
            data.lists.resize(el.count);
            for (std::size_t r = 0; r < el.count; ++r) {
                do {
                    next_line();
                } while (split_ws(line).empty());
                const auto tok = split_ws(line);
                std::size_t k = 0;
                for (const auto& p : el.props) {
                    if (k >= tok.size()) parse_error(path, line_no, "too few values for element '" + el.name + "'");
                    if (p.is_list) {
                        const auto n = to_int(tok[k++]);
                        if (!n || *n < 0) parse_error(path, line_no, "bad list length");
                        std::vector<long long> items;
                        for (long long q = 0; q < *n; ++q) {
                            if (k >= tok.size()) parse_error(path, line_no, "list shorter than its length");
                            const auto v = to_int(tok[k++]);
                            if (!v) parse_error(path, line_no, "non-integer list entry");
                            items.push_back(*v);
                        }
                        data.lists[r].push_back(std::move(items));
                    } else {
                        const auto v = to_double(tok[k++]);
                        if (!v) parse_error(path, line_no, "malformed number '" + std::string(tok[k - 1]) + "'");
                        data.scalars[r].push_back(*v);
                    }
                }
                if (k != tok.size()) parse_error(path, line_no, "too many values for element '" + el.name + "'");
            }
        }
        return ply;
    }

    const std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    std::size_t off = 0;
    auto need = [&](std::size_t n, const std::string& el) {
        if (off + n > bytes.size()) {
            fail(ErrorKind::Parse, path + ": binary payload truncated in element '" + el + "'");
        }
    };
    for (std::size_t e = 0; e < ply.elements.size(); ++e) {
        const auto& el = ply.elements[e];
        auto& data = ply.data[e];
        data.scalars.resize(el.count);
        data.lists.resize(el.count);
        for (std::size_t r = 0; r < el.count; ++r) {
            for (const auto& p : el.props) {
                if (p.is_list) {
                    need(ply_size(p.count_type), el.name);
                    const double nd = decode(p.count_type, bytes.data() + off);
                    off += ply_size(p.count_type);
                    if (nd < 0) fail(ErrorKind::Parse, path + ": negative list length");
                    const auto n = static_cast<std::size_t>(nd);
                    need(n * ply_size(p.type), el.name);
                    std::vector<long long> items(n);
                    for (std::size_t q = 0; q < n; ++q) {
                        items[q] = static_cast<long long>(decode(p.type, bytes.data() + off));
                        off += ply_size(p.type);
                    }
                    data.lists[r].push_back(std::move(items));
                } else {
                    need(ply_size(p.type), el.name);
                    data.scalars[r].push_back(decode(p.type, bytes.data() + off));
                    off += ply_size(p.type);
                }
            }
        }
    }
    return ply;
}

// Index of a scalar property among the element's scalar properties.
int scalar_slot(const PlyElement& el, std::string_view name) {
    int slot = 0;
    for (const auto& p : el.props) {
        if (p.name == name) return p.is_list ? -1 : slot;
        if (!p.is_list) ++slot;
    }
    return -1;
}

struct VertexColumns {
    std::array<int, 3> pos{-1, -1, -1};
    std::array<int, 3> nrm{-1, -1, -1};
    bool has_normals() const { return nrm[0] >= 0 && nrm[1] >= 0 && nrm[2] >= 0; }
};

VertexColumns vertex_columns(const std::string& path, const PlyElement& el) {
    VertexColumns c;
    const char* pos[3] = {"x", "y", "z"};
    const char* nrm[3] = {"nx", "ny", "nz"};
    const char* alt[3] = {"normal_x", "normal_y", "normal_z"};
    for (int a = 0; a < 3; ++a) {
        c.pos[static_cast<std::size_t>(a)] = scalar_slot(el, pos[a]);
        if (c.pos[static_cast<std::size_t>(a)] < 0) {
            fail(ErrorKind::Parse, path + ": vertex element lacks property '" + pos[a] + "'");
        }
        int n = scalar_slot(el, nrm[a]);
        if (n < 0) n = scalar_slot(el, alt[a]);
        c.nrm[static_cast<std::size_t>(a)] = n;
    }
    return c;
}

OrientedPointCloud cloud_from_ply(const std::string& path) {
    const PlyFile ply = read_ply(path);
    const int v = ply.element("vertex");
    if (v < 0) fail(ErrorKind::Parse, path + ": PLY has no vertex element");
    const auto& el = ply.elements[static_cast<std::size_t>(v)];
    const auto cols = vertex_columns(path, el);
    if (!cols.has_normals()) fail(ErrorKind::Parse, path + ": normals required (nx, ny, nz properties missing)");
    const auto n = static_cast<Eigen::Index>(el.count);
    PointMatrix pts(n, 3);
    PointMatrix nrm(n, 3);
    const auto& rows = ply.data[static_cast<std::size_t>(v)].scalars;
    for (Eigen::Index i = 0; i < n; ++i) {
        for (int a = 0; a < 3; ++a) {
            pts(i, a) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(cols.pos[static_cast<std::size_t>(a)])];
            nrm(i, a) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(cols.nrm[static_cast<std::size_t>(a)])];
        }
    }
    return OrientedPointCloud::make(std::move(pts), std::move(nrm));
}

void add_polygon(const std::string& path, std::size_t line, const std::vector<long long>& poly,
                 std::size_t vertex_count, std::vector<std::array<std::int32_t, 3>>& tris) {
    if (poly.size() < 3) parse_error(path, line, "face with fewer than 3 vertices");
    for (long long idx : poly) {
        if (idx < 0 || static_cast<std::size_t>(idx) >= vertex_count) {
            std::ostringstream os;
            os << "face index " << idx << " out of range (vertex count " << vertex_count << ")";
            parse_error(path, line, os.str());
        }
    }
    for (std::size_t k = 1; k + 1 < poly.size(); ++k) {
        tris.push_back({static_cast<std::int32_t>(poly[0]), static_cast<std::int32_t>(poly[k]),
                        static_cast<std::int32_t>(poly[k + 1])});
    }
}

TriangleMesh mesh_from_tris(PointMatrix vertices, PointMatrix normals,
                            const std::vector<std::array<std::int32_t, 3>>& tris) {
    TriangleMesh m;
    m.vertices = std::move(vertices);
    m.vertex_normals = std::move(normals);
    m.faces.resize(static_cast<Eigen::Index>(tris.size()), 3);
    for (std::size_t f = 0; f < tris.size(); ++f) {
        for (int c = 0; c < 3; ++c) m.faces(static_cast<Eigen::Index>(f), c) = tris[f][static_cast<std::size_t>(c)];
    }
    return m;
}

TriangleMesh mesh_from_ply(const std::string& path) {
    const PlyFile ply = read_ply(path);
    const int v = ply.element("vertex");
    if (v < 0) fail(ErrorKind::Parse, path + ": PLY has no vertex element");
    const auto& vel = ply.elements[static_cast<std::size_t>(v)];
    const auto cols = vertex_columns(path, vel);
    const auto n = static_cast<Eigen::Index>(vel.count);
    PointMatrix pts(n, 3);
    PointMatrix nrm(cols.has_normals() ? n : 0, 3);
    const auto& rows = ply.data[static_cast<std::size_t>(v)].scalars;
    for (Eigen::Index i = 0; i < n; ++i) {
        for (int a = 0; a < 3; ++a) {
            const auto& row = rows[static_cast<std::size_t>(i)];
            pts(i, a) = row[static_cast<std::size_t>(cols.pos[static_cast<std::size_t>(a)])];
            if (cols.has_normals()) nrm(i, a) = row[static_cast<std::size_t>(cols.nrm[static_cast<std::size_t>(a)])];
        }
    }
    std::vector<std::array<std::int32_t, 3>> tris;
    const int f = ply.element("face");
    if (f >= 0) {
        const auto& fel = ply.elements[static_cast<std::size_t>(f)];
        int list_slot = -1;
        int slot = 0;
        for (const auto& p : fel.props) {
            if (p.is_list && (p.name == "vertex_indices" || p.name == "vertex_index")) list_slot = slot;
            if (p.is_list) ++slot;
        }
        if (list_slot < 0) fail(ErrorKind::Parse, path + ": face element lacks a vertex_indices list");
        for (std::size_t r = 0; r < fel.count; ++r) {
            add_polygon(path, r, ply.data[static_cast<std::size_t>(f)].lists[r][static_cast<std::size_t>(list_slot)],
                        vel.count, tris);
        }
    }
    if (nrm.rows() > 0) {
        for (Eigen::Index i = 0; i < nrm.rows(); ++i) {
            const double len = nrm.row(i).norm();
            if (len > 0.0) nrm.row(i) /= len;
        }
    }
    return mesh_from_tris(std::move(pts), std::move(nrm), tris);
}

// ---------------------------------------------------------------- OBJ

struct ObjData {
    std::vector<Vec3> v;
    std::vector<Vec3> vn;
    std::vector<std::array<std::int32_t, 3>> tris;
};

ObjData read_obj(const std::string& path, bool want_faces) {
    std::ifstream in = open_input(path);
    ObjData obj;
    std::string line;
    std::size_t line_no = 0;
    std::vector<std::pair<std::size_t, std::vector<long long>>> faces;
    while (std::getline(in, line)) {
        ++line_no;
        strip_cr(line);
        const auto hash = line.find('#');
        const std::string_view body = std::string_view(line).substr(0, hash);
        const auto tok = split_ws(body);
        if (tok.empty()) continue;
        const auto& key = tok[0];
        if (key == "v" || key == "vn") {
            if (tok.size() < 4 || (key == "vn" && tok.size() != 4) || tok.size() > 5) {
                parse_error(path, line_no, "'" + std::string(key) + "' needs 3 coordinates");
            }
            Vec3 p;
            for (int a = 0; a < 3; ++a) {
                const auto d = to_double(tok[static_cast<std::size_t>(a) + 1]);
                if (!d) parse_error(path, line_no, "malformed number '" + std::string(tok[static_cast<std::size_t>(a) + 1]) + "'");
                p[a] = *d;
            }
            (key == "v" ? obj.v : obj.vn).push_back(p);
        } else if (key == "f") {
            if (tok.size() < 4) parse_error(path, line_no, "face with fewer than 3 vertices");
            std::vector<long long> poly;
            for (std::size_t k = 1; k < tok.size(); ++k) {
                const auto slash = tok[k].find('/');
                const auto idx = to_int(tok[k].substr(0, slash));
                if (!idx || *idx == 0) parse_error(path, line_no, "malformed face index '" + std::string(tok[k]) + "'");
                poly.push_back(*idx);
            }
            faces.emplace_back(line_no, std::move(poly));
        } else if (key == "vt" || key == "vp" || key == "g" || key == "o" || key == "s" || key == "usemtl" ||
                   key == "mtllib" || key == "l") {
            continue;
        } else {
            parse_error(path, line_no, "unknown OBJ record '" + std::string(key) + "'");
        }
    }
    if (want_faces) {
        const auto nv = static_cast<long long>(obj.v.size());
        for (auto& [ln, poly] : faces) {
            // Negative indices count back from the end of the vertex list.
            for (auto& idx : poly) idx = idx > 0 ? idx - 1 : nv + idx;
            add_polygon(path, ln, poly, obj.v.size(), obj.tris);
        }
    }
    return obj;
}

PointMatrix to_matrix(const std::vector<Vec3>& v) {
    PointMatrix m(static_cast<Eigen::Index>(v.size()), 3);
    for (std::size_t i = 0; i < v.size(); ++i) m.row(static_cast<Eigen::Index>(i)) = v[i].transpose();
    return m;
}

// ---------------------------------------------------------------- XYZ

OrientedPointCloud cloud_from_xyz(const std::string& path) {
    std::ifstream in = open_input(path);
    std::vector<std::array<double, 6>> rows;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        strip_cr(line);
        const auto tok = split_ws(line);
        if (tok.empty() || tok[0].front() == '#') continue;
        if (tok.size() == 3) parse_error(path, line_no, "normals required (XYZ rows need 6 columns)");
        if (tok.size() != 6) parse_error(path, line_no, "expected 6 columns, found " + std::to_string(tok.size()));
        std::array<double, 6> r{};
        for (std::size_t k = 0; k < 6; ++k) {
            const auto d = to_double(tok[k]);
            if (!d) parse_error(path, line_no, "malformed number '" + std::string(tok[k]) + "'");
            r[k] = *d;
        }
        rows.push_back(r);
    }
    PointMatrix pts(static_cast<Eigen::Index>(rows.size()), 3);
    PointMatrix nrm(static_cast<Eigen::Index>(rows.size()), 3);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (int a = 0; a < 3; ++a) {
            pts(static_cast<Eigen::Index>(i), a) = rows[i][static_cast<std::size_t>(a)];
            nrm(static_cast<Eigen::Index>(i), a) = rows[i][static_cast<std::size_t>(a) + 3];
        }
    }
    return OrientedPointCloud::make(std::move(pts), std::move(nrm));
}

// ---------------------------------------------------------------- writers

template <class T>
void write_le(std::ostream& out, T v) {
    std::array<char, sizeof(T)> b{};
    std::memcpy(b.data(), &v, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(b.begin(), b.end());
    out.write(b.data(), static_cast<std::streamsize>(b.size()));
}

void finish(std::ofstream& out, const std::string& path) {
    out.flush();
    if (!out) fail(ErrorKind::Io, "write failed: " + path);
}

PointMatrix normals_for_output(const TriangleMesh& mesh) {
    if (mesh.vertex_normals.rows() == mesh.vertices.rows()) return mesh.vertex_normals;
    return mesh.face_averaged_normals();
}

void save_obj(const TriangleMesh& mesh, const std::string& path) {
    std::ofstream out = open_output(path);
    const PointMatrix n = normals_for_output(mesh);
    char buf[128];
    for (Eigen::Index i = 0; i < mesh.vertices.rows(); ++i) {
        std::snprintf(buf, sizeof(buf), "v %.9g %.9g %.9g\n", mesh.vertices(i, 0), mesh.vertices(i, 1), mesh.vertices(i, 2));
        out << buf;
    }
    for (Eigen::Index i = 0; i < n.rows(); ++i) {
        std::snprintf(buf, sizeof(buf), "vn %.9g %.9g %.9g\n", n(i, 0), n(i, 1), n(i, 2));
        out << buf;
    }
    for (Eigen::Index f = 0; f < mesh.faces.rows(); ++f) {
        const long a = mesh.faces(f, 0) + 1L;
        const long b = mesh.faces(f, 1) + 1L;
        const long c = mesh.faces(f, 2) + 1L;
        std::snprintf(buf, sizeof(buf), "f %ld//%ld %ld//%ld %ld//%ld\n", a, a, b, b, c, c);
        out << buf;
    }
    finish(out, path);
}

void save_ply(const TriangleMesh& mesh, const std::string& path) {
    std::ofstream out = open_output(path);
    const PointMatrix n = normals_for_output(mesh);
    out << "ply\nformat binary_little_endian 1.0\n"
        << "element vertex " << mesh.vertices.rows() << "\n"
        << "property float x\nproperty float y\nproperty float z\n"
        << "property float nx\nproperty float ny\nproperty float nz\n"
        << "element face " << mesh.faces.rows() << "\n"
        << "property list uchar int vertex_indices\nend_header\n";
    for (Eigen::Index i = 0; i < mesh.vertices.rows(); ++i) {
        for (int a = 0; a < 3; ++a) write_le(out, static_cast<float>(mesh.vertices(i, a)));
        for (int a = 0; a < 3; ++a) write_le(out, static_cast<float>(n(i, a)));
    }
    for (Eigen::Index f = 0; f < mesh.faces.rows(); ++f) {
        write_le(out, std::uint8_t{3});
        for (int c = 0; c < 3; ++c) write_le(out, static_cast<std::int32_t>(mesh.faces(f, c)));
    }
    finish(out, path);
}

}  // namespace

CloudFormat cloud_format_from_path(const std::string& path) {
    const std::string ext = lower_extension(path);
    if (ext == ".ply") return CloudFormat::Ply;
    if (ext == ".obj") return CloudFormat::Obj;
    if (ext == ".xyz") return CloudFormat::Xyz;
    fail(ErrorKind::Parse, "cannot infer point cloud format from '" + path + "' (expected .ply, .obj or .xyz)");
}

MeshFormat mesh_format_from_path(const std::string& path) {
    const std::string ext = lower_extension(path);
    if (ext == ".ply") return MeshFormat::Ply;
    if (ext == ".obj") return MeshFormat::Obj;
    fail(ErrorKind::Parse, "cannot infer mesh format from '" + path + "' (expected .ply or .obj)");
}

OrientedPointCloud load_cloud(const std::string& path, CloudFormat format) {
    if (format == CloudFormat::Auto) format = cloud_format_from_path(path);
    try {
        switch (format) {
            case CloudFormat::Ply: return cloud_from_ply(path);
            case CloudFormat::Xyz: return cloud_from_xyz(path);
            case CloudFormat::Obj: {
                const ObjData obj = read_obj(path, false);
                if (obj.vn.empty()) fail(ErrorKind::Parse, path + ": normals required (no vn records)");
                if (obj.vn.size() != obj.v.size()) {
                    fail(ErrorKind::Parse, path + ": v and vn counts differ (" + std::to_string(obj.v.size()) +
                                               " vs " + std::to_string(obj.vn.size()) + ")");
                }
                return OrientedPointCloud::make(to_matrix(obj.v), to_matrix(obj.vn));
            }
            case CloudFormat::Auto: break;
        }
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::InvalidInput) fail(ErrorKind::Parse, path + ": " + e.what());
        throw;
    }
    fail(ErrorKind::Parse, "unknown cloud format");
}

void save_cloud(const OrientedPointCloud& cloud, const std::string& path) {
    if (cloud.size() == 0) fail(ErrorKind::InvalidInput, "refusing to write an empty point cloud");
    std::ofstream out = open_output(path);
    out << "ply\nformat binary_little_endian 1.0\n"
        << "element vertex " << cloud.size() << "\n"
        << "property double x\nproperty double y\nproperty double z\n"
        << "property double nx\nproperty double ny\nproperty double nz\nend_header\n";
    for (Eigen::Index i = 0; i < cloud.size(); ++i) {
        for (int a = 0; a < 3; ++a) write_le(out, cloud.points(i, a));
        for (int a = 0; a < 3; ++a) write_le(out, cloud.normals(i, a));
    }
    finish(out, path);
}

void save_mesh(const TriangleMesh& mesh, const std::string& path, MeshFormat format) {
    if (mesh.empty() || mesh.vertices.rows() == 0) fail(ErrorKind::InvalidInput, "refusing to write an empty mesh");
    mesh.validate();
    if (format == MeshFormat::Auto) format = mesh_format_from_path(path);
    if (format == MeshFormat::Obj) {
        save_obj(mesh, path);
    } else {
        save_ply(mesh, path);
    }
}

TriangleMesh load_mesh(const std::string& path, MeshFormat format) {
    if (format == MeshFormat::Auto) format = mesh_format_from_path(path);
    if (format == MeshFormat::Ply) return mesh_from_ply(path);
    ObjData obj = read_obj(path, true);
    PointMatrix normals(0, 3);
    if (!obj.vn.empty() && obj.vn.size() == obj.v.size()) {
        normals = to_matrix(obj.vn);
        for (Eigen::Index i = 0; i < normals.rows(); ++i) {
            const double len = normals.row(i).norm();
            if (len > 0.0) normals.row(i) /= len;
        }
    }
    return mesh_from_tris(to_matrix(obj.v), std::move(normals), obj.tris);
}

}  // namespace matern::io
