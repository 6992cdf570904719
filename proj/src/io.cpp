#include "rdf/io.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstring>
#include <fstream>
#include <functional>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

namespace rdf {

namespace {

using nlohmann::json;

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open file: " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& data) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot open file for writing: " + path.string());
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
    if (!out) throw ParseError("write failed: " + path.string());
}

[[noreturn]] void fail_at(const std::filesystem::path& path, std::size_t offset,
                          const std::string& what) {
    throw ParseError(path.string() + ": " + what + " (byte " + std::to_string(offset) + ")");
}

// ---- little-endian binary cursor --------------------------------------

struct Reader {
    const std::string& buf;
    std::size_t pos = 0;
    const std::filesystem::path& path;

    void need(std::size_t n, const char* what) const {
        if (pos + n > buf.size()) fail_at(path, pos, std::string("truncated ") + what);
    }
    template <typename T>
    T scalar(const char* what) {
        need(sizeof(T), what);
        T v;
        std::memcpy(&v, buf.data() + pos, sizeof(T));
        pos += sizeof(T);
        return v;
    }
    void raw(void* dst, std::size_t n, const char* what) {
        need(n, what);
        std::memcpy(dst, buf.data() + pos, n);
        pos += n;
    }
    void expect_magic(const char* magic, std::size_t len) {
        need(len, "magic");
        if (std::memcmp(buf.data() + pos, magic, len) != 0)
            fail_at(path, pos, std::string("bad magic, expected ") + magic);
        pos += len;
    }
};

struct Writer {
    std::string buf;
    template <typename T>
    void scalar(T v) {
        char tmp[sizeof(T)];
        std::memcpy(tmp, &v, sizeof(T));
        buf.append(tmp, sizeof(T));
    }
    void raw(const void* src, std::size_t n) { buf.append(static_cast<const char*>(src), n); }
};

// ---- PLY --------------------------------------------------------------

enum class PlyType { F32, F64, I8, U8, I16, U16, I32, U32 };

std::size_t ply_type_size(PlyType t) {
    switch (t) {
        case PlyType::F32: return 4;
        case PlyType::F64: return 8;
        case PlyType::I8:
        case PlyType::U8: return 1;
        case PlyType::I16:
        case PlyType::U16: return 2;
        case PlyType::I32:
        case PlyType::U32: return 4;
    }
    return 0;
}

PlyType ply_type_from(const std::string& s, const std::filesystem::path& path,
                      std::size_t offset) {
    if (s == "float" || s == "float32") return PlyType::F32;
    if (s == "double" || s == "float64") return PlyType::F64;
    if (s == "char" || s == "int8") return PlyType::I8;
    if (s == "uchar" || s == "uint8") return PlyType::U8;
    if (s == "short" || s == "int16") return PlyType::I16;
    if (s == "ushort" || s == "uint16") return PlyType::U16;
    if (s == "int" || s == "int32") return PlyType::I32;
    if (s == "uint" || s == "uint32") return PlyType::U32;
    fail_at(path, offset, "unknown PLY property type '" + s + "'");
}

double decode_scalar(PlyType t, const char* p) {
    switch (t) {
        case PlyType::F32: {
            float v;
            std::memcpy(&v, p, 4);
            return v;
        }
        case PlyType::F64: {
            double v;
            std::memcpy(&v, p, 8);
            return v;
        }
        case PlyType::I8: return static_cast<int8_t>(*p);
        case PlyType::U8: return static_cast<uint8_t>(*p);
        case PlyType::I16: {
            int16_t v;
            std::memcpy(&v, p, 2);
            return v;
        }
        case PlyType::U16: {
            uint16_t v;
            std::memcpy(&v, p, 2);
            return v;
        }
        case PlyType::I32: {
            int32_t v;
            std::memcpy(&v, p, 4);
            return v;
        }
        case PlyType::U32: {
            uint32_t v;
            std::memcpy(&v, p, 4);
            return v;
        }
    }
    return 0.0;
}

struct PlyProperty {
    std::string name;
    PlyType type = PlyType::F32;
    bool is_list = false;
    PlyType count_type = PlyType::U8;
};

struct PlyElementData {
    std::string name;
    std::size_t count = 0;
    std::vector<PlyProperty> props;
    // Scalar columns in property order (empty vector for list properties) and
    // per-row lists for list properties.
    std::vector<std::vector<double>> columns;
    std::vector<std::vector<std::vector<uint32_t>>> lists;

    const std::vector<double>* column(const std::string& prop) const {
        for (std::size_t i = 0; i < props.size(); ++i)
            if (props[i].name == prop && !props[i].is_list) return &columns[i];
        return nullptr;
    }
    const std::vector<std::vector<uint32_t>>* list(const std::string& prop) const {
        for (std::size_t i = 0; i < props.size(); ++i)
            if (props[i].name == prop && props[i].is_list) return &lists[i];
        return nullptr;
    }
};

struct PlyFile {
    bool binary = false;
    std::vector<PlyElementData> elements;

    const PlyElementData* element(const std::string& name) const {
        for (const auto& e : elements)
            if (e.name == name) return &e;
        return nullptr;
    }
};

// Whitespace-token cursor for ASCII payloads; keeps byte offsets for errors.
struct AsciiCursor {
    const std::string& buf;
    std::size_t pos;
    const std::filesystem::path& path;

    double next(const char* what) {
        while (pos < buf.size() && std::isspace(static_cast<unsigned char>(buf[pos]))) ++pos;
        if (pos >= buf.size()) fail_at(path, pos, std::string("truncated ") + what);
        std::size_t start = pos;
        while (pos < buf.size() && !std::isspace(static_cast<unsigned char>(buf[pos]))) ++pos;
        const std::string tok = buf.substr(start, pos - start);
        try {
            std::size_t used = 0;
            double v = std::stod(tok, &used);
            if (used != tok.size()) throw std::invalid_argument(tok);
            return v;
        } catch (const std::exception&) {
            fail_at(path, start, "invalid numeric token '" + tok + "'");
        }
    }
};

PlyFile parse_ply(const std::filesystem::path& path) {
    const std::string buf = read_file(path);
    PlyFile ply;

    std::size_t pos = 0;
    auto next_line = [&]() -> std::pair<std::string, std::size_t> {
        if (pos >= buf.size()) fail_at(path, pos, "truncated header");
        std::size_t start = pos;
        std::size_t end = buf.find('\n', pos);
        if (end == std::string::npos) fail_at(path, start, "unterminated header line");
        pos = end + 1;
        std::string line = buf.substr(start, end - start);
        if (!line.empty() && line.back() == '\r') line.pop_back();
        return {line, start};
    };

    auto [first, first_off] = next_line();
    if (first != "ply") fail_at(path, first_off, "not a PLY file (missing 'ply')");

    bool have_format = false;
    for (;;) {
        auto [line, off] = next_line();
        std::istringstream ss(line);
        std::string kw;
        ss >> kw;
        if (kw == "comment" || kw == "obj_info" || kw.empty()) continue;
        if (kw == "format") {
            std::string fmt, ver;
            ss >> fmt >> ver;
            if (fmt == "ascii")
                ply.binary = false;
            else if (fmt == "binary_little_endian")
                ply.binary = true;
            else if (fmt == "binary_big_endian")
                fail_at(path, off, "big-endian PLY is not supported");
            else
                fail_at(path, off, "unknown PLY format '" + fmt + "'");
            have_format = true;
        } else if (kw == "element") {
            PlyElementData e;
            long long count = -1;
            ss >> e.name >> count;
            if (e.name.empty() || count < 0) fail_at(path, off, "malformed element line");
            e.count = static_cast<std::size_t>(count);
            ply.elements.push_back(std::move(e));
        } else if (kw == "property") {
            if (ply.elements.empty()) fail_at(path, off, "property before any element");
            std::string t1;
            ss >> t1;
            PlyProperty p;
            if (t1 == "list") {
                std::string ct, it;
                ss >> ct >> it >> p.name;
                p.is_list = true;
                p.count_type = ply_type_from(ct, path, off);
                p.type = ply_type_from(it, path, off);
            } else {
                p.type = ply_type_from(t1, path, off);
                ss >> p.name;
            }
            if (p.name.empty()) fail_at(path, off, "malformed property line");
            ply.elements.back().props.push_back(std::move(p));
        } else if (kw == "end_header") {
            break;
        } else {
            fail_at(path, off, "unknown header keyword '" + kw + "'");
        }
    }
    if (!have_format) fail_at(path, 0, "missing format line");

    // Sanity-check counts against the payload size before reserving.
    std::size_t payload = buf.size() - pos;
    uint64_t min_bytes = 0;
    for (const auto& e : ply.elements) {
        uint64_t row = 0;
        for (const auto& p : e.props)
            row += ply.binary ? ply_type_size(p.is_list ? p.count_type : p.type) : 2;
        min_bytes += row * e.count;
    }
    if (min_bytes > payload) fail_at(path, pos, "element counts exceed file size");

    for (auto& e : ply.elements) {
        e.columns.assign(e.props.size(), {});
        e.lists.assign(e.props.size(), {});
        for (std::size_t i = 0; i < e.props.size(); ++i) {
            if (e.props[i].is_list)
                e.lists[i].reserve(e.count);
            else
                e.columns[i].reserve(e.count);
        }
    }

    if (ply.binary) {
        Reader r{buf, pos, path};
        for (auto& e : ply.elements) {
            for (std::size_t row = 0; row < e.count; ++row)
                for (std::size_t i = 0; i < e.props.size(); ++i) {
                    const PlyProperty& p = e.props[i];
                    if (p.is_list) {
                        std::size_t cs = ply_type_size(p.count_type);
                        r.need(cs, "list count");
                        double cnt = decode_scalar(p.count_type, buf.data() + r.pos);
                        r.pos += cs;
                        if (cnt < 0 || cnt > 1e6) fail_at(path, r.pos, "bad list count");
                        std::vector<uint32_t> items(static_cast<std::size_t>(cnt));
                        std::size_t is = ply_type_size(p.type);
                        for (auto& item : items) {
                            r.need(is, "list item");
                            double v = decode_scalar(p.type, buf.data() + r.pos);
                            r.pos += is;
                            if (v < 0) fail_at(path, r.pos, "negative list index");
                            item = static_cast<uint32_t>(v);
                        }
                        e.lists[i].push_back(std::move(items));
                    } else {
                        std::size_t s = ply_type_size(p.type);
                        r.need(s, "property value");
                        e.columns[i].push_back(decode_scalar(p.type, buf.data() + r.pos));
                        r.pos += s;
                    }
                }
        }
    } else {
        AsciiCursor c{buf, pos, path};
        for (auto& e : ply.elements) {
            for (std::size_t row = 0; row < e.count; ++row)
                for (std::size_t i = 0; i < e.props.size(); ++i) {
                    const PlyProperty& p = e.props[i];
                    if (p.is_list) {
                        double cnt = c.next("list count");
                        if (cnt < 0 || cnt > 1e6) fail_at(path, c.pos, "bad list count");
                        std::vector<uint32_t> items(static_cast<std::size_t>(cnt));
                        for (auto& item : items) {
                            double v = c.next("list item");
                            if (v < 0) fail_at(path, c.pos, "negative list index");
                            item = static_cast<uint32_t>(v);
                        }
                        e.lists[i].push_back(std::move(items));
                    } else {
                        e.columns[i].push_back(c.next("property value"));
                    }
                }
        }
    }
    return ply;
}

const std::vector<double>& require_column(const PlyElementData& e, const std::string& name,
                                          const std::filesystem::path& path) {
    const auto* col = e.column(name);
    if (!col) throw ParseError(path.string() + ": missing vertex property '" + name + "'");
    return *col;
}

bool starts_with(const std::string& s, const char* prefix) {
    return s.rfind(prefix, 0) == 0;
}

double logit(double p) { return std::log(p / (1.0 - p)); }

}  // namespace

SceneGeometry read_ply(const std::filesystem::path& path) {
    PlyFile ply = parse_ply(path);
    const PlyElementData* vertex = ply.element("vertex");
    if (!vertex) throw ParseError(path.string() + ": no vertex element");
    const auto& xs = require_column(*vertex, "x", path);
    const auto& ys = require_column(*vertex, "y", path);
    const auto& zs = require_column(*vertex, "z", path);

    const bool gaussian = vertex->column("opacity") && vertex->column("scale_0") &&
                          vertex->column("scale_1") && vertex->column("scale_2") &&
                          vertex->column("rot_0") && vertex->column("rot_1") &&
                          vertex->column("rot_2") && vertex->column("rot_3");

    auto is_geometry = [&](const std::string& n) {
        if (n == "x" || n == "y" || n == "z") return true;
        if (!gaussian) return false;
        return n == "opacity" || starts_with(n, "scale_") || starts_with(n, "rot_");
    };

    std::vector<const std::vector<double>*> attr_cols;
    for (std::size_t i = 0; i < vertex->props.size(); ++i) {
        const auto& p = vertex->props[i];
        if (p.is_list || is_geometry(p.name) || starts_with(p.name, "f_rest_")) continue;
        attr_cols.push_back(&vertex->columns[i]);
    }
    auto gather_attrs = [&](std::size_t row) {
        std::vector<float> a;
        a.reserve(attr_cols.size());
        for (const auto* col : attr_cols) a.push_back(static_cast<float>((*col)[row]));
        return a;
    };

    if (!gaussian) {
        PointCloud cloud;
        cloud.positions.reserve(vertex->count);
        for (std::size_t i = 0; i < vertex->count; ++i) {
            cloud.positions.push_back({xs[i], ys[i], zs[i]});
            if (!attr_cols.empty()) cloud.attributes.push_back(gather_attrs(i));
        }
        return cloud;
    }

    const auto& op = *vertex->column("opacity");
    const auto& s0 = *vertex->column("scale_0");
    const auto& s1 = *vertex->column("scale_1");
    const auto& s2 = *vertex->column("scale_2");
    const auto& r0 = *vertex->column("rot_0");
    const auto& r1 = *vertex->column("rot_1");
    const auto& r2 = *vertex->column("rot_2");
    const auto& r3 = *vertex->column("rot_3");

    GaussianSet set;
    set.gaussians.reserve(vertex->count);
    for (std::size_t i = 0; i < vertex->count; ++i) {
        Gaussian g;
        g.mean = {xs[i], ys[i], zs[i]};
        g.opacity = 1.0 / (1.0 + std::exp(-op[i]));
        g.scale = {std::exp(s0[i]), std::exp(s1[i]), std::exp(s2[i])};
        Quat q{r0[i], r1[i], r2[i], r3[i]};
        if (q.norm() == 0.0)
            throw ParseError(path.string() + ": zero quaternion at vertex " + std::to_string(i));
        g.rotation = q.normalized();
        set.gaussians.push_back(g);
        if (!attr_cols.empty()) set.attributes.push_back(gather_attrs(i));
    }
    return set;
}

namespace {

void write_ply_impl(const std::filesystem::path& path, std::size_t count,
                    const std::vector<std::string>& prop_names,
                    const std::function<void(std::size_t, std::vector<float>&)>& fill,
                    bool binary) {
    std::ostringstream header;
    header << "ply\nformat " << (binary ? "binary_little_endian" : "ascii") << " 1.0\n";
    header << "element vertex " << count << "\n";
    for (const auto& n : prop_names) header << "property float " << n << "\n";
    header << "end_header\n";

    std::string out = header.str();
    std::vector<float> row;
    for (std::size_t i = 0; i < count; ++i) {
        row.clear();
        fill(i, row);
        if (binary) {
            out.append(reinterpret_cast<const char*>(row.data()), row.size() * sizeof(float));
        } else {
            std::ostringstream line;
            line.precision(9);
            for (std::size_t j = 0; j < row.size(); ++j)
                line << (j ? " " : "") << row[j];
            line << "\n";
            out += line.str();
        }
    }
    write_file(path, out);
}

}  // namespace

void write_ply(const std::filesystem::path& path, const PointCloud& cloud, bool binary) {
    std::vector<std::string> props = {"x", "y", "z"};
    std::size_t n_attr = cloud.attributes.empty() ? 0 : cloud.attributes[0].size();
    for (std::size_t a = 0; a < n_attr; ++a) props.push_back("attr_" + std::to_string(a));
    write_ply_impl(
        path, cloud.size(), props,
        [&](std::size_t i, std::vector<float>& row) {
            const Vec3& p = cloud.positions[i];
            row = {static_cast<float>(p.x), static_cast<float>(p.y), static_cast<float>(p.z)};
            if (n_attr) row.insert(row.end(), cloud.attributes[i].begin(), cloud.attributes[i].end());
        },
        binary);
}

void write_ply(const std::filesystem::path& path, const GaussianSet& set, bool binary) {
    std::vector<std::string> props = {"x",       "y",       "z",       "opacity", "scale_0",
                                      "scale_1", "scale_2", "rot_0",   "rot_1",   "rot_2",
                                      "rot_3"};
    write_ply_impl(
        path, set.size(), props,
        [&](std::size_t i, std::vector<float>& row) {
            const Gaussian& g = set.gaussians[i];
            double p = std::clamp(g.opacity, 1e-7, 1.0 - 1e-7);
            row = {static_cast<float>(g.mean.x),        static_cast<float>(g.mean.y),
                   static_cast<float>(g.mean.z),        static_cast<float>(logit(p)),
                   static_cast<float>(std::log(g.scale.x)), static_cast<float>(std::log(g.scale.y)),
                   static_cast<float>(std::log(g.scale.z)), static_cast<float>(g.rotation.w),
                   static_cast<float>(g.rotation.x),    static_cast<float>(g.rotation.y),
                   static_cast<float>(g.rotation.z)};
        },
        binary);
}

void write_mesh_ply(const std::filesystem::path& path, const TriangleMesh& mesh) {
    mesh.validate();
    std::ostringstream out;
    out.precision(9);
    const bool normals = !mesh.normals.empty();
    out << "ply\nformat ascii 1.0\n";
    out << "element vertex " << mesh.vertices.size() << "\n";
    out << "property float x\nproperty float y\nproperty float z\n";
    if (normals) out << "property float nx\nproperty float ny\nproperty float nz\n";
    out << "element face " << mesh.triangles.size() << "\n";
    out << "property list uchar int vertex_indices\nend_header\n";
    for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
        const Vec3& v = mesh.vertices[i];
        out << v.x << " " << v.y << " " << v.z;
        if (normals) {
            const Vec3& n = mesh.normals[i];
            out << " " << n.x << " " << n.y << " " << n.z;
        }
        out << "\n";
    }
    for (const auto& t : mesh.triangles) out << "3 " << t[0] << " " << t[1] << " " << t[2] << "\n";
    write_file(path, out.str());
}

void write_mesh_obj(const std::filesystem::path& path, const TriangleMesh& mesh) {
    mesh.validate();
    std::ostringstream out;
    out.precision(9);
    for (const Vec3& v : mesh.vertices) out << "v " << v.x << " " << v.y << " " << v.z << "\n";
    for (const Vec3& n : mesh.normals) out << "vn " << n.x << " " << n.y << " " << n.z << "\n";
    for (const auto& t : mesh.triangles)
        out << "f " << t[0] + 1 << " " << t[1] + 1 << " " << t[2] + 1 << "\n";
    write_file(path, out.str());
}

TriangleMesh read_mesh_ply(const std::filesystem::path& path) {
    PlyFile ply = parse_ply(path);
    const PlyElementData* vertex = ply.element("vertex");
    if (!vertex) throw ParseError(path.string() + ": no vertex element");
    const auto& xs = require_column(*vertex, "x", path);
    const auto& ys = require_column(*vertex, "y", path);
    const auto& zs = require_column(*vertex, "z", path);

    TriangleMesh mesh;
    mesh.vertices.reserve(vertex->count);
    for (std::size_t i = 0; i < vertex->count; ++i) mesh.vertices.push_back({xs[i], ys[i], zs[i]});
    if (vertex->column("nx") && vertex->column("ny") && vertex->column("nz")) {
        const auto& nx = *vertex->column("nx");
        const auto& ny = *vertex->column("ny");
        const auto& nz = *vertex->column("nz");
        for (std::size_t i = 0; i < vertex->count; ++i)
            mesh.normals.push_back({nx[i], ny[i], nz[i]});
    }

    const PlyElementData* face = ply.element("face");
    if (face) {
        const auto* idx = face->list("vertex_indices");
        if (!idx) idx = face->list("vertex_index");
        if (!idx) throw ParseError(path.string() + ": face element without vertex indices");
        for (const auto& f : *idx) {
            if (f.size() < 3)
                throw ParseError(path.string() + ": face with fewer than 3 vertices");
            for (std::size_t j = 1; j + 1 < f.size(); ++j)
                mesh.triangles.push_back({static_cast<int>(f[0]), static_cast<int>(f[j]),
                                          static_cast<int>(f[j + 1])});
        }
    }
    mesh.validate();
    return mesh;
}

// ---- PFM / PGM ---------------------------------------------------------

namespace {

struct PfmHeader {
    int channels = 1;
    int width = 0, height = 0;
    std::size_t data_offset = 0;
};

PfmHeader parse_pfm_header(const std::string& buf, const std::filesystem::path& path) {
    PfmHeader h;
    std::size_t pos = 0;
    auto token = [&](const char* what) {
        while (pos < buf.size() && std::isspace(static_cast<unsigned char>(buf[pos]))) ++pos;
        std::size_t start = pos;
        while (pos < buf.size() && !std::isspace(static_cast<unsigned char>(buf[pos]))) ++pos;
        if (start == pos) fail_at(path, start, std::string("truncated PFM ") + what);
        return buf.substr(start, pos - start);
    };
    std::string magic = token("magic");
    if (magic == "Pf")
        h.channels = 1;
    else if (magic == "PF")
        h.channels = 3;
    else
        fail_at(path, 0, "bad PFM magic '" + magic + "'");
    try {
        h.width = std::stoi(token("width"));
        h.height = std::stoi(token("height"));
        double scale = std::stod(token("scale"));
        if (scale >= 0.0) fail_at(path, pos, "big-endian PFM (scale >= 0) is not supported");
    } catch (const ParseError&) {
        throw;
    } catch (const std::exception&) {
        fail_at(path, pos, "malformed PFM header");
    }
    if (h.width <= 0 || h.height <= 0) fail_at(path, pos, "non-positive PFM dimensions");
    if (pos >= buf.size()) fail_at(path, pos, "truncated PFM header");
    h.data_offset = pos + 1;  // single whitespace after the scale
    return h;
}

}  // namespace

DepthMap read_pfm(const std::filesystem::path& path) {
    const std::string buf = read_file(path);
    PfmHeader h = parse_pfm_header(buf, path);
    if (h.channels != 1) fail_at(path, 0, "expected grayscale PFM (Pf)");
    std::size_t n = static_cast<std::size_t>(h.width) * h.height;
    if (h.data_offset + n * 4 > buf.size()) fail_at(path, buf.size(), "truncated PFM payload");

    DepthMap map(h.width, h.height);
    // PFM stores rows bottom-up.
    for (int y = 0; y < h.height; ++y)
        for (int x = 0; x < h.width; ++x) {
            std::size_t src = static_cast<std::size_t>(h.height - 1 - y) * h.width + x;
            float v;
            std::memcpy(&v, buf.data() + h.data_offset + src * 4, 4);
            if (v > 0.0f && std::isfinite(v))
                map.set(x, y, v);
            else
                map.set_invalid(x, y);
        }
    return map;
}

void write_pfm(const std::filesystem::path& path, const DepthMap& map) {
    std::ostringstream header;
    header << "Pf\n" << map.width << " " << map.height << "\n-1.0\n";
    std::string out = header.str();
    for (int y = map.height - 1; y >= 0; --y)
        for (int x = 0; x < map.width; ++x) {
            float v = map.is_valid(x, y) ? map.at(x, y) : 0.0f;
            out.append(reinterpret_cast<const char*>(&v), 4);
        }
    write_file(path, out);
}

void write_pfm(const std::filesystem::path& path, const NormalMap& map) {
    std::ostringstream header;
    header << "PF\n" << map.width << " " << map.height << "\n-1.0\n";
    std::string out = header.str();
    for (int y = map.height - 1; y >= 0; --y)
        for (int x = 0; x < map.width; ++x) {
            std::size_t i = map.index(x, y);
            float rgb[3] = {0, 0, 0};
            if (map.valid[i])
                for (int c = 0; c < 3; ++c) rgb[c] = map.values[i * 3 + static_cast<std::size_t>(c)];
            out.append(reinterpret_cast<const char*>(rgb), 12);
        }
    write_file(path, out);
}

void write_pgm16(const std::filesystem::path& path, const DepthMap& map) {
    float max_v = 0.0f;
    for (int y = 0; y < map.height; ++y)
        for (int x = 0; x < map.width; ++x)
            if (map.is_valid(x, y)) max_v = std::max(max_v, map.at(x, y));
    std::ostringstream header;
    header << "P5\n" << map.width << " " << map.height << "\n65535\n";
    std::string out = header.str();
    for (int y = 0; y < map.height; ++y)
        for (int x = 0; x < map.width; ++x) {
            uint16_t v = 0;
            if (map.is_valid(x, y) && max_v > 0.0f)
                v = static_cast<uint16_t>(std::lround(map.at(x, y) / max_v * 65535.0));
            // PGM is big-endian.
            out.push_back(static_cast<char>(v >> 8));
            out.push_back(static_cast<char>(v & 0xff));
        }
    write_file(path, out);
}

// ---- cameras JSON -------------------------------------------------------

namespace {

json parse_json_file(const std::filesystem::path& path) {
    const std::string buf = read_file(path);
    json j = json::parse(buf, nullptr, false);
    if (j.is_discarded()) throw ParseError(path.string() + ": invalid JSON");
    return j;
}

Camera camera_from_json(const json& j, const std::filesystem::path& path) {
    try {
        Camera cam;
        cam.fx = j.at("fx").get<double>();
        cam.fy = j.at("fy").get<double>();
        cam.cx = j.at("cx").get<double>();
        cam.cy = j.at("cy").get<double>();
        cam.width = j.at("width").get<int>();
        cam.height = j.at("height").get<int>();
        const auto& m = j.at("world_from_camera");
        if (!m.is_array() || m.size() != 16)
            throw ParseError(path.string() + ": world_from_camera must have 16 entries");
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c)
                cam.rotation(r, c) = m[static_cast<std::size_t>(r * 4 + c)].get<double>();
        cam.translation = {m[3].get<double>(), m[7].get<double>(), m[11].get<double>()};
        if (cam.width <= 0 || cam.height <= 0 || cam.fx <= 0 || cam.fy <= 0)
            throw ParseError(path.string() + ": non-positive camera intrinsics");
        return cam;
    } catch (const json::exception& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

json camera_to_json(const Camera& cam) {
    std::array<double, 16> m{};
    for (int r = 0; r < 3; ++r) {
        for (int c = 0; c < 3; ++c) m[static_cast<std::size_t>(r * 4 + c)] = cam.rotation(r, c);
        m[static_cast<std::size_t>(r * 4 + 3)] = r == 0   ? cam.translation.x
                                                 : r == 1 ? cam.translation.y
                                                          : cam.translation.z;
    }
    m[15] = 1.0;
    return json{{"fx", cam.fx},         {"fy", cam.fy},
                {"cx", cam.cx},         {"cy", cam.cy},
                {"width", cam.width},   {"height", cam.height},
                {"world_from_camera", m}};
}

}  // namespace

Camera read_camera_json(const std::filesystem::path& path) {
    return camera_from_json(parse_json_file(path), path);
}

void write_camera_json(const std::filesystem::path& path, const Camera& camera) {
    write_file(path, camera_to_json(camera).dump(2) + "\n");
}

std::vector<Camera> read_camera_manifest(const std::filesystem::path& path) {
    json j = parse_json_file(path);
    if (!j.contains("views") || !j["views"].is_array())
        throw ParseError(path.string() + ": manifest must contain a 'views' array");
    std::vector<Camera> cams;
    for (const auto& entry : j["views"]) {
        if (!entry.is_string()) throw ParseError(path.string() + ": view entries must be paths");
        cams.push_back(read_camera_json(path.parent_path() / entry.get<std::string>()));
    }
    return cams;
}

void write_camera_manifest(const std::filesystem::path& dir, std::span<const Camera> cameras) {
    std::filesystem::create_directories(dir);
    json views = json::array();
    for (std::size_t i = 0; i < cameras.size(); ++i) {
        char name[32];
        std::snprintf(name, sizeof(name), "view_%03zu.json", i);
        write_camera_json(dir / name, cameras[i]);
        views.push_back(name);
    }
    write_file(dir / "cameras.json", json{{"views", views}}.dump(2) + "\n");
}

// ---- checkpoints ---------------------------------------------------------

namespace {

constexpr char kWeightMagic[] = "RLDF-W";
constexpr char kFeatureMagic[] = "RLDF-F";
constexpr char kVolumeMagic[] = "RLDF-V";
constexpr uint32_t kFormatVersion = 1;

NeighborInfo info_from_width(int width, const std::filesystem::path& path) {
    switch (width) {
        case 3: return NeighborInfo::XyzOnly;
        case 4: return NeighborInfo::RelativeOnly;
        case 7: return NeighborInfo::Both;
    }
    throw ParseError(path.string() + ": checkpoint dimensions are inconsistent (positional width " +
                     std::to_string(width) + ")");
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const FieldModel<float>& model) {
    Writer w;
    w.raw(kWeightMagic, 6);
    w.scalar<uint32_t>(kFormatVersion);
    w.scalar<uint32_t>(static_cast<uint32_t>(model.mlp_cfg.in_dim));
    w.scalar<uint32_t>(static_cast<uint32_t>(model.mlp_cfg.hidden));
    w.scalar<uint32_t>(static_cast<uint32_t>(model.mlp_cfg.hidden_layers));
    w.scalar<uint32_t>(static_cast<uint32_t>(model.layout.channels));
    w.scalar<uint32_t>(static_cast<uint32_t>(model.layout.k));
    w.scalar<uint8_t>(static_cast<uint8_t>(model.blend_mode));
    w.scalar<uint8_t>(static_cast<uint8_t>(model.feature_mode));
    w.raw(model.mlp.params().data(), model.mlp.params().size() * sizeof(float));
    w.raw(model.feature_table.data(), model.feature_table.size() * sizeof(float));
    write_file(path, w.buf);
}

FieldModel<float> load_checkpoint(const std::filesystem::path& path) {
    const std::string buf = read_file(path);
    Reader r{buf, 0, path};
    r.expect_magic(kWeightMagic, 6);
    uint32_t version = r.scalar<uint32_t>("version");
    if (version != kFormatVersion)
        fail_at(path, r.pos, "unsupported checkpoint version " + std::to_string(version));
    uint32_t in_dim = r.scalar<uint32_t>("in_dim");
    uint32_t hidden = r.scalar<uint32_t>("hidden");
    uint32_t layers = r.scalar<uint32_t>("layers");
    uint32_t channels = r.scalar<uint32_t>("channels");
    uint32_t k = r.scalar<uint32_t>("k");
    uint8_t blend = r.scalar<uint8_t>("blend mode");
    uint8_t fmode = r.scalar<uint8_t>("feature mode");
    if (blend > 3) fail_at(path, r.pos, "unknown blend mode " + std::to_string(blend));
    if (fmode > 2) fail_at(path, r.pos, "unknown feature mode " + std::to_string(fmode));
    if (k == 0 || in_dim <= 6 || hidden == 0)
        fail_at(path, r.pos, "degenerate checkpoint dimensions");
    if ((in_dim - 6) % k != 0) fail_at(path, r.pos, "checkpoint in_dim does not divide by k");
    int posw = static_cast<int>((in_dim - 6) / k) - static_cast<int>(channels);
    NeighborInfo info = info_from_width(posw, path);

    FeatureLayout layout;
    layout.k = static_cast<int>(k);
    layout.channels = static_cast<int>(channels);
    layout.info = info;
    if (layout.input_width() != static_cast<int>(in_dim))
        fail_at(path, r.pos, "checkpoint in_dim mismatch");

    MlpConfig mlp_cfg{static_cast<int>(in_dim), static_cast<int>(hidden),
                      static_cast<int>(layers), 2};
    std::size_t mlp_params = mlp_cfg.param_count();
    std::size_t remaining = buf.size() - r.pos;
    if (remaining < mlp_params * sizeof(float))
        fail_at(path, r.pos, "truncated checkpoint parameters");
    std::size_t table_bytes = remaining - mlp_params * sizeof(float);
    if (table_bytes % sizeof(float) != 0) fail_at(path, buf.size(), "trailing bytes in checkpoint");
    std::size_t table_size = table_bytes / sizeof(float);
    if (channels == 0 && table_size != 0)
        fail_at(path, buf.size(), "feature table present but channels == 0");
    if (channels > 0 && table_size % channels != 0)
        fail_at(path, buf.size(), "feature table size does not divide by channels");

    FieldModel<float> model = FieldModel<float>::make(
        layout, static_cast<BlendMode>(blend), static_cast<FeatureMode>(fmode),
        channels > 0 ? table_size / channels : 0, static_cast<int>(hidden),
        static_cast<int>(layers));
    r.raw(model.mlp.params().data(), mlp_params * sizeof(float), "mlp parameters");
    model.feature_table.resize(table_size);
    r.raw(model.feature_table.data(), table_bytes, "feature table");
    return model;
}

void save_features(const std::filesystem::path& path, std::size_t n, int channels,
                   std::span<const float> values) {
    if (channels <= 0) throw InvalidParameter("save_features: channels must be positive");
    if (values.size() != n * static_cast<std::size_t>(channels))
        throw ShapeError("save_features: value count mismatch");
    Writer w;
    w.raw(kFeatureMagic, 6);
    w.scalar<uint32_t>(kFormatVersion);
    w.scalar<uint64_t>(n);
    w.scalar<uint32_t>(static_cast<uint32_t>(channels));
    w.raw(values.data(), values.size() * sizeof(float));
    write_file(path, w.buf);
}

std::vector<float> load_features(const std::filesystem::path& path, std::size_t& n_out,
                                 int& channels_out) {
    const std::string buf = read_file(path);
    Reader r{buf, 0, path};
    r.expect_magic(kFeatureMagic, 6);
    uint32_t version = r.scalar<uint32_t>("version");
    if (version != kFormatVersion)
        fail_at(path, r.pos, "unsupported feature file version " + std::to_string(version));
    uint64_t n = r.scalar<uint64_t>("row count");
    uint32_t channels = r.scalar<uint32_t>("channels");
    if (channels == 0) fail_at(path, r.pos, "zero channels");
    std::size_t remaining = buf.size() - r.pos;
    if (n > remaining / (sizeof(float) * channels))
        fail_at(path, r.pos, "row count exceeds file size");
    std::vector<float> values(static_cast<std::size_t>(n) * channels);
    r.raw(values.data(), values.size() * sizeof(float), "feature rows");
    if (r.pos != buf.size()) fail_at(path, r.pos, "trailing bytes in feature file");
    n_out = static_cast<std::size_t>(n);
    channels_out = static_cast<int>(channels);
    return values;
}

void save_volume(const std::filesystem::path& path, const TsdfVolume& volume) {
    Writer w;
    w.raw(kVolumeMagic, 6);
    w.scalar<uint32_t>(kFormatVersion);
    w.scalar<double>(volume.origin().x);
    w.scalar<double>(volume.origin().y);
    w.scalar<double>(volume.origin().z);
    w.scalar<double>(volume.voxel_size());
    w.scalar<double>(volume.truncation());
    w.scalar<uint32_t>(static_cast<uint32_t>(volume.nx()));
    w.scalar<uint32_t>(static_cast<uint32_t>(volume.ny()));
    w.scalar<uint32_t>(static_cast<uint32_t>(volume.nz()));
    w.raw(volume.tsdf_data().data(), volume.tsdf_data().size() * sizeof(float));
    w.raw(volume.weight_data().data(), volume.weight_data().size() * sizeof(float));
    write_file(path, w.buf);
}

TsdfVolume load_volume(const std::filesystem::path& path) {
    const std::string buf = read_file(path);
    Reader r{buf, 0, path};
    r.expect_magic(kVolumeMagic, 6);
    uint32_t version = r.scalar<uint32_t>("version");
    if (version != kFormatVersion)
        fail_at(path, r.pos, "unsupported volume version " + std::to_string(version));
    Vec3 origin{r.scalar<double>("origin"), r.scalar<double>("origin"), r.scalar<double>("origin")};
    double voxel = r.scalar<double>("voxel size");
    double trunc = r.scalar<double>("truncation");
    uint32_t nx = r.scalar<uint32_t>("nx");
    uint32_t ny = r.scalar<uint32_t>("ny");
    uint32_t nz = r.scalar<uint32_t>("nz");
    if (!(voxel > 0.0) || nx == 0 || ny == 0 || nz == 0 || nx > 65535 || ny > 65535 || nz > 65535)
        fail_at(path, r.pos, "degenerate volume dimensions");
    uint64_t n = static_cast<uint64_t>(nx) * ny * nz;
    if (r.pos + n * 8 > buf.size()) fail_at(path, r.pos, "truncated volume payload");
    TsdfVolume vol(origin, voxel, static_cast<int>(nx), static_cast<int>(ny), static_cast<int>(nz),
                   trunc);
    r.raw(vol.tsdf_data().data(), static_cast<std::size_t>(n) * sizeof(float), "tsdf values");
    r.raw(vol.weight_data().data(), static_cast<std::size_t>(n) * sizeof(float), "weights");
    return vol;
}

void write_loss_csv(const std::filesystem::path& path,
                    std::span<const std::pair<int, double>> trace) {
    std::ostringstream out;
    out.precision(10);
    out << "step,loss\n";
    for (const auto& [step, loss] : trace) out << step << "," << loss << "\n";
    write_file(path, out.str());
}

// ---- run config ------------------------------------------------------------

namespace {

NeighborInfo neighbor_info_from_name(const std::string& name) {
    if (name == "xyz") return NeighborInfo::XyzOnly;
    if (name == "relative") return NeighborInfo::RelativeOnly;
    if (name == "both") return NeighborInfo::Both;
    throw InvalidParameter("unknown neighbor info mode '" + name + "'");
}

FeatureMode feature_mode_from_name(const std::string& name) {
    if (name == "none") return FeatureMode::None;
    if (name == "learnable-table") return FeatureMode::LearnableTable;
    if (name == "loaded") return FeatureMode::Loaded;
    throw InvalidParameter("unknown feature mode '" + name + "'");
}

}  // namespace

TrainConfig RunConfig::to_train_config() const {
    TrainConfig cfg;
    cfg.seed = seed;
    cfg.steps = steps;
    cfg.batch_rays = batch_rays;
    cfg.lr = lr;
    cfg.t_train = t_train;
    cfg.tile_px = tile_px;
    cfg.blend_mode = blend_mode_from_name(blend);
    cfg.layout.k = k;
    cfg.layout.channels = channels;
    cfg.layout.info = neighbor_info_from_name(neighbor_info);
    cfg.feature_mode = feature_mode_from_name(feature_mode);
    if (cfg.feature_mode == FeatureMode::None) cfg.layout.channels = 0;
    cfg.hidden = hidden;
    cfg.hidden_layers = hidden_layers;
    return cfg;
}

RunConfig read_run_config(const std::filesystem::path& path) {
    json j = parse_json_file(path);
    RunConfig cfg;
    try {
        auto get = [&](const char* key, auto& dst) {
            if (j.contains(key)) dst = j.at(key).get<std::decay_t<decltype(dst)>>();
        };
        get("seed", cfg.seed);
        get("threads", cfg.threads);
        get("steps", cfg.steps);
        get("batch_rays", cfg.batch_rays);
        get("lr", cfg.lr);
        get("t_train", cfg.t_train);
        get("t_test", cfg.t_test);
        get("k", cfg.k);
        get("channels", cfg.channels);
        get("tile_px", cfg.tile_px);
        get("hidden", cfg.hidden);
        get("hidden_layers", cfg.hidden_layers);
        get("blend", cfg.blend);
        get("neighbor_info", cfg.neighbor_info);
        get("feature_mode", cfg.feature_mode);
    } catch (const json::exception& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
    return cfg;
}

void write_run_config(const std::filesystem::path& path, const RunConfig& cfg) {
    json j{{"seed", cfg.seed},
           {"threads", cfg.threads},
           {"steps", cfg.steps},
           {"batch_rays", cfg.batch_rays},
           {"lr", cfg.lr},
           {"t_train", cfg.t_train},
           {"t_test", cfg.t_test},
           {"k", cfg.k},
           {"channels", cfg.channels},
           {"tile_px", cfg.tile_px},
           {"hidden", cfg.hidden},
           {"hidden_layers", cfg.hidden_layers},
           {"blend", cfg.blend},
           {"neighbor_info", cfg.neighbor_info},
           {"feature_mode", cfg.feature_mode}};
    write_file(path, j.dump(2) + "\n");
}

}  // namespace rdf
