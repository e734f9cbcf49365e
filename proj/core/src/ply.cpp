#include "geogs/ply.hpp"

#include "geogs/error.hpp"
#include "geogs/image_io.hpp"
#include "geogs/transforms.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <optional>
#include <sstream>

namespace geogs {

namespace {

static_assert(std::endian::native == std::endian::little, "PLY codec assumes a little-endian host");

enum class ScalarType { Int8, UInt8, Int16, UInt16, Int32, UInt32, Float32, Float64 };

std::optional<ScalarType> scalar_type(const std::string& name) {
    if (name == "char" || name == "int8") return ScalarType::Int8;
    if (name == "uchar" || name == "uint8") return ScalarType::UInt8;
    if (name == "short" || name == "int16") return ScalarType::Int16;
    if (name == "ushort" || name == "uint16") return ScalarType::UInt16;
    if (name == "int" || name == "int32") return ScalarType::Int32;
    if (name == "uint" || name == "uint32") return ScalarType::UInt32;
    if (name == "float" || name == "float32") return ScalarType::Float32;
    if (name == "double" || name == "float64") return ScalarType::Float64;
    return std::nullopt;
}

std::size_t type_size(ScalarType t) {
    switch (t) {
        case ScalarType::Int8:
        case ScalarType::UInt8: return 1;
        case ScalarType::Int16:
        case ScalarType::UInt16: return 2;
        case ScalarType::Int32:
        case ScalarType::UInt32:
        case ScalarType::Float32: return 4;
        case ScalarType::Float64: return 8;
    }
    return 0;
}

template <class T>
T load(const char* p) {
    T v;
    std::memcpy(&v, p, sizeof v);
    return v;
}

double read_scalar(ScalarType t, const char* p) {
    switch (t) {
        case ScalarType::Int8: return load<std::int8_t>(p);
        case ScalarType::UInt8: return load<std::uint8_t>(p);
        case ScalarType::Int16: return load<std::int16_t>(p);
        case ScalarType::UInt16: return load<std::uint16_t>(p);
        case ScalarType::Int32: return load<std::int32_t>(p);
        case ScalarType::UInt32: return load<std::uint32_t>(p);
        case ScalarType::Float32: return load<float>(p);
        case ScalarType::Float64: return load<double>(p);
    }
    return 0.0;
}

struct Property {
    std::string name;
    ScalarType type;
    std::size_t offset;  // within a vertex record
};

struct Header {
    std::size_t vertex_count = 0;
    std::vector<Property> properties;
    std::size_t record_size = 0;
    std::size_t body_offset = 0;
    std::vector<std::string> comments;

    const Property* find(const std::string& name) const {
        for (const Property& p : properties) {
            if (p.name == name) {
                return &p;
            }
        }
        return nullptr;
    }
};

Header parse_header(const std::string& bytes) {
    Header h;
    std::size_t pos = 0;
    bool saw_vertex = false;
    bool saw_format = false;
    int line_no = 0;
    while (true) {
        const std::size_t eol = bytes.find('\n', pos);
        if (eol == std::string::npos) {
            throw ParseError("PLY header is not terminated by end_header", pos);
        }
        std::string line = bytes.substr(pos, eol - pos);
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        const std::size_t line_start = pos;
        pos = eol + 1;
        std::istringstream in(line);
        std::string word;
        in >> word;
        if (line_no++ == 0) {
            if (line != "ply") {
                throw ParseError("not a PLY file (missing 'ply' magic)", line_start);
            }
            continue;
        }
        if (word == "end_header") {
            break;
        }
        if (word == "format") {
            std::string fmt, version;
            in >> fmt >> version;
            if (fmt != "binary_little_endian") {
                throw ParseError("unsupported PLY format '" + fmt + "'; only binary_little_endian 1.0 is accepted",
                                 line_start);
            }
            saw_format = true;
        } else if (word == "comment" || word == "obj_info") {
            std::string rest;
            std::getline(in >> std::ws, rest);
            h.comments.push_back(rest);
        } else if (word == "element") {
            std::string name;
            std::size_t count = 0;
            in >> name >> count;
            if (name != "vertex" || saw_vertex || !in) {
                throw ParseError("unsupported PLY element '" + name + "'; expected a single vertex element",
                                 line_start);
            }
            saw_vertex = true;
            h.vertex_count = count;
        } else if (word == "property") {
            std::string type, name;
            in >> type;
            if (type == "list") {
                throw ParseError("list properties are not supported", line_start);
            }
            in >> name;
            const auto t = scalar_type(type);
            if (!saw_vertex || !t || name.empty()) {
                throw ParseError("malformed property line '" + line + "'", line_start);
            }
            h.properties.push_back({name, *t, h.record_size});
            h.record_size += type_size(*t);
        } else {
            throw ParseError("unexpected PLY header line '" + line + "'", line_start);
        }
    }
    if (!saw_format) {
        throw ParseError("PLY header lacks a format line; expected binary_little_endian 1.0", 0);
    }
    if (!saw_vertex) {
        throw ParseError("PLY header declares no vertex element", 0);
    }
    h.body_offset = pos;
    const std::size_t need = h.body_offset + h.vertex_count * h.record_size;
    if (bytes.size() < need) {
        throw ParseError("PLY body truncated: expected " + std::to_string(h.vertex_count) + " vertices",
                         bytes.size());
    }
    return h;
}

void put_float(std::string& out, double v) {
    const auto f = static_cast<float>(v);
    char buf[4];
    std::memcpy(buf, &f, 4);
    out.append(buf, 4);
}

int sh_rows_from_rest(std::size_t n_rest, std::size_t offset) {
    if (n_rest % 3 != 0) {
        throw ParseError("f_rest property count is not a multiple of 3", offset);
    }
    const std::size_t rows = n_rest / 3 + 1;
    for (int d = 0; d <= kMaxShDegree; ++d) {
        if (static_cast<std::size_t>(sh_coeff_count(d)) == rows) {
            return static_cast<int>(rows);
        }
    }
    throw ParseError("f_rest property count does not match an SH degree up to 3", offset);
}

}  // namespace

std::string encode_ply(const GaussianMap& map) {
    if (map.empty()) {
        throw InputError("write_ply: map is empty");
    }
    const int rows = sh_coeff_count(map.sh_degree);
    for (const GaussianSplat& s : map.splats) {
        if (s.sh.rows() != rows) {
            throw InputError("write_ply: splat SH size does not match the map degree");
        }
    }
    std::ostringstream header;
    header << "ply\nformat binary_little_endian 1.0\nelement vertex " << map.size() << '\n';
    for (const char* p : {"x", "y", "z", "nx", "ny", "nz", "f_dc_0", "f_dc_1", "f_dc_2"}) {
        header << "property float " << p << '\n';
    }
    for (int i = 0; i < 3 * (rows - 1); ++i) {
        header << "property float f_rest_" << i << '\n';
    }
    for (const char* p : {"opacity", "scale_0", "scale_1", "scale_2", "rot_0", "rot_1", "rot_2", "rot_3"}) {
        header << "property float " << p << '\n';
    }
    header << "comment geo_kind_bitmap\nproperty uchar kind\nend_header\n";

    std::string out = header.str();
    out.reserve(out.size() + map.size() * (4 * (17 + 3 * (rows - 1)) + 1));
    const double thin_log = std::log(kThinThickness);
    for (const GaussianSplat& s : map.splats) {
        for (int k = 0; k < 3; ++k) put_float(out, s.position[k]);
        // Normal of the stored (float32) rotation, so a reloaded map writes the same bytes.
        Vec3 n = Vec3::Zero();
        if (s.is_thin()) {
            GaussianSplat stored = s;
            for (int k = 0; k < 4; ++k) stored.rotation[k] = static_cast<float>(s.rotation[k]);
            n = normal_of(stored);
        }
        for (int k = 0; k < 3; ++k) put_float(out, n[k]);
        for (int c = 0; c < 3; ++c) put_float(out, s.sh(0, c));
        for (int c = 0; c < 3; ++c) {
            for (int r = 1; r < rows; ++r) put_float(out, s.sh(r, c));
        }
        put_float(out, s.opacity_logit);
        put_float(out, s.log_scales.x());
        put_float(out, s.log_scales.y());
        put_float(out, s.is_thin() ? thin_log : s.log_scales.z());
        for (int k = 0; k < 4; ++k) put_float(out, s.rotation[k]);
        out.push_back(static_cast<char>(s.kind));
    }
    return out;
}

GaussianMap decode_ply(const std::string& bytes) {
    const Header h = parse_header(bytes);
    const std::vector<std::string> required = {"x",       "y",       "z",       "f_dc_0", "f_dc_1", "f_dc_2", "opacity",
                                               "scale_0", "scale_1", "scale_2", "rot_0",  "rot_1",  "rot_2",  "rot_3"};
    std::vector<const Property*> req;
    for (const std::string& name : required) {
        const Property* p = h.find(name);
        if (!p) {
            throw ParseError("PLY lacks required property '" + name + "'", h.body_offset);
        }
        req.push_back(p);
    }
    std::size_t n_rest = 0;
    for (const Property& p : h.properties) {
        const bool known = p.name == "nx" || p.name == "ny" || p.name == "nz" || p.name == "kind" ||
                           p.name.rfind("f_rest_", 0) == 0 ||
                           std::find(required.begin(), required.end(), p.name) != required.end();
        if (!known) {
            throw ParseError("unknown PLY property '" + p.name + "'", h.body_offset);
        }
        n_rest += p.name.rfind("f_rest_", 0) == 0 ? 1 : 0;
    }
    const int rows = sh_rows_from_rest(n_rest, h.body_offset);
    std::vector<const Property*> rest(n_rest, nullptr);
    for (std::size_t i = 0; i < n_rest; ++i) {
        rest[i] = h.find("f_rest_" + std::to_string(i));
        if (!rest[i]) {
            throw ParseError("f_rest properties are not numbered 0.." + std::to_string(n_rest - 1), h.body_offset);
        }
    }
    const Property* kind = h.find("kind");

    GaussianMap map;
    map.sh_degree = sh_degree_of(ShCoeffs::Zero(rows, 3));
    map.splats.reserve(h.vertex_count);
    const double thin_log = std::log(kThinThickness);
    for (std::size_t v = 0; v < h.vertex_count; ++v) {
        const std::size_t base = h.body_offset + v * h.record_size;
        const char* rec = bytes.data() + base;
        auto get = [&](const Property* p) { return read_scalar(p->type, rec + p->offset); };
        GaussianSplat s;
        s.position = Vec3(get(req[0]), get(req[1]), get(req[2]));
        s.sh = ShCoeffs::Zero(rows, 3);
        for (int c = 0; c < 3; ++c) {
            s.sh(0, c) = get(req[3 + c]);
            for (int r = 1; r < rows; ++r) {
                s.sh(r, c) = get(rest[static_cast<std::size_t>(c * (rows - 1) + r - 1)]);
            }
        }
        s.opacity_logit = get(req[6]);
        s.log_scales = Vec3(get(req[7]), get(req[8]), get(req[9]));
        s.rotation = Quat(get(req[10]), get(req[11]), get(req[12]), get(req[13]));
        if (kind) {
            const double k = get(kind);
            if (k != 0.0 && k != 1.0) {
                throw ParseError("invalid kind value in vertex " + std::to_string(v), base + kind->offset);
            }
            s.kind = k == 1.0 ? SplatKind::Thin : SplatKind::Free;
        }
        if (!s.position.allFinite() || !s.log_scales.allFinite() || !s.rotation.allFinite() ||
            !std::isfinite(s.opacity_logit) || !s.sh.allFinite()) {
            throw ParseError("non-finite value in vertex " + std::to_string(v), base);
        }
        if (s.rotation.squaredNorm() == 0.0) {
            throw ParseError("zero rotation quaternion in vertex " + std::to_string(v), base);
        }
        if (s.is_thin()) {
            s.log_scales.z() = thin_log;
        }
        map.push_back(std::move(s));
    }
    return map;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open '" + path.string() + "' for reading");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot open '" + path.string() + "' for writing");
    }
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) {
        throw IoError("failed writing '" + path.string() + "'");
    }
}

void write_ply(const GaussianMap& map, const std::filesystem::path& path) { write_file(path, encode_ply(map)); }

GaussianMap read_ply(const std::filesystem::path& path) { return decode_ply(read_file(path)); }

void write_point_cloud(const PointCloud& cloud, const std::filesystem::path& path) {
    if (cloud.colors.size() != cloud.positions.size()) {
        throw InputError("write_point_cloud: colors do not match positions");
    }
    std::ostringstream header;
    header << "ply\nformat binary_little_endian 1.0\nelement vertex " << cloud.size() << '\n'
           << "property float x\nproperty float y\nproperty float z\n"
           << "property uchar red\nproperty uchar green\nproperty uchar blue\nend_header\n";
    std::string out = header.str();
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        for (int k = 0; k < 3; ++k) put_float(out, cloud.positions[i][k]);
        for (int k = 0; k < 3; ++k) out.push_back(static_cast<char>(encode_srgb8(cloud.colors[i][k])));
    }
    write_file(path, out);
}

PointCloud read_point_cloud(const std::filesystem::path& path) {
    const std::string bytes = read_file(path);
    const Header h = parse_header(bytes);
    const Property* xyz[3] = {h.find("x"), h.find("y"), h.find("z")};
    const Property* rgb[3] = {h.find("red"), h.find("green"), h.find("blue")};
    for (const Property* p : xyz) {
        if (!p) {
            throw ParseError("point cloud lacks x/y/z properties", h.body_offset);
        }
    }
    const bool has_color = rgb[0] && rgb[1] && rgb[2];
    PointCloud cloud;
    for (std::size_t v = 0; v < h.vertex_count; ++v) {
        const char* rec = bytes.data() + h.body_offset + v * h.record_size;
        Vec3 p;
        Vec3 c = Vec3::Constant(0.5);
        for (int k = 0; k < 3; ++k) {
            p[k] = read_scalar(xyz[k]->type, rec + xyz[k]->offset);
            if (has_color) {
                const double raw = read_scalar(rgb[k]->type, rec + rgb[k]->offset);
                c[k] = rgb[k]->type == ScalarType::UInt8 ? decode_srgb8(static_cast<std::uint8_t>(raw)) : raw;
            }
        }
        if (!p.allFinite()) {
            throw ParseError("non-finite point " + std::to_string(v), h.body_offset + v * h.record_size);
        }
        cloud.positions.push_back(p);
        cloud.colors.push_back(c);
    }
    return cloud;
}

}  // namespace geogs
