#pragma once

#include <array>
#include <bit>
#include <cctype>
#include <cstdint>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "lari/error.hpp"
#include "lari/mesh.hpp"
#include "lari/vec.hpp"

namespace lari {

enum class MeshFormat { Auto, Obj, Ply };

namespace detail {

inline std::string read_file_bytes(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) throw Error(ErrorCode::IoError, "read failed on " + path);
    return bytes;
}

[[noreturn]] inline void parse_fail(const std::string& path, std::size_t line,
                                    const std::string& what) {
    throw Error(ErrorCode::ParseError, path + ":" + std::to_string(line) + ": " + what);
}

[[noreturn]] inline void parse_fail_at_byte(const std::string& path, std::size_t offset,
                                            const std::string& what) {
    throw Error(ErrorCode::ParseError,
                path + ": byte " + std::to_string(offset) + ": " + what);
}

// ---- OBJ ----

inline double parse_obj_double(const char*& cursor, const std::string& path, std::size_t line) {
    char* end = nullptr;
    const double value = std::strtod(cursor, &end);
    if (end == cursor) parse_fail(path, line, "expected a number");
    cursor = end;
    return value;
}

/// One face corner: the vertex index before any '/'; 1-based, negative
/// values count back from the current vertex total.
inline uint32_t parse_obj_index(const char*& cursor, std::size_t vertex_count,
                                const std::string& path, std::size_t line) {
    char* end = nullptr;
    const long value = std::strtol(cursor, &end, 10);
    if (end == cursor) parse_fail(path, line, "expected a face index");
    cursor = end;
    while (*cursor && !std::isspace(static_cast<unsigned char>(*cursor))) ++cursor;  // skip /vt/vn
    long resolved = value;
    if (value < 0) resolved = long(vertex_count) + value;  // relative reference
    else if (value > 0) resolved = value - 1;
    else parse_fail(path, line, "face index 0 is not allowed");
    if (resolved < 0 || std::size_t(resolved) >= vertex_count)
        parse_fail(path, line, "face index out of range");
    return uint32_t(resolved);
}

inline TriangleMesh load_obj(const std::string& bytes, const std::string& path) {
    std::vector<Vec3> vertices;
    std::vector<std::array<uint32_t, 3>> triangles;

    std::size_t line_number = 0;
    std::size_t pos = 0;
    std::vector<uint32_t> corners;
    while (pos < bytes.size()) {
        ++line_number;
        std::size_t end = bytes.find('\n', pos);
        if (end == std::string::npos) end = bytes.size();
        std::string line = bytes.substr(pos, end - pos);
        pos = end + 1;
        if (!line.empty() && line.back() == '\r') line.pop_back();

        const char* cursor = line.c_str();
        while (*cursor == ' ' || *cursor == '\t') ++cursor;
        if (cursor[0] == 'v' && (cursor[1] == ' ' || cursor[1] == '\t')) {
            cursor += 2;
            Vec3 v;
            v.x = parse_obj_double(cursor, path, line_number);
            v.y = parse_obj_double(cursor, path, line_number);
            v.z = parse_obj_double(cursor, path, line_number);
            vertices.push_back(v);
        } else if (cursor[0] == 'f' && (cursor[1] == ' ' || cursor[1] == '\t')) {
            cursor += 2;
            corners.clear();
            while (true) {
                while (*cursor == ' ' || *cursor == '\t') ++cursor;
                if (*cursor == '\0' || *cursor == '#') break;
                corners.push_back(parse_obj_index(cursor, vertices.size(), path, line_number));
            }
            if (corners.size() < 3) parse_fail(path, line_number, "face needs >= 3 vertices");
            for (std::size_t i = 1; i + 1 < corners.size(); ++i)
                triangles.push_back({corners[0], corners[i], corners[i + 1]});
        }
        // Every other directive (vn, vt, o, g, s, usemtl, mtllib, #) is skipped.
    }
    return make_mesh(std::move(vertices), std::move(triangles));
}

// ---- PLY ----

enum class PlyType { I8, U8, I16, U16, I32, U32, F32, F64 };

inline std::size_t ply_type_size(PlyType t) {
    switch (t) {
        case PlyType::I8:
        case PlyType::U8: return 1;
        case PlyType::I16:
        case PlyType::U16: return 2;
        case PlyType::I32:
        case PlyType::U32:
        case PlyType::F32: return 4;
        case PlyType::F64: return 8;
    }
    return 0;
}

inline std::optional<PlyType> ply_type_from_name(const std::string& name) {
    if (name == "char" || name == "int8") return PlyType::I8;
    if (name == "uchar" || name == "uint8") return PlyType::U8;
    if (name == "short" || name == "int16") return PlyType::I16;
    if (name == "ushort" || name == "uint16") return PlyType::U16;
    if (name == "int" || name == "int32") return PlyType::I32;
    if (name == "uint" || name == "uint32") return PlyType::U32;
    if (name == "float" || name == "float32") return PlyType::F32;
    if (name == "double" || name == "float64") return PlyType::F64;
    return std::nullopt;
}

struct PlyProperty {
    std::string name;
    bool is_list = false;
    PlyType count_type = PlyType::U8;  // lists only
    PlyType value_type = PlyType::F32;
};

struct PlyElement {
    std::string name;
    std::size_t count = 0;
    std::vector<PlyProperty> properties;
};

inline std::vector<std::string> split_ws(const std::string& line) {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        std::size_t j = i;
        while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
        if (j > i) out.push_back(line.substr(i, j - i));
        i = j;
    }
    return out;
}

/// Sequential value reader over the PLY body, ascii or binary little-endian.
struct PlyReader {
    const std::string& bytes;
    const std::string& path;
    bool ascii;
    std::size_t pos;          // byte cursor (binary) or scan position (ascii)
    std::size_t line_number;  // ascii diagnostics

    double read(PlyType type) {
        return ascii ? read_ascii(type) : read_binary(type);
    }

    double read_ascii(PlyType type) {
        while (pos < bytes.size() && std::isspace(static_cast<unsigned char>(bytes[pos]))) {
            if (bytes[pos] == '\n') ++line_number;
            ++pos;
        }
        if (pos >= bytes.size()) parse_fail(path, line_number, "unexpected end of data");
        const char* start = bytes.c_str() + pos;
        char* end = nullptr;
        double value;
        if (type == PlyType::F32 || type == PlyType::F64) {
            value = std::strtod(start, &end);
        } else {
            value = double(std::strtoll(start, &end, 10));
        }
        if (end == start) parse_fail(path, line_number, "expected a number");
        pos += std::size_t(end - start);
        return value;
    }

    double read_binary(PlyType type) {
        const std::size_t size = ply_type_size(type);
        if (pos + size > bytes.size())
            parse_fail_at_byte(path, pos, "unexpected end of binary data");
        uint64_t raw = 0;
        for (std::size_t i = 0; i < size; ++i)
            raw |= uint64_t(static_cast<unsigned char>(bytes[pos + i])) << (8 * i);
        pos += size;
        switch (type) {
            case PlyType::I8: return double(int8_t(raw));
            case PlyType::U8: return double(uint8_t(raw));
            case PlyType::I16: return double(int16_t(raw));
            case PlyType::U16: return double(uint16_t(raw));
            case PlyType::I32: return double(int32_t(raw));
            case PlyType::U32: return double(uint32_t(raw));
            case PlyType::F32: return double(std::bit_cast<float>(uint32_t(raw)));
            case PlyType::F64: return std::bit_cast<double>(raw);
        }
        return 0.0;
    }
};

inline TriangleMesh load_ply(const std::string& bytes, const std::string& path) {
    // Header: line-oriented ascii up to and including "end_header".
    std::size_t pos = 0;
    std::size_t line_number = 0;
    auto next_line = [&]() -> std::string {
        if (pos >= bytes.size()) parse_fail(path, line_number, "unexpected end of header");
        ++line_number;
        std::size_t end = bytes.find('\n', pos);
        if (end == std::string::npos) end = bytes.size();
        std::string line = bytes.substr(pos, end - pos);
        pos = std::min(end + 1, bytes.size());
        if (!line.empty() && line.back() == '\r') line.pop_back();
        return line;
    };

    if (next_line() != "ply") parse_fail(path, 1, "missing ply magic");
    bool ascii = false;
    bool format_seen = false;
    std::vector<PlyElement> elements;

    while (true) {
        const std::string line = next_line();
        const std::vector<std::string> tokens = split_ws(line);
        if (tokens.empty() || tokens[0] == "comment" || tokens[0] == "obj_info") continue;
        if (tokens[0] == "end_header") break;
        if (tokens[0] == "format") {
            if (tokens.size() < 3) parse_fail(path, line_number, "malformed format line");
            if (tokens[1] == "ascii") ascii = true;
            else if (tokens[1] == "binary_little_endian") ascii = false;
            else
                throw Error(ErrorCode::UnsupportedFormat,
                            path + ": unsupported ply format " + tokens[1]);
            format_seen = true;
        } else if (tokens[0] == "element") {
            if (tokens.size() < 3) parse_fail(path, line_number, "malformed element line");
            PlyElement element;
            element.name = tokens[1];
            element.count = std::size_t(std::strtoull(tokens[2].c_str(), nullptr, 10));
            elements.push_back(element);
        } else if (tokens[0] == "property") {
            if (elements.empty()) parse_fail(path, line_number, "property before any element");
            PlyProperty property;
            if (tokens.size() >= 5 && tokens[1] == "list") {
                property.is_list = true;
                const auto count_type = ply_type_from_name(tokens[2]);
                const auto value_type = ply_type_from_name(tokens[3]);
                if (!count_type || !value_type)
                    parse_fail(path, line_number, "unknown property type");
                property.count_type = *count_type;
                property.value_type = *value_type;
                property.name = tokens[4];
            } else if (tokens.size() >= 3) {
                const auto value_type = ply_type_from_name(tokens[1]);
                if (!value_type) parse_fail(path, line_number, "unknown property type");
                property.value_type = *value_type;
                property.name = tokens[2];
            } else {
                parse_fail(path, line_number, "malformed property line");
            }
            elements.back().properties.push_back(property);
        } else {
            parse_fail(path, line_number, "unknown header directive " + tokens[0]);
        }
    }
    if (!format_seen) parse_fail(path, line_number, "header has no format line");

    PlyReader reader{bytes, path, ascii, pos, line_number};
    std::vector<Vec3> vertices;
    std::vector<std::array<uint32_t, 3>> triangles;

    for (const PlyElement& element : elements) {
        int ix = -1, iy = -1, iz = -1, iface = -1;
        if (element.name == "vertex") {
            for (std::size_t p = 0; p < element.properties.size(); ++p) {
                const PlyProperty& property = element.properties[p];
                if (property.is_list) continue;
                if (property.name == "x") ix = int(p);
                if (property.name == "y") iy = int(p);
                if (property.name == "z") iz = int(p);
            }
            if (ix < 0 || iy < 0 || iz < 0)
                parse_fail(path, reader.line_number, "vertex element lacks x/y/z");
            vertices.reserve(element.count);
        } else if (element.name == "face") {
            for (std::size_t p = 0; p < element.properties.size(); ++p) {
                const PlyProperty& property = element.properties[p];
                if (property.is_list &&
                    (property.name == "vertex_indices" || property.name == "vertex_index"))
                    iface = int(p);
            }
            if (iface < 0) parse_fail(path, reader.line_number, "face element lacks index list");
        }

        std::vector<std::size_t> corners;
        for (std::size_t row = 0; row < element.count; ++row) {
            double x = 0, y = 0, z = 0;
            corners.clear();
            for (std::size_t p = 0; p < element.properties.size(); ++p) {
                const PlyProperty& property = element.properties[p];
                if (property.is_list) {
                    const double count_value = reader.read(property.count_type);
                    if (count_value < 0) parse_fail(path, reader.line_number, "negative list count");
                    const std::size_t count = std::size_t(count_value);
                    for (std::size_t i = 0; i < count; ++i) {
                        const double value = reader.read(property.value_type);
                        if (int(p) == iface) {
                            if (value < 0 || std::size_t(value) >= vertices.size())
                                parse_fail(path, reader.line_number, "face index out of range");
                            corners.push_back(std::size_t(value));
                        }
                    }
                } else {
                    const double value = reader.read(property.value_type);
                    if (int(p) == ix) x = value;
                    if (int(p) == iy) y = value;
                    if (int(p) == iz) z = value;
                }
            }
            if (element.name == "vertex") {
                vertices.push_back({x, y, z});
            } else if (element.name == "face") {
                if (corners.size() < 3)
                    parse_fail(path, reader.line_number, "face needs >= 3 vertices");
                for (std::size_t i = 1; i + 1 < corners.size(); ++i)
                    triangles.push_back(
                        {uint32_t(corners[0]), uint32_t(corners[i]), uint32_t(corners[i + 1])});
            }
        }
    }
    return make_mesh(std::move(vertices), std::move(triangles));
}

inline void atomic_write_file(const std::string& path, const std::string& payload) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(ErrorCode::IoError, "cannot open " + tmp + " for writing");
        out.write(payload.data(), std::streamsize(payload.size()));
        out.flush();
        if (!out.good()) {
            std::error_code ignored;
            std::filesystem::remove(tmp, ignored);
            throw Error(ErrorCode::IoError, "write failed on " + tmp);
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::error_code ignored;
        std::filesystem::remove(tmp, ignored);
        throw Error(ErrorCode::IoError, "cannot rename " + tmp + " to " + path);
    }
}

}  // namespace detail

/// Loads a triangle mesh from OBJ or PLY (ascii or binary little-endian).
/// Polygons are fan-triangulated; materials, normals, and UVs are ignored;
/// degenerate triangles are dropped and counted on the result.
inline TriangleMesh load_mesh(const std::string& path, MeshFormat format = MeshFormat::Auto) {
    if (format == MeshFormat::Auto) {
        std::string ext = std::filesystem::path(path).extension().string();
        for (char& c : ext) c = char(std::tolower(static_cast<unsigned char>(c)));
        if (ext == ".obj") format = MeshFormat::Obj;
        else if (ext == ".ply") format = MeshFormat::Ply;
        else
            throw Error(ErrorCode::UnsupportedFormat,
                        path + ": cannot infer mesh format from extension");
    }
    const std::string bytes = detail::read_file_bytes(path);
    return format == MeshFormat::Obj ? detail::load_obj(bytes, path)
                                     : detail::load_ply(bytes, path);
}

/// Layer color palette for exported clouds; index is layer modulo 8.
inline std::array<uint8_t, 3> layer_color(std::size_t layer) {
    static constexpr std::array<std::array<uint8_t, 3>, 8> kPalette = {{
        {230, 25, 75},    // red
        {60, 180, 75},    // green
        {0, 130, 200},    // blue
        {255, 225, 25},   // yellow
        {245, 130, 48},   // orange
        {145, 30, 180},   // purple
        {70, 240, 240},   // cyan
        {240, 50, 230},   // magenta
    }};
    return kPalette[layer % kPalette.size()];
}

/// Writes a point cloud as PLY, optionally colored by per-point layer id.
/// The write goes to a temp file renamed into place.
inline void export_ply(const std::vector<Vec3>& points, const std::vector<uint8_t>& layer_ids,
                       const std::string& path, bool binary = false) {
    if (points.empty()) throw Error(ErrorCode::EmptyCloud, "no points to export");
    if (!layer_ids.empty() && layer_ids.size() != points.size())
        throw Error(ErrorCode::ShapeMismatch, "layer ids and points differ in length");

    const bool colored = !layer_ids.empty();
    std::string payload;
    payload += "ply\n";
    payload += binary ? "format binary_little_endian 1.0\n" : "format ascii 1.0\n";
    payload += "element vertex " + std::to_string(points.size()) + "\n";
    payload += "property float x\nproperty float y\nproperty float z\n";
    if (colored) payload += "property uchar red\nproperty uchar green\nproperty uchar blue\n";
    payload += "end_header\n";

    for (std::size_t i = 0; i < points.size(); ++i) {
        const std::array<uint8_t, 3> color = colored ? layer_color(layer_ids[i])
                                                     : std::array<uint8_t, 3>{0, 0, 0};
        if (binary) {
            for (double coordinate : {points[i].x, points[i].y, points[i].z}) {
                const uint32_t raw = std::bit_cast<uint32_t>(float(coordinate));
                for (int b = 0; b < 4; ++b) payload += char((raw >> (8 * b)) & 0xff);
            }
            if (colored)
                for (uint8_t channel : color) payload += char(channel);
        } else {
            char buffer[128];
            std::snprintf(buffer, sizeof(buffer), "%.9g %.9g %.9g", points[i].x, points[i].y,
                          points[i].z);
            payload += buffer;
            if (colored) {
                std::snprintf(buffer, sizeof(buffer), " %u %u %u", unsigned(color[0]),
                              unsigned(color[1]), unsigned(color[2]));
                payload += buffer;
            }
            payload += '\n';
        }
    }
    detail::atomic_write_file(path, payload);
}

inline void export_ply(const std::vector<Vec3>& points, const std::string& path,
                       bool binary = false) {
    export_ply(points, {}, path, binary);
}

}  // namespace lari
