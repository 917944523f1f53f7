// SPDX-FileCopyrightText: 2026 SSGT Codec Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <charconv>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ssgt/bytes.hpp"
#include "ssgt/errors.hpp"

namespace ssgt {

struct RawPointCloud {
    std::vector<std::array<double, 3>> points;
    std::vector<std::array<std::uint8_t, 3>> colors;

    std::size_t size() const { return points.size(); }
};

namespace detail {

enum class PlyType { kInt8, kUint8, kInt16, kUint16, kInt32, kUint32, kFloat32, kFloat64 };

inline std::size_t ply_type_size(PlyType t) {
    switch (t) {
        case PlyType::kInt8:
        case PlyType::kUint8: return 1;
        case PlyType::kInt16:
        case PlyType::kUint16: return 2;
        case PlyType::kInt32:
        case PlyType::kUint32:
        case PlyType::kFloat32: return 4;
        case PlyType::kFloat64: return 8;
    }
    return 0;
}

inline PlyType ply_type_from_name(std::string_view name) {
    if (name == "char" || name == "int8") return PlyType::kInt8;
    if (name == "uchar" || name == "uint8") return PlyType::kUint8;
    if (name == "short" || name == "int16") return PlyType::kInt16;
    if (name == "ushort" || name == "uint16") return PlyType::kUint16;
    if (name == "int" || name == "int32") return PlyType::kInt32;
    if (name == "uint" || name == "uint32") return PlyType::kUint32;
    if (name == "float" || name == "float32") return PlyType::kFloat32;
    if (name == "double" || name == "float64") return PlyType::kFloat64;
    throw FormatError("ply: unknown property type '" + std::string(name) + "'");
}

struct PlyProperty {
    std::string name;
    PlyType type = PlyType::kFloat32;
    bool is_list = false;
    PlyType count_type = PlyType::kUint8;
};

struct PlyElement {
    std::string name;
    std::size_t count = 0;
    std::vector<PlyProperty> properties;
};

struct PlyHeader {
    bool binary = false;
    std::vector<PlyElement> elements;
    std::size_t body_offset = 0;
};

inline PlyHeader parse_ply_header(std::span<const std::uint8_t> bytes) {
    const std::string_view text(reinterpret_cast<const char*>(bytes.data()), bytes.size());

    PlyHeader header;
    bool saw_magic = false;
    bool saw_format = false;
    bool done = false;
    std::size_t pos = 0;
    while (!done) {
        const auto eol = text.find('\n', pos);
        if (eol == std::string_view::npos) throw FormatError("ply: unterminated header");
        std::string_view line = text.substr(pos, eol - pos);
        pos = eol + 1;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

        std::vector<std::string_view> tokens;
        for (std::size_t i = 0; i < line.size();) {
            while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
            std::size_t start = i;
            while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
            if (i > start) tokens.push_back(line.substr(start, i - start));
        }
        if (tokens.empty()) continue;

        if (!saw_magic) {
            if (tokens[0] != "ply" || tokens.size() != 1) throw FormatError("ply: missing magic");
            saw_magic = true;
            continue;
        }
        if (tokens[0] == "comment" || tokens[0] == "obj_info") continue;
        if (tokens[0] == "format") {
            if (tokens.size() != 3 || tokens[2] != "1.0")
                throw FormatError("ply: malformed format line");
            if (tokens[1] == "ascii")
                header.binary = false;
            else if (tokens[1] == "binary_little_endian")
                header.binary = true;
            else
                throw FormatError("ply: unsupported format '" + std::string(tokens[1]) + "'");
            saw_format = true;
        } else if (tokens[0] == "element") {
            if (tokens.size() != 3) throw FormatError("ply: malformed element line");
            PlyElement element;
            element.name = std::string(tokens[1]);
            std::size_t count = 0;
            const auto res = std::from_chars(tokens[2].begin(), tokens[2].end(), count);
            if (res.ec != std::errc{} || res.ptr != tokens[2].end())
                throw FormatError("ply: malformed element count");
            element.count = count;
            header.elements.push_back(std::move(element));
        } else if (tokens[0] == "property") {
            if (header.elements.empty()) throw FormatError("ply: property before element");
            PlyProperty prop;
            if (tokens.size() == 5 && tokens[1] == "list") {
                prop.is_list = true;
                prop.count_type = ply_type_from_name(tokens[2]);
                prop.type = ply_type_from_name(tokens[3]);
                prop.name = std::string(tokens[4]);
            } else if (tokens.size() == 3) {
                prop.type = ply_type_from_name(tokens[1]);
                prop.name = std::string(tokens[2]);
            } else {
                throw FormatError("ply: malformed property line");
            }
            header.elements.back().properties.push_back(std::move(prop));
        } else if (tokens[0] == "end_header") {
            if (!saw_format) throw FormatError("ply: missing format line");
            done = true;
        } else {
            throw FormatError("ply: unknown header keyword '" + std::string(tokens[0]) + "'");
        }
    }
    header.body_offset = pos;
    return header;
}

// Positions of the required vertex properties inside the property list, or -1.
struct VertexLayout {
    std::array<int, 3> xyz{-1, -1, -1};
    std::array<int, 3> rgb{-1, -1, -1};
};

inline VertexLayout vertex_layout(const PlyElement& vertex) {
    VertexLayout layout;
    const std::array<std::string_view, 3> coord_names{"x", "y", "z"};
    const std::array<std::string_view, 3> color_names{"red", "green", "blue"};
    for (std::size_t i = 0; i < vertex.properties.size(); ++i) {
        const auto& p = vertex.properties[i];
        for (int a = 0; a < 3; ++a) {
            if (p.name == coord_names[a]) {
                if (p.is_list || (p.type != PlyType::kFloat32 && p.type != PlyType::kFloat64))
                    throw FormatError("ply: property '" + p.name + "' must be float or double");
                layout.xyz[a] = static_cast<int>(i);
            } else if (p.name == color_names[a]) {
                if (p.is_list || p.type != PlyType::kUint8)
                    throw FormatError("ply: property '" + p.name + "' must be uchar");
                layout.rgb[a] = static_cast<int>(i);
            }
        }
    }
    for (int a = 0; a < 3; ++a) {
        if (layout.xyz[a] < 0)
            throw FormatError("ply: missing vertex property '" + std::string(coord_names[a]) + "'");
        if (layout.rgb[a] < 0)
            throw FormatError("ply: missing vertex property '" + std::string(color_names[a]) + "'");
    }
    return layout;
}

class AsciiTokenizer {
public:
    AsciiTokenizer(std::string_view text) : text_(text) {}

    std::string_view next() {
        while (pos_ < text_.size() && is_space(text_[pos_])) ++pos_;
        if (pos_ >= text_.size()) throw FormatError("ply: element count mismatch (missing data)");
        const std::size_t start = pos_;
        while (pos_ < text_.size() && !is_space(text_[pos_])) ++pos_;
        return text_.substr(start, pos_ - start);
    }

    double next_double() {
        const auto tok = next();
        double v = 0;
        const auto res = std::from_chars(tok.begin(), tok.end(), v);
        if (res.ec != std::errc{} || res.ptr != tok.end())
            throw FormatError("ply: malformed number '" + std::string(tok) + "'");
        return v;
    }

    long next_integer() {
        const auto tok = next();
        long v = 0;
        const auto res = std::from_chars(tok.begin(), tok.end(), v);
        if (res.ec != std::errc{} || res.ptr != tok.end())
            throw FormatError("ply: malformed integer '" + std::string(tok) + "'");
        return v;
    }

private:
    static bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; }

    std::string_view text_;
    std::size_t pos_ = 0;
};

inline double read_binary_scalar(ByteReader& reader, PlyType type) {
    switch (type) {
        case PlyType::kInt8: return static_cast<double>(static_cast<std::int8_t>(reader.u8()));
        case PlyType::kUint8: return static_cast<double>(reader.u8());
        case PlyType::kInt16: return static_cast<double>(static_cast<std::int16_t>(reader.u16()));
        case PlyType::kUint16: return static_cast<double>(reader.u16());
        case PlyType::kInt32: return static_cast<double>(static_cast<std::int32_t>(reader.u32()));
        case PlyType::kUint32: return static_cast<double>(reader.u32());
        case PlyType::kFloat32: return static_cast<double>(reader.f32());
        case PlyType::kFloat64: return reader.f64();
    }
    return 0.0;
}

}  // namespace detail

// Parses a PLY point cloud, ascii 1.0 or binary_little_endian 1.0. Vertices
// need x,y,z (float/double) and red,green,blue (uchar); any other property is
// skipped. Elements other than "vertex" are skipped as well.
inline RawPointCloud read_ply(std::span<const std::uint8_t> bytes) {
    const auto header = detail::parse_ply_header(bytes);

    const detail::PlyElement* vertex = nullptr;
    for (const auto& element : header.elements)
        if (element.name == "vertex") vertex = &element;
    if (vertex == nullptr) throw FormatError("ply: missing vertex element");
    const auto layout = detail::vertex_layout(*vertex);

    RawPointCloud cloud;
    cloud.points.reserve(vertex->count);
    cloud.colors.reserve(vertex->count);

    const auto body = bytes.subspan(header.body_offset);
    if (!header.binary) {
        detail::AsciiTokenizer tokens(
            std::string_view(reinterpret_cast<const char*>(body.data()), body.size()));
        for (const auto& element : header.elements) {
            const bool keep = &element == vertex;
            for (std::size_t i = 0; i < element.count; ++i) {
                std::array<double, 3> point{};
                std::array<std::uint8_t, 3> color{};
                for (std::size_t p = 0; p < element.properties.size(); ++p) {
                    const auto& prop = element.properties[p];
                    if (prop.is_list) {
                        const long n = tokens.next_integer();
                        if (n < 0) throw FormatError("ply: negative list count");
                        for (long k = 0; k < n; ++k) tokens.next();
                        continue;
                    }
                    if (!keep) {
                        tokens.next();
                        continue;
                    }
                    bool used = false;
                    for (int a = 0; a < 3 && !used; ++a) {
                        if (layout.xyz[a] == static_cast<int>(p)) {
                            point[a] = tokens.next_double();
                            used = true;
                        } else if (layout.rgb[a] == static_cast<int>(p)) {
                            const long v = tokens.next_integer();
                            if (v < 0 || v > 255) throw FormatError("ply: color out of range");
                            color[a] = static_cast<std::uint8_t>(v);
                            used = true;
                        }
                    }
                    if (!used) tokens.next();
                }
                if (keep) {
                    cloud.points.push_back(point);
                    cloud.colors.push_back(color);
                }
            }
            if (keep) break;  // trailing elements do not affect the cloud
        }
    } else {
        detail::ByteReader reader(body);
        for (const auto& element : header.elements) {
            const bool keep = &element == vertex;
            for (std::size_t i = 0; i < element.count; ++i) {
                std::array<double, 3> point{};
                std::array<std::uint8_t, 3> color{};
                for (std::size_t p = 0; p < element.properties.size(); ++p) {
                    const auto& prop = element.properties[p];
                    if (prop.is_list) {
                        const double n = detail::read_binary_scalar(reader, prop.count_type);
                        if (n < 0) throw FormatError("ply: negative list count");
                        reader.skip(static_cast<std::size_t>(n) * detail::ply_type_size(prop.type));
                        continue;
                    }
                    bool used = false;
                    if (keep) {
                        for (int a = 0; a < 3 && !used; ++a) {
                            if (layout.xyz[a] == static_cast<int>(p)) {
                                point[a] = detail::read_binary_scalar(reader, prop.type);
                                used = true;
                            } else if (layout.rgb[a] == static_cast<int>(p)) {
                                color[a] = reader.u8();
                                used = true;
                            }
                        }
                    }
                    if (!used) reader.skip(detail::ply_type_size(prop.type));
                }
                if (keep) {
                    cloud.points.push_back(point);
                    cloud.colors.push_back(color);
                }
            }
            if (keep) break;
        }
    }
    return cloud;
}

// Serializes a cloud as binary_little_endian 1.0 with double coordinates.
inline std::vector<std::uint8_t> write_ply(const RawPointCloud& cloud) {
    std::string header;
    header += "ply\n";
    header += "format binary_little_endian 1.0\n";
    header += "element vertex " + std::to_string(cloud.size()) + "\n";
    header += "property double x\nproperty double y\nproperty double z\n";
    header += "property uchar red\nproperty uchar green\nproperty uchar blue\n";
    header += "end_header\n";

    std::vector<std::uint8_t> out(header.begin(), header.end());
    out.reserve(out.size() + cloud.size() * 27);
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        for (int a = 0; a < 3; ++a) detail::put_f64(out, cloud.points[i][a]);
        for (int a = 0; a < 3; ++a) detail::put_u8(out, cloud.colors[i][a]);
    }
    return out;
}

}  // namespace ssgt
