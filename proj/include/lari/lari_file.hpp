#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <string>
#include <utility>

#include "lari/error.hpp"
#include "lari/lari_map.hpp"
#include "lari/mesh_io.hpp"

namespace lari {

/// Layered-map container layout, all integers little-endian:
///   bytes  0..3   magic "LARI"
///   bytes  4..7   format version (1)
///   bytes  8..19  H, W, L as uint32
///   bytes 20..23  flags (bit 0: stopping indices present, always set)
///   then H*W stopping indices as uint8
///   then H*W*L*3 float32 coordinates in (h, w, l, xyz) row-major order
/// Total size: 24 + H*W + 12*H*W*L bytes. Entries beyond a pixel's stopping
/// index are stored as 0.0 and regenerated as the NaN fill on read.
inline constexpr uint32_t kLariFileVersion = 1;

namespace detail {

inline void put_u32(std::string& out, uint32_t value) {
    for (int b = 0; b < 4; ++b) out += char((value >> (8 * b)) & 0xff);
}

inline uint32_t get_u32(const std::string& bytes, std::size_t offset) {
    uint32_t value = 0;
    for (int b = 0; b < 4; ++b)
        value |= uint32_t(static_cast<unsigned char>(bytes[offset + b])) << (8 * b);
    return value;
}

}  // namespace detail

inline uint64_t lari_file_size(uint64_t height, uint64_t width, uint64_t layers) {
    return 24 + height * width + 12 * height * width * layers;
}

/// Serializes a map and its stopping indices; returns the byte count written.
/// Masked-in finite values round-trip bitwise; everything else is stored 0.0.
inline std::size_t write_lari(const LariMap& map, const StoppingIndexMap& index,
                              const std::string& path) {
    if (index.height != map.height || index.width != map.width)
        throw Error(ErrorCode::ShapeMismatch, "index dimensions do not match the map");
    if (map.layers > 255)
        throw Error(ErrorCode::InvalidArgument, "stopping indices are 8-bit; L must be <= 255");
    for (uint8_t c : index.values)
        if (c > map.layers)
            throw Error(ErrorCode::IndexOutOfRange, "stopping index exceeds layer count");

    std::string payload;
    payload.reserve(std::size_t(lari_file_size(map.height, map.width, map.layers)));
    payload += "LARI";
    detail::put_u32(payload, kLariFileVersion);
    detail::put_u32(payload, uint32_t(map.height));
    detail::put_u32(payload, uint32_t(map.width));
    detail::put_u32(payload, uint32_t(map.layers));
    detail::put_u32(payload, 1u);  // flags: indices present

    for (uint8_t c : index.values) payload += char(c);

    for (int h = 0; h < map.height; ++h) {
        for (int w = 0; w < map.width; ++w) {
            const uint8_t c = index.at(h, w);
            for (int l = 0; l < map.layers; ++l) {
                const std::size_t base = map.offset(h, w, l);
                for (int axis = 0; axis < 3; ++axis) {
                    float value = (l < int(c)) ? map.data[base + axis] : 0.0f;
                    if (!std::isfinite(value)) value = 0.0f;
                    const uint32_t raw = std::bit_cast<uint32_t>(value);
                    for (int b = 0; b < 4; ++b) payload += char((raw >> (8 * b)) & 0xff);
                }
            }
        }
    }

    detail::atomic_write_file(path, payload);
    return payload.size();
}

/// Reads a serialized map back; layers beyond each pixel's stopping index
/// are restored to the in-memory NaN fill.
inline std::pair<LariMap, StoppingIndexMap> read_lari(const std::string& path) {
    const std::string bytes = detail::read_file_bytes(path);
    if (bytes.size() < 24) {
        if (bytes.size() < 4 || bytes.compare(0, 4, "LARI") != 0)
            throw Error(ErrorCode::CorruptHeader, path + ": not a LARI file");
        throw Error(ErrorCode::TruncatedFile, path + ": header cut short");
    }
    if (bytes.compare(0, 4, "LARI") != 0)
        throw Error(ErrorCode::CorruptHeader, path + ": bad magic");
    const uint32_t version = detail::get_u32(bytes, 4);
    if (version != kLariFileVersion)
        throw Error(ErrorCode::VersionMismatch,
                    path + ": format version " + std::to_string(version) + ", expected " +
                        std::to_string(kLariFileVersion));
    const uint32_t height = detail::get_u32(bytes, 8);
    const uint32_t width = detail::get_u32(bytes, 12);
    const uint32_t layers = detail::get_u32(bytes, 16);
    if (height == 0 || width == 0 || layers == 0 || layers > 255)
        throw Error(ErrorCode::CorruptHeader, path + ": implausible dimensions");

    const uint64_t expected = lari_file_size(height, width, layers);
    if (bytes.size() < expected) throw Error(ErrorCode::TruncatedFile, path + ": data cut short");
    if (bytes.size() > expected)
        throw Error(ErrorCode::CorruptHeader, path + ": trailing bytes after payload");

    StoppingIndexMap index{int(height), int(width)};
    std::size_t offset = 24;
    for (std::size_t i = 0; i < index.values.size(); ++i, ++offset) {
        const uint8_t c = uint8_t(static_cast<unsigned char>(bytes[offset]));
        if (c > layers) throw Error(ErrorCode::CorruptHeader, path + ": stopping index > L");
        index.values[i] = c;
    }

    LariMap map{int(height), int(width), int(layers)};
    for (int h = 0; h < map.height; ++h) {
        for (int w = 0; w < map.width; ++w) {
            const int c = index.at(h, w);
            for (int l = 0; l < map.layers; ++l) {
                const std::size_t base = map.offset(h, w, l);
                for (int axis = 0; axis < 3; ++axis) {
                    uint32_t raw = 0;
                    for (int b = 0; b < 4; ++b)
                        raw |= uint32_t(static_cast<unsigned char>(bytes[offset++])) << (8 * b);
                    // Beyond the index the in-memory fill (NaN) stays in place.
                    if (l < c) map.data[base + axis] = std::bit_cast<float>(raw);
                }
            }
        }
    }
    return {std::move(map), std::move(index)};
}

}  // namespace lari
