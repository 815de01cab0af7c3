#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "lari/error.hpp"
#include "lari/vec.hpp"

namespace lari {

/// Layered intersection map: H x W x L camera-space points stored as float32
/// in (h, w, l, xyz) row-major order. Valid layers occupy a per-pixel prefix
/// of the layer axis with strictly increasing z; the rest holds the NaN fill.
struct LariMap {
    int height = 0, width = 0, layers = 0;
    std::vector<float> data;

    static constexpr float kFill = std::numeric_limits<float>::quiet_NaN();

    LariMap() = default;
    LariMap(int h, int w, int l)
        : height(h), width(w), layers(l), data(std::size_t(h) * w * l * 3, kFill) {}

    std::size_t offset(int h, int w, int l) const {
        return ((std::size_t(h) * width + w) * layers + l) * 3;
    }

    Vec3 point(int h, int w, int l) const {
        const float* p = data.data() + offset(h, w, l);
        return {p[0], p[1], p[2]};
    }

    void set_point(int h, int w, int l, const Vec3& p) {
        float* d = data.data() + offset(h, w, l);
        d[0] = float(p.x);
        d[1] = float(p.y);
        d[2] = float(p.z);
    }

    bool same_shape(const LariMap& o) const {
        return height == o.height && width == o.width && layers == o.layers;
    }
};

/// Per-pixel count of valid layers; 0 means the ray hit nothing.
struct StoppingIndexMap {
    int height = 0, width = 0;
    std::vector<uint8_t> values;

    StoppingIndexMap() = default;
    StoppingIndexMap(int h, int w) : height(h), width(w), values(std::size_t(h) * w, 0) {}

    uint8_t at(int h, int w) const { return values[std::size_t(h) * width + w]; }
    void set(int h, int w, uint8_t v) { values[std::size_t(h) * width + w] = v; }
};

/// H x W x L boolean volume; per pixel the true entries form a layer prefix.
struct IntersectionMask {
    int height = 0, width = 0, layers = 0;
    std::vector<uint8_t> bits;

    IntersectionMask() = default;
    IntersectionMask(int h, int w, int l)
        : height(h), width(w), layers(l), bits(std::size_t(h) * w * l, 0) {}

    std::size_t offset(int h, int w, int l) const {
        return (std::size_t(h) * width + w) * layers + l;
    }
    bool at(int h, int w, int l) const { return bits[offset(h, w, l)] != 0; }
    void set(int h, int w, int l, bool v) { bits[offset(h, w, l)] = v ? 1 : 0; }

    std::size_t count() const {
        std::size_t n = 0;
        for (uint8_t b : bits) n += b;
        return n;
    }

    bool same_shape(const IntersectionMask& o) const {
        return height == o.height && width == o.width && layers == o.layers;
    }
};

/// Per-pixel stopping scores over L+1 channels (channel 0 = no intersection).
struct StoppingLogits {
    int height = 0, width = 0, channels = 0;
    std::vector<double> values;

    StoppingLogits() = default;
    StoppingLogits(int h, int w, int c)
        : height(h), width(w), channels(c), values(std::size_t(h) * w * c, 0.0) {}

    double at(int h, int w, int c) const {
        return values[(std::size_t(h) * width + w) * channels + c];
    }
    double& at(int h, int w, int c) {
        return values[(std::size_t(h) * width + w) * channels + c];
    }
};

/// Mask with layer l valid iff l+1 <= C(h, w).
inline IntersectionMask mask_from_index(const StoppingIndexMap& index, int layers) {
    IntersectionMask mask(index.height, index.width, layers);
    for (int h = 0; h < index.height; ++h) {
        for (int w = 0; w < index.width; ++w) {
            const int c = index.at(h, w);
            if (c > layers)
                throw Error(ErrorCode::IndexOutOfRange,
                            "stopping index " + std::to_string(c) + " exceeds layer count " +
                                std::to_string(layers));
            for (int l = 0; l < c; ++l) mask.set(h, w, l, true);
        }
    }
    return mask;
}

/// Points where the mask is true, in row-major (h, w, l) order.
inline std::vector<Vec3> select_points(const LariMap& map, const IntersectionMask& mask) {
    if (map.height != mask.height || map.width != mask.width || map.layers != mask.layers)
        throw Error(ErrorCode::ShapeMismatch, "map and mask shapes differ");
    std::vector<Vec3> points;
    points.reserve(mask.count());
    for (int h = 0; h < map.height; ++h)
        for (int w = 0; w < map.width; ++w)
            for (int l = 0; l < map.layers; ++l)
                if (mask.at(h, w, l)) points.push_back(map.point(h, w, l));
    return points;
}

/// Per-pixel argmax over the L+1 channels, ties toward the smaller index.
/// Softmax is monotone, so this equals the argmax of the softmax.
inline StoppingIndexMap index_from_logits(const StoppingLogits& logits) {
    StoppingIndexMap index(logits.height, logits.width);
    for (int h = 0; h < logits.height; ++h) {
        for (int w = 0; w < logits.width; ++w) {
            int best = 0;
            double best_value = -std::numeric_limits<double>::infinity();
            for (int c = 0; c < logits.channels; ++c) {
                const double v = logits.at(h, w, c);
                if (!std::isfinite(v))
                    throw Error(ErrorCode::NonFiniteLogits, "logit is not finite");
                if (v > best_value) {
                    best_value = v;
                    best = c;
                }
            }
            index.set(h, w, uint8_t(best));
        }
    }
    return index;
}

/// Recovers the stopping index from a prefix mask (inverse of mask_from_index).
inline StoppingIndexMap index_from_mask(const IntersectionMask& mask) {
    StoppingIndexMap index(mask.height, mask.width);
    for (int h = 0; h < mask.height; ++h) {
        for (int w = 0; w < mask.width; ++w) {
            int c = 0;
            while (c < mask.layers && mask.at(h, w, c)) ++c;
            index.set(h, w, uint8_t(c));
        }
    }
    return index;
}

}  // namespace lari
