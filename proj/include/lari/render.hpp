#pragma once

#include <atomic>
#include <cstdint>

#include "lari/bvh.hpp"
#include "lari/camera.hpp"
#include "lari/lari_map.hpp"
#include "lari/mesh.hpp"
#include "lari/parallel.hpp"

namespace lari {

struct RenderOptions {
    int layers = 5;
    /// Dedup epsilon on the ray parameter; <= 0 picks 1e-6 times the scene's
    /// ray-length scale (camera distance plus bounding radius).
    double dedupe_epsilon = -1.0;
    int workers = 0;  // 0: LARI_WORKERS env, then hardware concurrency
};

struct RenderStats {
    std::size_t total_pixels = 0;
    std::size_t overflow_pixels = 0;        // more hits than layers, extras truncated
    std::size_t collapsed_hit_pixels = 0;   // dedup removed at least one hit
    double dedupe_epsilon = 0.0;

    double overflow_fraction() const {
        return total_pixels ? double(overflow_pixels) / double(total_pixels) : 0.0;
    }
    double collapsed_fraction() const {
        return total_pixels ? double(collapsed_hit_pixels) / double(total_pixels) : 0.0;
    }
};

struct RenderResult {
    LariMap map;
    StoppingIndexMap index;
    RenderStats stats;
};

/// Renders the layered intersection map and stopping-index map for one camera.
///
/// One ray per pixel center; the first min(hits, L) deduped intersections are
/// written as camera-space points into the layer prefix, extra hits are
/// truncated and counted. Pixels are processed in row chunks with disjoint
/// output regions, so the result is bitwise identical for any worker count.
inline RenderResult render_lari(const TriangleMesh& mesh, const Bvh& bvh,
                                const PinholeCamera& camera, const RenderOptions& options = {}) {
    camera.validate();
    if (options.layers < 1)
        throw Error(ErrorCode::InvalidArgument, "layer count must be at least 1");
    if (options.layers > 255)
        throw Error(ErrorCode::InvalidArgument, "layer count is limited to 255");

    const int layer_count = options.layers;
    RenderResult result;
    result.map = LariMap(camera.height, camera.width, layer_count);
    result.index = StoppingIndexMap(camera.height, camera.width);
    result.stats.total_pixels = std::size_t(camera.height) * camera.width;

    double epsilon = options.dedupe_epsilon;
    if (epsilon <= 0.0) {
        const Aabb box = mesh.bounds();
        const double reach =
            box.empty() ? 1.0 : distance(camera.position(), box.center()) + 0.5 * norm(box.diagonal());
        epsilon = 1e-6 * std::max(1.0, reach);
    }
    result.stats.dedupe_epsilon = epsilon;

    std::atomic<std::size_t> overflow{0};
    std::atomic<std::size_t> collapsed{0};

    parallel_chunks(std::size_t(camera.height), 8, options.workers,
                    [&](std::size_t row_begin, std::size_t row_end) {
        std::size_t local_overflow = 0;
        std::size_t local_collapsed = 0;
        for (std::size_t h = row_begin; h < row_end; ++h) {
            for (int w = 0; w < camera.width; ++w) {
                const Ray ray = generate_ray(camera, w, int(h));
                const std::vector<Hit> raw = ray_all_hits(bvh, mesh, ray);
                const std::vector<Hit> hits = dedupe_hits(raw, epsilon);
                if (hits.size() != raw.size()) ++local_collapsed;
                const int n = int(std::min<std::size_t>(hits.size(), std::size_t(layer_count)));
                if (hits.size() > std::size_t(layer_count)) ++local_overflow;
                result.index.set(int(h), w, uint8_t(n));
                for (int l = 0; l < n; ++l)
                    result.map.set_point(int(h), w, l, camera.world_to_camera(hits[l].point));
            }
        }
        overflow += local_overflow;
        collapsed += local_collapsed;
    });

    result.stats.overflow_pixels = overflow.load();
    result.stats.collapsed_hit_pixels = collapsed.load();
    return result;
}

}  // namespace lari
