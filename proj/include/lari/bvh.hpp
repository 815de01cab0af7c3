#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <vector>

#include "lari/intersect.hpp"
#include "lari/mesh.hpp"

namespace lari {

/// Binned-SAH bounding volume hierarchy over mesh triangles.
///
/// Construction is sequential and deterministic for a given mesh. Nodes and
/// the triangle permutation are immutable after build; traversal is pure and
/// shareable across threads.
struct Bvh {
    struct Node {
        Aabb box;
        uint32_t left_or_first = 0;  // child index for inner nodes, first primitive for leaves
        uint32_t count = 0;          // primitive count; 0 marks an inner node

        bool is_leaf() const { return count > 0; }
    };

    std::vector<Node> nodes;
    std::vector<uint32_t> prim_order;  // permutation of triangle ids, grouped by leaf

    const Node& root() const { return nodes[0]; }
};

namespace detail {

struct BvhBuilder {
    static constexpr int kBinCount = 16;
    static constexpr uint32_t kMaxLeafSize = 4;
    static constexpr int kMaxDepth = 64;

    const std::vector<Aabb>& boxes;
    const std::vector<Vec3>& centers;
    Bvh& bvh;

    void build(uint32_t node_index, uint32_t begin, uint32_t end, int depth) {
        Bvh::Node& node = bvh.nodes[node_index];
        node.box = Aabb{};
        for (uint32_t i = begin; i < end; ++i) node.box.extend(boxes[bvh.prim_order[i]]);

        const uint32_t count = end - begin;
        if (count <= kMaxLeafSize || depth >= kMaxDepth) {
            node.left_or_first = begin;
            node.count = count;
            return;
        }

        // Binned SAH split over the centroid bounds.
        Aabb centroid_box;
        for (uint32_t i = begin; i < end; ++i) centroid_box.extend(centers[bvh.prim_order[i]]);

        int best_axis = -1;
        int best_bin = -1;
        double best_cost = double(count) * node.box.half_area();
        for (int axis = 0; axis < 3; ++axis) {
            const double extent = centroid_box.hi[axis] - centroid_box.lo[axis];
            if (extent <= 0.0) continue;
            const double to_bin = double(kBinCount) / extent;

            Aabb bin_box[kBinCount];
            uint32_t bin_count[kBinCount] = {};
            for (uint32_t i = begin; i < end; ++i) {
                const uint32_t tri = bvh.prim_order[i];
                int b = int((centers[tri][axis] - centroid_box.lo[axis]) * to_bin);
                b = std::clamp(b, 0, kBinCount - 1);
                bin_box[b].extend(boxes[tri]);
                ++bin_count[b];
            }

            double right_cost[kBinCount] = {};
            Aabb sweep;
            uint32_t sweep_count = 0;
            for (int b = kBinCount - 1; b > 0; --b) {
                sweep.extend(bin_box[b]);
                sweep_count += bin_count[b];
                right_cost[b] = sweep_count ? sweep.half_area() * double(sweep_count) : 0.0;
            }
            sweep = Aabb{};
            sweep_count = 0;
            for (int b = 0; b < kBinCount - 1; ++b) {
                sweep.extend(bin_box[b]);
                sweep_count += bin_count[b];
                if (sweep_count == 0 || sweep_count == count) continue;
                const double cost = sweep.half_area() * double(sweep_count) + right_cost[b + 1];
                if (cost < best_cost) {
                    best_cost = cost;
                    best_axis = axis;
                    best_bin = b;
                }
            }
        }

        uint32_t mid;
        if (best_axis < 0) {
            // No useful SAH split; fall back to a median split on the widest
            // centroid axis so oversized leaves cannot pile up.
            Vec3 extent = centroid_box.diagonal();
            int axis = extent.x >= extent.y && extent.x >= extent.z ? 0 : (extent.y >= extent.z ? 1 : 2);
            if (extent[axis] <= 0.0) {  // coincident centroids, accept the leaf
                node.left_or_first = begin;
                node.count = count;
                return;
            }
            mid = begin + count / 2;
            std::nth_element(bvh.prim_order.begin() + begin, bvh.prim_order.begin() + mid,
                             bvh.prim_order.begin() + end, [&](uint32_t a, uint32_t b) {
                                 return centers[a][axis] < centers[b][axis] ||
                                        (centers[a][axis] == centers[b][axis] && a < b);
                             });
        } else {
            const double extent = centroid_box.hi[best_axis] - centroid_box.lo[best_axis];
            const double to_bin = double(kBinCount) / extent;
            auto* first = bvh.prim_order.data() + begin;
            auto* last = bvh.prim_order.data() + end;
            auto* split = std::partition(first, last, [&](uint32_t tri) {
                int b = int((centers[tri][best_axis] - centroid_box.lo[best_axis]) * to_bin);
                return std::clamp(b, 0, kBinCount - 1) <= best_bin;
            });
            mid = uint32_t(split - bvh.prim_order.data());
            if (mid == begin || mid == end) mid = begin + count / 2;
        }

        const uint32_t left = uint32_t(bvh.nodes.size());
        node.left_or_first = left;
        node.count = 0;
        bvh.nodes.emplace_back();
        bvh.nodes.emplace_back();
        build(left, begin, mid, depth + 1);
        build(left + 1, mid, end, depth + 1);
    }
};

inline bool ray_box(const Ray& ray, const Vec3& inv_dir, const Aabb& box) {
    double t0 = ray.t_min, t1 = ray.t_max;
    for (int axis = 0; axis < 3; ++axis) {
        double near = (box.lo[axis] - ray.origin[axis]) * inv_dir[axis];
        double far = (box.hi[axis] - ray.origin[axis]) * inv_dir[axis];
        if (near > far) std::swap(near, far);
        t0 = std::max(t0, near);
        t1 = std::min(t1, far);
        if (t0 > t1) return false;
    }
    return true;
}

}  // namespace detail

inline Bvh build_bvh(const TriangleMesh& mesh) {
    if (mesh.triangle_count() == 0)
        throw Error(ErrorCode::EmptyMesh, "cannot build a BVH over an empty mesh");

    const uint32_t n = uint32_t(mesh.triangle_count());
    std::vector<Aabb> boxes(n);
    std::vector<Vec3> centers(n);
    for (uint32_t i = 0; i < n; ++i) {
        Aabb box;
        box.extend(mesh.vertex(i, 0));
        box.extend(mesh.vertex(i, 1));
        box.extend(mesh.vertex(i, 2));
        boxes[i] = box;
        centers[i] = box.center();
    }

    Bvh bvh;
    bvh.prim_order.resize(n);
    std::iota(bvh.prim_order.begin(), bvh.prim_order.end(), 0u);
    bvh.nodes.reserve(2 * n);
    bvh.nodes.emplace_back();
    detail::BvhBuilder{boxes, centers, bvh}.build(0, 0, n, 0);
    return bvh;
}

/// Every ray-triangle intersection along the ray, sorted by (t, triangle id).
/// Duplicates from shared edges/vertices are preserved; apply dedupe_hits to
/// collapse them. A miss is an empty list.
inline std::vector<Hit> ray_all_hits(const Bvh& bvh, const TriangleMesh& mesh, const Ray& ray) {
    std::vector<Hit> hits;
    if (bvh.nodes.empty()) return hits;

    const Vec3 inv_dir = {1.0 / ray.direction.x, 1.0 / ray.direction.y, 1.0 / ray.direction.z};
    uint32_t stack[detail::BvhBuilder::kMaxDepth + 2];
    int top = 0;
    stack[top++] = 0;
    while (top > 0) {
        const Bvh::Node& node = bvh.nodes[stack[--top]];
        if (!detail::ray_box(ray, inv_dir, node.box)) continue;
        if (node.is_leaf()) {
            for (uint32_t i = 0; i < node.count; ++i) {
                const uint32_t tri = bvh.prim_order[node.left_or_first + i];
                if (auto t = ray_triangle(ray, mesh.vertex(tri, 0), mesh.vertex(tri, 1),
                                          mesh.vertex(tri, 2)))
                    hits.push_back(make_hit(ray, *t, tri, mesh.normals[tri]));
            }
        } else {
            stack[top++] = node.left_or_first;
            stack[top++] = node.left_or_first + 1;
        }
    }
    std::sort(hits.begin(), hits.end(), [](const Hit& a, const Hit& b) {
        return a.t < b.t || (a.t == b.t && a.triangle_id < b.triangle_id);
    });
    return hits;
}

}  // namespace lari
