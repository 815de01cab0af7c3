#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <vector>

#include "lari/error.hpp"
#include "lari/vec.hpp"

namespace lari {

/// Static 3D kd-tree for nearest-neighbor queries. Immutable after
/// construction and shareable across concurrent readers.
class KdTree {
public:
    struct Nearest {
        uint32_t index = 0;  // index into the original point list
        double dist2 = 0.0;
    };

    explicit KdTree(const std::vector<Vec3>& points) : points_(points) {
        if (points_.empty()) throw Error(ErrorCode::EmptyCloud, "kd-tree over an empty cloud");
        order_.resize(points_.size());
        std::iota(order_.begin(), order_.end(), 0u);
        nodes_.reserve(2 * points_.size() / kLeafSize + 2);
        nodes_.emplace_back();
        build(0, 0, uint32_t(points_.size()));
        // Pack points into leaf order so leaf scans stay contiguous; order_
        // keeps the map from slots back to original indices.
        std::vector<Vec3> packed(points_.size());
        for (std::size_t i = 0; i < order_.size(); ++i) packed[i] = points_[order_[i]];
        points_ = std::move(packed);
    }

    std::size_t size() const { return points_.size(); }

    Nearest nearest(const Vec3& query) const {
        Nearest best;
        best.dist2 = std::numeric_limits<double>::infinity();
        search(0, query, best);
        return best;
    }

private:
    static constexpr uint32_t kLeafSize = 8;

    struct Node {
        Aabb box;
        uint32_t begin = 0, end = 0;  // leaf range; unused for inner nodes
        uint32_t children = 0;        // first of two children; 0 marks a leaf
    };

    void build(uint32_t node_index, uint32_t begin, uint32_t end) {
        Node& node = nodes_[node_index];
        node.box = Aabb{};
        for (uint32_t i = begin; i < end; ++i) node.box.extend(points_[order_[i]]);

        if (end - begin <= kLeafSize) {
            node.begin = begin;
            node.end = end;
            node.children = 0;
            return;
        }

        const Vec3 extent = node.box.diagonal();
        const int axis = extent.x >= extent.y && extent.x >= extent.z
                             ? 0
                             : (extent.y >= extent.z ? 1 : 2);
        const uint32_t mid = begin + (end - begin) / 2;
        std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                         [&](uint32_t a, uint32_t b) {
                             return points_[a][axis] < points_[b][axis] ||
                                    (points_[a][axis] == points_[b][axis] && a < b);
                         });

        const uint32_t children = uint32_t(nodes_.size());
        nodes_[node_index].children = children;
        nodes_.emplace_back();
        nodes_.emplace_back();
        build(children, begin, mid);
        build(children + 1, mid, end);
    }

    static double box_dist2(const Aabb& box, const Vec3& q) {
        double d2 = 0.0;
        for (int axis = 0; axis < 3; ++axis) {
            const double v = q[axis];
            if (v < box.lo[axis]) {
                const double d = box.lo[axis] - v;
                d2 += d * d;
            } else if (v > box.hi[axis]) {
                const double d = v - box.hi[axis];
                d2 += d * d;
            }
        }
        return d2;
    }

    void search(uint32_t node_index, const Vec3& q, Nearest& best) const {
        const Node& node = nodes_[node_index];
        if (node.children == 0) {
            for (uint32_t i = node.begin; i < node.end; ++i) {
                const double d2 = norm_squared(points_[i] - q);
                if (d2 > best.dist2) continue;
                const uint32_t p = order_[i];
                if (d2 < best.dist2 || p < best.index) {
                    best.dist2 = d2;
                    best.index = p;
                }
            }
            return;
        }
        const double d_left = box_dist2(nodes_[node.children].box, q);
        const double d_right = box_dist2(nodes_[node.children + 1].box, q);
        const uint32_t near_child = d_left <= d_right ? node.children : node.children + 1;
        const uint32_t far_child = d_left <= d_right ? node.children + 1 : node.children;
        if (std::min(d_left, d_right) < best.dist2) search(near_child, q, best);
        if (std::max(d_left, d_right) < best.dist2) search(far_child, q, best);
    }

    std::vector<Vec3> points_;
    std::vector<uint32_t> order_;
    std::vector<Node> nodes_;
};

}  // namespace lari
