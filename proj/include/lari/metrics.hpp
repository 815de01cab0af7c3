#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "lari/align.hpp"
#include "lari/error.hpp"
#include "lari/kdtree.hpp"
#include "lari/lari_map.hpp"
#include "lari/vec.hpp"

namespace lari {

enum class Region { Visible, Unseen, Overall };

inline const char* region_name(Region region) {
    switch (region) {
        case Region::Visible: return "visible";
        case Region::Unseen: return "unseen";
        case Region::Overall: return "overall";
    }
    return "overall";
}

/// Chamfer distance and F-scores for one evaluated cloud pair.
struct MetricsReport {
    double cd = 0.0;
    std::map<double, double> fs;  // threshold -> F-score
    std::size_t n_pred = 0;
    std::size_t n_gt = 0;
    Region region = Region::Overall;
    AlignmentResult alignment;
    bool empty_prediction = false;  // FS=0 fallback, cd meaningless
};

/// Symmetric Chamfer distance: half the sum of both directed mean
/// nearest-neighbor L2 distances. This overload takes caller-provided trees
/// (tree_a over a, tree_b over b), for search loops that query against one
/// fixed cloud repeatedly.
inline double chamfer(const std::vector<Vec3>& a, const KdTree& tree_a,
                      const std::vector<Vec3>& b, const KdTree& tree_b) {
    if (a.empty() || b.empty()) throw Error(ErrorCode::EmptyCloud, "chamfer needs non-empty clouds");
    double sum_a = 0.0;
    for (const Vec3& p : a) sum_a += std::sqrt(tree_b.nearest(p).dist2);
    double sum_b = 0.0;
    for (const Vec3& p : b) sum_b += std::sqrt(tree_a.nearest(p).dist2);
    return 0.5 * (sum_a / double(a.size()) + sum_b / double(b.size()));
}

inline double chamfer(const std::vector<Vec3>& a, const std::vector<Vec3>& b) {
    if (a.empty() || b.empty()) throw Error(ErrorCode::EmptyCloud, "chamfer needs non-empty clouds");
    return chamfer(a, KdTree(a), b, KdTree(b));
}

/// F-score at distance threshold tau. Precision is the fraction of predicted
/// points within tau of the ground truth, recall the fraction of ground-truth
/// points within tau of the prediction.
inline double fscore(const std::vector<Vec3>& pred, const std::vector<Vec3>& gt, double tau) {
    if (pred.empty() || gt.empty())
        throw Error(ErrorCode::EmptyCloud, "fscore needs non-empty clouds");
    if (!(tau > 0.0)) throw Error(ErrorCode::InvalidArgument, "tau must be positive");
    const double tau2 = tau * tau;
    const KdTree tree_pred(pred);
    const KdTree tree_gt(gt);
    std::size_t close_pred = 0;
    for (const Vec3& p : pred)
        if (tree_gt.nearest(p).dist2 <= tau2) ++close_pred;
    std::size_t close_gt = 0;
    for (const Vec3& p : gt)
        if (tree_pred.nearest(p).dist2 <= tau2) ++close_gt;
    const double precision = double(close_pred) / double(pred.size());
    const double recall = double(close_gt) / double(gt.size());
    if (precision + recall == 0.0) return 0.0;
    return 2.0 * precision * recall / (precision + recall);
}

namespace detail {

/// Unbiased bounded draw in [0, n); splitmix-style generator state so results
/// are identical across standard libraries.
struct SeededRng {
    uint64_t state;

    explicit SeededRng(uint64_t seed) : state(seed + 0x9e3779b97f4a7c15ull) {}

    uint64_t next() {
        state += 0x9e3779b97f4a7c15ull;
        uint64_t z = state;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    std::size_t below(std::size_t n) {
        return std::size_t((__uint128_t(next()) * n) >> 64);
    }
};

}  // namespace detail

/// Deterministic point sampling: without replacement when n <= cloud size
/// (partial Fisher-Yates), with replacement otherwise.
inline std::vector<Vec3> sample_points(const std::vector<Vec3>& cloud, std::size_t n,
                                       uint64_t seed) {
    if (cloud.empty()) throw Error(ErrorCode::EmptyCloud, "cannot sample from an empty cloud");
    detail::SeededRng rng(seed);
    std::vector<Vec3> out;
    out.reserve(n);
    if (n > cloud.size()) {
        for (std::size_t i = 0; i < n; ++i) out.push_back(cloud[rng.below(cloud.size())]);
    } else {
        std::vector<uint32_t> order(cloud.size());
        std::iota(order.begin(), order.end(), 0u);
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t j = i + rng.below(order.size() - i);
            std::swap(order[i], order[j]);
            out.push_back(cloud[order[i]]);
        }
    }
    return out;
}

/// Layer-averaged IoU (layers with an empty union in both masks are skipped)
/// and global DICE over the flattened volume.
inline std::pair<double, double> mask_metrics(const IntersectionMask& pred,
                                              const IntersectionMask& gt) {
    if (!pred.same_shape(gt)) throw Error(ErrorCode::ShapeMismatch, "mask shapes differ");

    double iou_sum = 0.0;
    int counted_layers = 0;
    std::size_t inter_total = 0, pred_total = 0, gt_total = 0;
    for (int l = 0; l < pred.layers; ++l) {
        std::size_t inter = 0, uni = 0;
        for (int h = 0; h < pred.height; ++h) {
            for (int w = 0; w < pred.width; ++w) {
                const bool a = pred.at(h, w, l);
                const bool b = gt.at(h, w, l);
                inter += a && b;
                uni += a || b;
                pred_total += a;
                gt_total += b;
            }
        }
        inter_total += inter;
        if (uni > 0) {
            iou_sum += double(inter) / double(uni);
            ++counted_layers;
        }
    }
    const double miou = counted_layers > 0 ? iou_sum / counted_layers : 1.0;
    const double dice = (pred_total + gt_total) > 0
                            ? 2.0 * double(inter_total) / double(pred_total + gt_total)
                            : 1.0;
    return {miou, dice};
}

namespace detail {

inline std::string format_number(double v) {
    if (std::isinf(v)) return v > 0 ? "\"inf\"" : "\"-inf\"";
    if (std::isnan(v)) return "\"nan\"";
    std::ostringstream ss;
    ss.precision(12);
    ss << v;
    return ss.str();
}

}  // namespace detail

/// One JSON-compatible record per evaluated image:
/// {"image_id": ..., "region": ..., "cd": ..., "fs@0.1": ..., ...,
///  "n_pred": ..., "n_gt": ..., "alignment": {"s": ..., "t": ...}}
inline std::string report_json_line(const std::string& image_id, const MetricsReport& report) {
    std::ostringstream ss;
    ss << "{\"image_id\": \"" << image_id << "\", \"region\": \"" << region_name(report.region)
       << "\", \"cd\": " << detail::format_number(report.cd);
    for (const auto& [tau, score] : report.fs) {
        std::ostringstream key;
        key.precision(12);
        key << tau;
        ss << ", \"fs@" << key.str() << "\": " << detail::format_number(score);
    }
    ss << ", \"n_pred\": " << report.n_pred << ", \"n_gt\": " << report.n_gt
       << ", \"alignment\": {\"s\": " << detail::format_number(report.alignment.s)
       << ", \"t\": " << detail::format_number(report.alignment.t) << "}}";
    return ss.str();
}

}  // namespace lari
