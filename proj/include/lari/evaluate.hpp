#pragma once

#include <cstdint>
#include <limits>
#include <utility>
#include <vector>

#include "lari/align.hpp"
#include "lari/error.hpp"
#include "lari/icp.hpp"
#include "lari/lari_map.hpp"
#include "lari/metrics.hpp"
#include "lari/vec.hpp"

namespace lari {

struct EvaluateOptions {
    Region region = Region::Overall;
    std::size_t n_samples = 10000;
    std::vector<double> thresholds = {0.1, 0.05, 0.02};
    uint64_t seed = 0;
    bool fixed_sample = false;  // sample identical pixel positions from pred and gt
    bool normalize = true;      // scale so the gt bounding-box diagonal is 1
};

namespace detail {

inline bool layer_in_region(int layer, Region region) {
    switch (region) {
        case Region::Visible: return layer == 0;
        case Region::Unseen: return layer >= 1;
        case Region::Overall: return true;
    }
    return false;
}

inline double bbox_diagonal(const std::vector<Vec3>& points) {
    Aabb box;
    for (const Vec3& p : points) box.extend(p);
    return points.empty() ? 0.0 : norm(box.diagonal());
}

}  // namespace detail

/// View-aligned evaluation of one predicted layered map against ground truth.
/// The prediction is scale-shift aligned on pixels valid in both masks, both
/// clouds are scaled so the full gt cloud has unit bounding-box diagonal, and
/// CD / F-score are computed on points sampled from the requested region.
/// An empty predicted region is reported as empty_prediction (FS 0, CD inf)
/// rather than an error; an empty gt region throws EmptyRegion.
inline MetricsReport evaluate_view_aligned(const LariMap& pred, const IntersectionMask& pred_mask,
                                           const LariMap& gt, const IntersectionMask& gt_mask,
                                           const EvaluateOptions& options = {}) {
    if (!pred.same_shape(gt))
        throw Error(ErrorCode::ShapeMismatch, "prediction and gt maps differ in shape");
    if (!pred_mask.same_shape(gt_mask) || pred_mask.height != pred.height ||
        pred_mask.width != pred.width || pred_mask.layers != pred.layers)
        throw Error(ErrorCode::ShapeMismatch, "mask shape does not match the maps");
    if (options.n_samples == 0)
        throw Error(ErrorCode::InvalidArgument, "n_samples must be positive");

    // Correspondences for alignment: pixels valid in both masks, paired by position.
    std::vector<Vec3> paired_pred, paired_gt;
    // Region clouds (pred under its own mask, gt under its own mask) plus the
    // full gt cloud for the normalization scale.
    std::vector<Vec3> pred_region, gt_region, gt_all;
    // Paired points restricted to the region, for the fixed-sample protocol.
    std::vector<Vec3> paired_pred_region, paired_gt_region;

    for (int h = 0; h < gt.height; ++h) {
        for (int w = 0; w < gt.width; ++w) {
            for (int l = 0; l < gt.layers; ++l) {
                const bool in_pred = pred_mask.at(h, w, l);
                const bool in_gt = gt_mask.at(h, w, l);
                const bool in_region = detail::layer_in_region(l, options.region);
                if (in_gt) gt_all.push_back(gt.point(h, w, l));
                if (in_pred && in_gt) {
                    paired_pred.push_back(pred.point(h, w, l));
                    paired_gt.push_back(gt.point(h, w, l));
                    if (in_region) {
                        paired_pred_region.push_back(paired_pred.back());
                        paired_gt_region.push_back(paired_gt.back());
                    }
                }
                if (in_pred && in_region) pred_region.push_back(pred.point(h, w, l));
                if (in_gt && in_region) gt_region.push_back(gt.point(h, w, l));
            }
        }
    }

    if (gt_region.empty())
        throw Error(ErrorCode::EmptyRegion,
                    std::string("gt has no points in region ") + region_name(options.region));

    MetricsReport report;
    report.region = options.region;

    // Fewer than 2 paired pixels leaves scale-shift alignment undefined; the
    // default identity alignment is used so region metrics still evaluate.
    if (paired_pred.size() >= 2) report.alignment = scale_shift_align(paired_pred, paired_gt);

    const double diagonal = detail::bbox_diagonal(gt_all);
    const double norm_scale = (options.normalize && diagonal > 0.0) ? 1.0 / diagonal : 1.0;

    std::vector<Vec3> pred_cloud, gt_cloud;
    if (options.fixed_sample) {
        pred_cloud = std::move(paired_pred_region);
        gt_cloud = std::move(paired_gt_region);
    } else {
        pred_cloud = std::move(pred_region);
        gt_cloud = std::move(gt_region);
    }

    if (pred_cloud.empty()) {
        report.empty_prediction = true;
        report.cd = std::numeric_limits<double>::infinity();
        report.n_pred = 0;
        report.n_gt = gt_cloud.empty() ? 0 : options.n_samples;
        for (double tau : options.thresholds) report.fs[tau] = 0.0;
        return report;
    }

    for (Vec3& p : pred_cloud) p = report.alignment.apply(p) * norm_scale;
    for (Vec3& p : gt_cloud) p *= norm_scale;

    std::vector<Vec3> pred_sample, gt_sample;
    if (options.fixed_sample) {
        // One index draw reused for both clouds keeps the pairs intact.
        std::vector<Vec3> stacked(pred_cloud.size());
        for (std::size_t i = 0; i < pred_cloud.size(); ++i) stacked[i] = {double(i), 0.0, 0.0};
        const std::vector<Vec3> picks = sample_points(stacked, options.n_samples, options.seed);
        pred_sample.reserve(picks.size());
        gt_sample.reserve(picks.size());
        for (const Vec3& pick : picks) {
            const std::size_t i = std::size_t(pick.x);
            pred_sample.push_back(pred_cloud[i]);
            gt_sample.push_back(gt_cloud[i]);
        }
    } else {
        pred_sample = sample_points(pred_cloud, options.n_samples, options.seed);
        gt_sample = sample_points(gt_cloud, options.n_samples, options.seed);
    }

    report.cd = chamfer(pred_sample, gt_sample);
    for (double tau : options.thresholds) report.fs[tau] = fscore(pred_sample, gt_sample, tau);
    report.n_pred = pred_sample.size();
    report.n_gt = gt_sample.size();
    return report;
}

/// Cloud-prediction overload: the cloud must be index-paired with the gt
/// mask selection (same order as select_points under gt_mask).
inline MetricsReport evaluate_view_aligned(const std::vector<Vec3>& pred_cloud, const LariMap& gt,
                                           const IntersectionMask& gt_mask,
                                           const EvaluateOptions& options = {}) {
    if (pred_cloud.size() != gt_mask.count())
        throw Error(ErrorCode::ShapeMismatch,
                    "prediction cloud length does not match the gt mask selection");
    LariMap pred(gt.height, gt.width, gt.layers);
    std::size_t next = 0;
    for (int h = 0; h < gt.height; ++h)
        for (int w = 0; w < gt.width; ++w)
            for (int l = 0; l < gt.layers; ++l)
                if (gt_mask.at(h, w, l)) pred.set_point(h, w, l, pred_cloud[next++]);
    return evaluate_view_aligned(pred, gt_mask, gt, gt_mask, options);
}

struct CanonicalEvaluateOptions {
    std::size_t n_samples = 10000;
    std::vector<double> thresholds = {0.1, 0.05, 0.02};
    uint64_t seed = 0;
    bool normalize = true;
    CanonicalRegisterParams registration;
};

/// Pose-free evaluation: sample both clouds, normalize each bounding-box
/// diagonal to 1 (gt defines the metric frame; pre-scaling the prediction
/// conditions the search), then brute-force rotations + trimmed ICP.
inline CanonicalResult evaluate_canonical(const std::vector<Vec3>& pred,
                                          const std::vector<Vec3>& gt,
                                          const CanonicalEvaluateOptions& options = {}) {
    std::vector<Vec3> pred_sample = sample_points(pred, options.n_samples, options.seed);
    std::vector<Vec3> gt_sample = sample_points(gt, options.n_samples, options.seed);
    if (options.normalize) {
        const double pred_diag = detail::bbox_diagonal(pred_sample);
        const double gt_diag = detail::bbox_diagonal(gt_sample);
        if (pred_diag > 0.0)
            for (Vec3& p : pred_sample) p *= 1.0 / pred_diag;
        if (gt_diag > 0.0)
            for (Vec3& p : gt_sample) p *= 1.0 / gt_diag;
    }
    CanonicalRegisterParams params = options.registration;
    params.thresholds = options.thresholds;
    CanonicalResult result = canonical_register(pred_sample, gt_sample, params);
    result.report.alignment.s = result.transform.scale;
    result.report.alignment.t = result.transform.translation.z;
    return result;
}

}  // namespace lari
