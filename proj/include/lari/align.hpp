#pragma once

#include <cmath>
#include <vector>

#include "lari/error.hpp"
#include "lari/lari_map.hpp"
#include "lari/vec.hpp"

namespace lari {

/// Least-squares global scale plus z-only shift mapping a prediction onto
/// ground truth.
struct AlignmentResult {
    double s = 1.0;            // scale applied to x, y, z
    double t = 0.0;            // shift applied to z only
    double residual_rms = 0.0;

    Vec3 apply(const Vec3& p) const { return {s * p.x, s * p.y, s * p.z + t}; }
};

/// Solves argmin_{s,t} sum ||s*p + t*zhat - g||^2 over index-paired points via
/// the 2x2 normal equations
///   [sum||p||^2  sum p_z] [s]   [sum <p,g>]
///   [sum p_z     N      ] [t] = [sum g_z  ].
/// Throws DegenerateSystem when the system is singular (condition > 1e12),
/// e.g. all points at the origin or fewer than two correspondences.
inline AlignmentResult scale_shift_align(const std::vector<Vec3>& pred,
                                         const std::vector<Vec3>& gt) {
    if (pred.size() != gt.size())
        throw Error(ErrorCode::ShapeMismatch, "point lists differ in length");
    if (pred.size() < 2)
        throw Error(ErrorCode::DegenerateSystem, "need at least 2 correspondences");

    double a = 0.0;  // sum ||p||^2
    double c = 0.0;  // sum p_z
    double b = 0.0;  // sum <p, g>
    double d = 0.0;  // sum g_z
    const double n = double(pred.size());
    for (std::size_t i = 0; i < pred.size(); ++i) {
        a += norm_squared(pred[i]);
        c += pred[i].z;
        b += dot(pred[i], gt[i]);
        d += gt[i].z;
    }

    // Condition number of the symmetric 2x2 [a c; c n].
    const double half_trace = 0.5 * (a + n);
    const double disc = std::sqrt(0.25 * (a - n) * (a - n) + c * c);
    const double lambda_max = half_trace + disc;
    const double lambda_min = half_trace - disc;
    if (!(lambda_min > 0.0) || lambda_max > 1e12 * lambda_min)
        throw Error(ErrorCode::DegenerateSystem, "scale-shift normal equations are singular");

    const double det = a * n - c * c;
    AlignmentResult result;
    result.s = (b * n - c * d) / det;
    result.t = (a * d - c * b) / det;

    double sq = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i)
        sq += norm_squared(result.apply(pred[i]) - gt[i]);
    result.residual_rms = std::sqrt(sq / n);
    return result;
}

/// Scale-shift aligned mean Euclidean error over mask-selected points.
inline double lari_loss(const LariMap& pred, const LariMap& gt, const IntersectionMask& mask) {
    if (!pred.same_shape(gt))
        throw Error(ErrorCode::ShapeMismatch, "prediction and ground truth shapes differ");
    const std::vector<Vec3> p = select_points(pred, mask);
    const std::vector<Vec3> g = select_points(gt, mask);
    const AlignmentResult alignment = scale_shift_align(p, g);
    double total = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) total += norm(alignment.apply(p[i]) - g[i]);
    return total / double(p.size());
}

/// Mean over pixels of -log softmax(S)[C_gt], computed with the stable
/// log-sum-exp form.
inline double cross_entropy_index_loss(const StoppingLogits& logits,
                                       const StoppingIndexMap& index) {
    if (logits.height != index.height || logits.width != index.width)
        throw Error(ErrorCode::ShapeMismatch, "logits and index shapes differ");
    if (logits.channels < 1)
        throw Error(ErrorCode::ShapeMismatch, "logits need at least one channel");

    double total = 0.0;
    for (int h = 0; h < logits.height; ++h) {
        for (int w = 0; w < logits.width; ++w) {
            const int c_true = index.at(h, w);
            if (c_true >= logits.channels)
                throw Error(ErrorCode::IndexOutOfRange, "stopping index exceeds logit channels");
            double max_logit = -std::numeric_limits<double>::infinity();
            for (int c = 0; c < logits.channels; ++c) {
                const double v = logits.at(h, w, c);
                if (!std::isfinite(v))
                    throw Error(ErrorCode::NonFiniteLogits, "logit is not finite");
                max_logit = std::max(max_logit, v);
            }
            double sum_exp = 0.0;
            for (int c = 0; c < logits.channels; ++c)
                sum_exp += std::exp(logits.at(h, w, c) - max_logit);
            total += max_logit + std::log(sum_exp) - logits.at(h, w, c_true);
        }
    }
    return total / (double(logits.height) * double(logits.width));
}

}  // namespace lari
