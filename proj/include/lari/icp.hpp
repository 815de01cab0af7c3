#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "lari/error.hpp"
#include "lari/kdtree.hpp"
#include "lari/metrics.hpp"
#include "lari/vec.hpp"

namespace lari {

namespace detail {

/// Cyclic Jacobi eigendecomposition of a small symmetric matrix.
/// Returns eigenvalues (ascending) and matching eigenvector columns.
template <int N>
struct SymmetricEigen {
    std::array<double, N> values{};
    std::array<std::array<double, N>, N> vectors{};  // vectors[c] is the c-th eigenvector

    explicit SymmetricEigen(std::array<std::array<double, N>, N> a) {
        std::array<std::array<double, N>, N> v{};
        for (int i = 0; i < N; ++i) v[i][i] = 1.0;

        for (int sweep = 0; sweep < 64; ++sweep) {
            double off = 0.0;
            for (int p = 0; p < N; ++p)
                for (int q = p + 1; q < N; ++q) off += a[p][q] * a[p][q];
            if (off < 1e-30) break;

            for (int p = 0; p < N; ++p) {
                for (int q = p + 1; q < N; ++q) {
                    if (std::abs(a[p][q]) < 1e-300) continue;
                    const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                    const double t = (theta >= 0 ? 1.0 : -1.0) /
                                     (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                    const double c = 1.0 / std::sqrt(t * t + 1.0);
                    const double s = t * c;
                    for (int k = 0; k < N; ++k) {
                        const double akp = a[k][p], akq = a[k][q];
                        a[k][p] = c * akp - s * akq;
                        a[k][q] = s * akp + c * akq;
                    }
                    for (int k = 0; k < N; ++k) {
                        const double apk = a[p][k], aqk = a[q][k];
                        a[p][k] = c * apk - s * aqk;
                        a[q][k] = s * apk + c * aqk;
                    }
                    for (int k = 0; k < N; ++k) {
                        const double vkp = v[k][p], vkq = v[k][q];
                        v[k][p] = c * vkp - s * vkq;
                        v[k][q] = s * vkp + c * vkq;
                    }
                }
            }
        }

        std::array<int, N> order{};
        for (int i = 0; i < N; ++i) order[i] = i;
        std::sort(order.begin(), order.end(), [&](int x, int y) { return a[x][x] < a[y][y]; });
        for (int i = 0; i < N; ++i) {
            values[i] = a[order[i]][order[i]];
            for (int k = 0; k < N; ++k) vectors[i][k] = v[k][order[i]];
        }
    }
};

inline Mat3 quaternion_to_matrix(double w, double x, double y, double z) {
    const double n = std::sqrt(w * w + x * x + y * y + z * z);
    w /= n; x /= n; y /= n; z /= n;
    Mat3 r;
    r(0, 0) = 1 - 2 * (y * y + z * z);
    r(0, 1) = 2 * (x * y - w * z);
    r(0, 2) = 2 * (x * z + w * y);
    r(1, 0) = 2 * (x * y + w * z);
    r(1, 1) = 1 - 2 * (x * x + z * z);
    r(1, 2) = 2 * (y * z - w * x);
    r(2, 0) = 2 * (x * z - w * y);
    r(2, 1) = 2 * (y * z + w * x);
    r(2, 2) = 1 - 2 * (x * x + y * y);
    return r;
}

/// Horn's closed-form rotation maximizing sum <dst_i, R src_i> for centered
/// correspondences, via the dominant eigenvector of the quaternion matrix.
inline Mat3 horn_rotation(const std::vector<Vec3>& src_centered,
                          const std::vector<Vec3>& dst_centered) {
    double sxx = 0, sxy = 0, sxz = 0, syx = 0, syy = 0, syz = 0, szx = 0, szy = 0, szz = 0;
    for (std::size_t i = 0; i < src_centered.size(); ++i) {
        const Vec3& p = src_centered[i];
        const Vec3& q = dst_centered[i];
        sxx += p.x * q.x; sxy += p.x * q.y; sxz += p.x * q.z;
        syx += p.y * q.x; syy += p.y * q.y; syz += p.y * q.z;
        szx += p.z * q.x; szy += p.z * q.y; szz += p.z * q.z;
    }

    std::array<std::array<double, 4>, 4> n{};
    n[0] = {sxx + syy + szz, syz - szy, szx - sxz, sxy - syx};
    n[1] = {syz - szy, sxx - syy - szz, sxy + syx, szx + sxz};
    n[2] = {szx - sxz, sxy + syx, -sxx + syy - szz, syz + szy};
    n[3] = {sxy - syx, szx + sxz, syz + szy, -sxx - syy + szz};

    const SymmetricEigen<4> eigen(n);
    const auto& q = eigen.vectors[3];  // dominant eigenvalue is last (ascending order)
    return quaternion_to_matrix(q[0], q[1], q[2], q[3]);
}

}  // namespace detail

/// Closed-form least-squares similarity (or rigid, when with_scale is false)
/// transform mapping src onto dst, index-paired. Throws DegenerateCovariance
/// when the correspondences are collinear or coincident.
inline RigidTransform fit_similarity(const std::vector<Vec3>& src, const std::vector<Vec3>& dst,
                                     bool with_scale = true) {
    if (src.size() != dst.size())
        throw Error(ErrorCode::ShapeMismatch, "correspondence lists differ in length");
    if (src.size() < 3)
        throw Error(ErrorCode::DegenerateCovariance, "need at least 3 correspondences");

    const double inv_n = 1.0 / double(src.size());
    Vec3 centroid_src{0, 0, 0}, centroid_dst{0, 0, 0};
    for (std::size_t i = 0; i < src.size(); ++i) {
        centroid_src += src[i];
        centroid_dst += dst[i];
    }
    centroid_src *= inv_n;
    centroid_dst *= inv_n;

    std::vector<Vec3> p(src.size()), q(src.size());
    double src_var = 0.0;
    std::array<std::array<double, 3>, 3> cov{};
    for (std::size_t i = 0; i < src.size(); ++i) {
        p[i] = src[i] - centroid_src;
        q[i] = dst[i] - centroid_dst;
        src_var += norm_squared(p[i]);
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c) cov[r][c] += p[i][r] * p[i][c];
    }
    if (src_var <= 0.0)
        throw Error(ErrorCode::DegenerateCovariance, "source correspondences are coincident");

    // Collinear sources leave the rotation about their axis unconstrained.
    const detail::SymmetricEigen<3> spread(cov);
    if (spread.values[1] <= 1e-12 * std::max(spread.values[2], 1e-300))
        throw Error(ErrorCode::DegenerateCovariance, "correspondences are collinear");

    RigidTransform t;
    t.rotation = detail::horn_rotation(p, q);
    if (with_scale) {
        double corr = 0.0;
        for (std::size_t i = 0; i < src.size(); ++i) corr += dot(q[i], t.rotation * p[i]);
        if (corr <= 0.0)
            throw Error(ErrorCode::DegenerateCovariance, "non-positive optimal scale");
        t.scale = corr / src_var;
    }
    t.translation = centroid_dst - t.scale * (t.rotation * centroid_src);
    return t;
}

struct TrimmedIcpParams {
    int max_iterations = 100;
    double overlap = 0.8;    // fraction of best correspondences kept each iteration
    double rel_tol = 1e-6;   // stop when the trimmed residual change falls below this
    bool with_scale = true;
};

struct TrimmedIcpResult {
    RigidTransform transform;
    double residual = 0.0;                 // trimmed RMS at the returned transform
    std::vector<double> residual_history;  // one entry per iteration, non-increasing
    bool converged = false;
};

/// Trimmed iterative closest point: nearest-neighbor correspondences, keep
/// the best overlap fraction, closed-form similarity refit. The trimmed
/// residual is monotone non-increasing; non-convergence returns the best
/// transform found rather than failing. This overload takes a caller-built
/// tree over dst, for searches that run many initializations against one
/// fixed destination cloud.
inline TrimmedIcpResult trimmed_icp(const std::vector<Vec3>& src, const std::vector<Vec3>& dst,
                                    const KdTree& dst_tree, const RigidTransform& init,
                                    const TrimmedIcpParams& params = {}) {
    if (src.size() < 3 || dst.size() < 3)
        throw Error(ErrorCode::InvalidArgument, "trimmed_icp needs at least 3 points per cloud");
    if (!(params.overlap > 0.0 && params.overlap <= 1.0))
        throw Error(ErrorCode::InvalidArgument, "overlap must be in (0, 1]");
    init.validate();

    const std::size_t keep =
        std::max<std::size_t>(3, std::size_t(std::llround(params.overlap * double(src.size()))));

    TrimmedIcpResult result;
    result.transform = init;
    double best_residual = std::numeric_limits<double>::infinity();
    double prev_residual = std::numeric_limits<double>::infinity();

    struct Pair {
        double dist2;
        uint32_t src_index;
        uint32_t dst_index;
    };
    std::vector<Pair> pairs(src.size());
    std::vector<Vec3> kept_src, kept_dst;
    kept_src.reserve(keep);
    kept_dst.reserve(keep);

    for (int iteration = 0; iteration < params.max_iterations; ++iteration) {
        for (std::size_t i = 0; i < src.size(); ++i) {
            const Vec3 x = result.transform.apply(src[i]);
            const KdTree::Nearest nn = dst_tree.nearest(x);
            pairs[i] = {nn.dist2, uint32_t(i), nn.index};
        }
        const std::size_t k = std::min(keep, pairs.size());
        std::nth_element(pairs.begin(), pairs.begin() + (k - 1), pairs.end(),
                         [](const Pair& a, const Pair& b) {
                             return a.dist2 < b.dist2 ||
                                    (a.dist2 == b.dist2 && a.src_index < b.src_index);
                         });

        double sq = 0.0;
        for (std::size_t i = 0; i < k; ++i) sq += pairs[i].dist2;
        const double residual = std::sqrt(sq / double(k));
        result.residual_history.push_back(residual);
        if (residual < best_residual) best_residual = residual;

        if (residual <= 1e-15 ||
            (std::isfinite(prev_residual) &&
             std::abs(prev_residual - residual) <= params.rel_tol * std::max(prev_residual, 1e-12))) {
            result.converged = true;
            break;
        }
        prev_residual = residual;

        kept_src.clear();
        kept_dst.clear();
        for (std::size_t i = 0; i < k; ++i) {
            kept_src.push_back(src[pairs[i].src_index]);
            kept_dst.push_back(dst[pairs[i].dst_index]);
        }
        result.transform = fit_similarity(kept_src, kept_dst, params.with_scale);
    }

    result.residual = result.residual_history.empty() ? 0.0 : result.residual_history.back();
    return result;
}

inline TrimmedIcpResult trimmed_icp(const std::vector<Vec3>& src, const std::vector<Vec3>& dst,
                                    const RigidTransform& init,
                                    const TrimmedIcpParams& params = {}) {
    if (dst.size() < 3)
        throw Error(ErrorCode::InvalidArgument, "trimmed_icp needs at least 3 points per cloud");
    return trimmed_icp(src, dst, KdTree(dst), init, params);
}

/// Evenly spaced rotation initializations: n_yaw azimuths starting at 0
/// crossed with n_pitch elevations on uniform steps starting at -90, so
/// pure-azimuth rotations stay in the grid.
inline std::vector<Mat3> rotation_grid(int n_yaw, int n_pitch) {
    std::vector<Mat3> grid;
    grid.reserve(std::size_t(n_yaw) * n_pitch);
    for (int j = 0; j < n_pitch; ++j) {
        const double pitch = -90.0 + 180.0 * j / double(n_pitch);
        const Mat3 rp = rotation_about_axis({1, 0, 0}, degrees_to_radians(pitch));
        for (int i = 0; i < n_yaw; ++i) {
            const double yaw = 360.0 * i / double(n_yaw);
            grid.push_back(rotation_about_axis({0, 1, 0}, degrees_to_radians(yaw)) * rp);
        }
    }
    return grid;
}

struct CanonicalRegisterParams {
    int n_yaw = 24;
    int n_pitch = 4;
    TrimmedIcpParams icp;
    std::vector<double> thresholds = {0.1, 0.05, 0.02};
};

struct CanonicalResult {
    RigidTransform transform;
    MetricsReport report;
    int failed_initializations = 0;
    int total_initializations = 0;
};

/// Brute-force rotation search with trimmed ICP refinement: every grid
/// rotation seeds an ICP run (centroids matched), the transform with the
/// lowest post-ICP Chamfer distance wins.
inline CanonicalResult canonical_register(const std::vector<Vec3>& pred,
                                          const std::vector<Vec3>& gt,
                                          const CanonicalRegisterParams& params = {}) {
    if (pred.size() < 3 || gt.size() < 3)
        throw Error(ErrorCode::InvalidArgument, "canonical_register needs at least 3 points");

    Vec3 centroid_pred{0, 0, 0}, centroid_gt{0, 0, 0};
    for (const Vec3& p : pred) centroid_pred += p;
    for (const Vec3& p : gt) centroid_gt += p;
    centroid_pred *= 1.0 / double(pred.size());
    centroid_gt *= 1.0 / double(gt.size());

    const std::vector<Mat3> grid = rotation_grid(params.n_yaw, params.n_pitch);
    CanonicalResult result;
    result.total_initializations = int(grid.size());

    const KdTree gt_tree(gt);
    bool found = false;
    double best_cd = std::numeric_limits<double>::infinity();
    std::vector<Vec3> transformed(pred.size());
    for (const Mat3& rotation : grid) {
        RigidTransform init;
        init.rotation = rotation;
        init.translation = centroid_gt - rotation * centroid_pred;
        TrimmedIcpResult icp;
        try {
            icp = trimmed_icp(pred, gt, gt_tree, init, params.icp);
        } catch (const Error&) {
            ++result.failed_initializations;
            continue;
        }
        for (std::size_t i = 0; i < pred.size(); ++i)
            transformed[i] = icp.transform.apply(pred[i]);
        const double cd = chamfer(transformed, KdTree(transformed), gt, gt_tree);
        if (!found || cd < best_cd) {
            found = true;
            best_cd = cd;
            result.transform = icp.transform;
        }
    }
    if (!found)
        throw Error(ErrorCode::DegenerateCovariance,
                    "every rotation initialization failed during registration");

    for (std::size_t i = 0; i < pred.size(); ++i)
        transformed[i] = result.transform.apply(pred[i]);
    result.report.cd = best_cd;
    result.report.region = Region::Overall;
    result.report.n_pred = pred.size();
    result.report.n_gt = gt.size();
    for (double tau : params.thresholds)
        result.report.fs[tau] = fscore(transformed, gt, tau);
    return result;
}

}  // namespace lari
