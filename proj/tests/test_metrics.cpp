#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "lari/kdtree.hpp"
#include "lari/metrics.hpp"
#include "oracles.hpp"
#include "test_meshes.hpp"

using namespace lari;

TEST(Chamfer, HandCases) {
    const std::vector<Vec3> a{{0, 0, 0}};
    const std::vector<Vec3> b{{1, 0, 0}};
    EXPECT_DOUBLE_EQ(chamfer(a, b), 1.0);

    // Asymmetric sizes: a->b mean is 0, b->a mean is (0 + 2)/2 = 1.
    const std::vector<Vec3> c{{0, 0, 0}};
    const std::vector<Vec3> d{{0, 0, 0}, {2, 0, 0}};
    EXPECT_DOUBLE_EQ(chamfer(c, d), 0.5);
}

TEST(Chamfer, ZeroOnIdenticalClouds) {
    const std::vector<Vec3> cloud = testmesh::random_cloud(400, 7);
    EXPECT_EQ(chamfer(cloud, cloud), 0.0);
}

TEST(Chamfer, ThrowsOnEmpty) {
    const std::vector<Vec3> cloud{{1, 2, 3}};
    EXPECT_THROW(chamfer({}, cloud), Error);
    EXPECT_THROW(chamfer(cloud, {}), Error);
}

TEST(Chamfer, MatchesBruteForce) {
    for (uint64_t seed = 0; seed < 20; ++seed) {
        testmesh::TestRng rng(seed);
        const std::size_t na = 2 + rng.next() % 300;
        const std::size_t nb = 2 + rng.next() % 300;
        const std::vector<Vec3> a = testmesh::random_cloud(na, seed * 2 + 1);
        const std::vector<Vec3> b = testmesh::random_cloud(nb, seed * 2 + 2, 1.5);
        EXPECT_NEAR(chamfer(a, b), oracle::chamfer(a, b), 1e-12);
    }
}

TEST(Fscore, HandCases) {
    // One of two predicted points is close: precision 1/2, recall 1.
    const std::vector<Vec3> pred{{0, 0, 0}, {10, 0, 0}};
    const std::vector<Vec3> gt{{0, 0, 0}};
    EXPECT_DOUBLE_EQ(fscore(pred, gt, 0.5), 2.0 * 0.5 * 1.0 / 1.5);

    // Clouds further apart than tau in every pairing: F-score 0, not NaN.
    const std::vector<Vec3> far{{100, 0, 0}};
    EXPECT_DOUBLE_EQ(fscore(far, gt, 0.5), 0.0);
}

TEST(Fscore, OneOnIdenticalClouds) {
    const std::vector<Vec3> cloud = testmesh::random_cloud(200, 12);
    for (double tau : {0.1, 0.05, 0.02}) EXPECT_DOUBLE_EQ(fscore(cloud, cloud, tau), 1.0);
}

TEST(Fscore, MatchesBruteForce) {
    for (uint64_t seed = 0; seed < 20; ++seed) {
        const std::vector<Vec3> a = testmesh::random_cloud(150, seed * 2 + 50);
        const std::vector<Vec3> b = testmesh::random_cloud(170, seed * 2 + 51);
        for (double tau : {0.1, 0.5, 1.0})
            EXPECT_NEAR(fscore(a, b, tau), oracle::fscore(a, b, tau), 1e-12);
    }
}

TEST(Fscore, RejectsBadInputs) {
    const std::vector<Vec3> cloud{{1, 2, 3}};
    EXPECT_THROW(fscore(cloud, cloud, 0.0), Error);
    EXPECT_THROW(fscore(cloud, cloud, -1.0), Error);
    EXPECT_THROW(fscore({}, cloud, 0.1), Error);
}

TEST(KdTree, MatchesBruteForceNearest) {
    for (uint64_t seed = 0; seed < 5; ++seed) {
        const std::vector<Vec3> cloud = testmesh::random_cloud(1000, seed + 5);
        const KdTree tree(cloud);
        testmesh::TestRng rng(seed + 99);
        for (int q = 0; q < 200; ++q) {
            const Vec3 query = rng.point(-1.2, 1.2);
            const KdTree::Nearest fast = tree.nearest(query);
            const oracle::NearestResult slow = oracle::nearest(cloud, query);
            EXPECT_DOUBLE_EQ(fast.dist2, slow.dist2);
        }
    }
}

TEST(SamplePoints, DeterministicAndSeedSensitive) {
    const std::vector<Vec3> cloud = testmesh::random_cloud(500, 3);
    const std::vector<Vec3> a = sample_points(cloud, 100, 42);
    const std::vector<Vec3> b = sample_points(cloud, 100, 42);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_TRUE(a[i] == b[i]);

    const std::vector<Vec3> c = sample_points(cloud, 100, 43);
    bool any_difference = false;
    for (std::size_t i = 0; i < c.size(); ++i) any_difference |= !(a[i] == c[i]);
    EXPECT_TRUE(any_difference);
}

TEST(SamplePoints, WithoutReplacementIsDistinctSubset) {
    // Distinct coordinates per point, so value equality identifies the source.
    std::vector<Vec3> cloud;
    for (int i = 0; i < 300; ++i) cloud.push_back({double(i), 0.0, 0.0});
    const std::vector<Vec3> sample = sample_points(cloud, 120, 7);
    ASSERT_EQ(sample.size(), 120u);
    std::vector<double> xs;
    for (const Vec3& p : sample) {
        EXPECT_GE(p.x, 0.0);
        EXPECT_LT(p.x, 300.0);
        EXPECT_EQ(p.x, std::floor(p.x));
        xs.push_back(p.x);
    }
    std::sort(xs.begin(), xs.end());
    EXPECT_TRUE(std::adjacent_find(xs.begin(), xs.end()) == xs.end());
}

TEST(SamplePoints, FullDrawIsPermutation) {
    std::vector<Vec3> cloud;
    for (int i = 0; i < 64; ++i) cloud.push_back({double(i), 1.0, 2.0});
    std::vector<Vec3> sample = sample_points(cloud, 64, 11);
    auto by_x = [](const Vec3& a, const Vec3& b) { return a.x < b.x; };
    std::sort(sample.begin(), sample.end(), by_x);
    for (int i = 0; i < 64; ++i) EXPECT_EQ(sample[std::size_t(i)].x, double(i));
}

TEST(SamplePoints, OverdrawSamplesWithReplacement) {
    std::vector<Vec3> cloud;
    for (int i = 0; i < 10; ++i) cloud.push_back({double(i), 0.0, 0.0});
    const std::vector<Vec3> sample = sample_points(cloud, 200, 5);
    ASSERT_EQ(sample.size(), 200u);
    for (const Vec3& p : sample) {
        EXPECT_GE(p.x, 0.0);
        EXPECT_LE(p.x, 9.0);
    }
}

TEST(SamplePoints, DrawFrequenciesAreUnbiased) {
    // Half the cloud sits at x = -1, half at x = +1; the sampled fraction
    // must stay within 3 sigma of one half, both with and without
    // replacement.
    std::vector<Vec3> cloud;
    for (int i = 0; i < 2000; ++i) cloud.push_back({i < 1000 ? -1.0 : 1.0, 0.0, 0.0});

    const std::vector<Vec3> without = sample_points(cloud, 500, 17);
    std::size_t low = 0;
    for (const Vec3& p : without) low += (p.x < 0.0);
    // Hypergeometric: sigma = sqrt(n p (1-p) (N-n)/(N-1)) ~ 9.7.
    EXPECT_NEAR(double(low), 250.0, 3.0 * 9.7);

    const std::vector<Vec3> with = sample_points(cloud, 5000, 18);
    low = 0;
    for (const Vec3& p : with) low += (p.x < 0.0);
    // Binomial: sigma = sqrt(n/4) ~ 35.4.
    EXPECT_NEAR(double(low), 2500.0, 3.0 * 35.4);
}

TEST(SamplePoints, ThrowsOnEmptyCloud) {
    EXPECT_THROW(sample_points({}, 10, 0), Error);
}

TEST(MaskMetrics, IdenticalMasksScoreOne) {
    IntersectionMask mask(4, 4, 3);
    testmesh::TestRng rng(21);
    for (int h = 0; h < 4; ++h)
        for (int w = 0; w < 4; ++w)
            for (int l = 0; l < 3; ++l) mask.set(h, w, l, rng.next() % 2 == 0);
    const auto [miou, dice] = mask_metrics(mask, mask);
    EXPECT_DOUBLE_EQ(miou, 1.0);
    EXPECT_DOUBLE_EQ(dice, 1.0);
}

TEST(MaskMetrics, EmptyPredictionScoresZero) {
    IntersectionMask pred(2, 2, 2);
    IntersectionMask gt(2, 2, 2);
    gt.set(0, 0, 0, true);
    gt.set(1, 1, 0, true);
    const auto [miou, dice] = mask_metrics(pred, gt);
    EXPECT_DOUBLE_EQ(miou, 0.0);
    EXPECT_DOUBLE_EQ(dice, 0.0);
}

TEST(MaskMetrics, HalfOverlapCase) {
    // Layer 0: pred covers pixels {0, 1}, gt covers {1, 2}.
    // Intersection 1, union 3 -> IoU 1/3; DICE 2*1/(2+2) = 1/2.
    IntersectionMask pred(1, 4, 1);
    IntersectionMask gt(1, 4, 1);
    pred.set(0, 0, 0, true);
    pred.set(0, 1, 0, true);
    gt.set(0, 1, 0, true);
    gt.set(0, 2, 0, true);
    const auto [miou, dice] = mask_metrics(pred, gt);
    EXPECT_DOUBLE_EQ(miou, 1.0 / 3.0);
    EXPECT_DOUBLE_EQ(dice, 0.5);
}

TEST(MaskMetrics, LayersWithEmptyUnionAreSkipped) {
    // Same overlap as above plus an all-empty layer: mIoU must not change.
    IntersectionMask pred(1, 4, 2);
    IntersectionMask gt(1, 4, 2);
    pred.set(0, 0, 0, true);
    pred.set(0, 1, 0, true);
    gt.set(0, 1, 0, true);
    gt.set(0, 2, 0, true);
    const auto [miou, dice] = mask_metrics(pred, gt);
    EXPECT_DOUBLE_EQ(miou, 1.0 / 3.0);
    EXPECT_DOUBLE_EQ(dice, 0.5);
}

TEST(MaskMetrics, CorruptionNeverBeatsExactMatch) {
    IntersectionMask gt(8, 8, 2);
    testmesh::TestRng rng(31);
    for (int h = 0; h < 8; ++h)
        for (int w = 0; w < 8; ++w)
            for (int l = 0; l < 2; ++l) gt.set(h, w, l, rng.next() % 3 != 0);

    const auto [perfect_miou, perfect_dice] = mask_metrics(gt, gt);
    for (int flips = 1; flips <= 16; flips += 5) {
        IntersectionMask corrupted = gt;
        for (int f = 0; f < flips; ++f) {
            const int h = int(rng.next() % 8), w = int(rng.next() % 8),
                      l = int(rng.next() % 2);
            corrupted.set(h, w, l, !corrupted.at(h, w, l));
        }
        const auto [miou, dice] = mask_metrics(corrupted, gt);
        EXPECT_LE(miou, perfect_miou);
        EXPECT_LE(dice, perfect_dice);
    }
}

TEST(MaskMetrics, ShapeMismatchThrows) {
    IntersectionMask a(2, 2, 2), b(2, 2, 3);
    EXPECT_THROW(mask_metrics(a, b), Error);
}

TEST(ReportJson, QuotesNonFiniteNumbers) {
    MetricsReport report;
    report.cd = std::numeric_limits<double>::infinity();
    report.fs[0.1] = 0.0;
    report.region = Region::Unseen;
    const std::string line = report_json_line("img_01", report);
    EXPECT_NE(line.find("\"cd\": \"inf\""), std::string::npos);
    EXPECT_NE(line.find("\"image_id\": \"img_01\""), std::string::npos);
    EXPECT_NE(line.find("\"region\": \"unseen\""), std::string::npos);
    EXPECT_NE(line.find("\"fs@0.1\": 0"), std::string::npos);
}

TEST(ReportJson, PlainNumbersStayUnquoted) {
    MetricsReport report;
    report.cd = 0.25;
    report.fs[0.05] = 1.0;
    report.n_pred = 10;
    report.n_gt = 20;
    const std::string line = report_json_line("x", report);
    EXPECT_NE(line.find("\"cd\": 0.25"), std::string::npos);
    EXPECT_NE(line.find("\"fs@0.05\": 1"), std::string::npos);
    EXPECT_NE(line.find("\"n_pred\": 10"), std::string::npos);
    EXPECT_NE(line.find("\"n_gt\": 20"), std::string::npos);
    EXPECT_EQ(line.find("\"0.25\""), std::string::npos);
}
