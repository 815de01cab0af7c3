#include <gtest/gtest.h>

#include <cmath>

#include "lari/bvh.hpp"
#include "lari/error.hpp"
#include "lari/intersect.hpp"
#include "lari/mesh.hpp"
#include "lari/vec.hpp"
#include "oracles.hpp"
#include "test_meshes.hpp"

using namespace lari;

TEST(Vec3, BasicAlgebra) {
    const Vec3 a{1, 2, 3}, b{4, -5, 6};
    EXPECT_DOUBLE_EQ(dot(a, b), 1 * 4 + 2 * -5 + 3 * 6);
    const Vec3 c = cross(a, b);
    EXPECT_DOUBLE_EQ(dot(c, a), 0.0);
    EXPECT_DOUBLE_EQ(dot(c, b), 0.0);
    EXPECT_DOUBLE_EQ(norm(Vec3{3, 4, 0}), 5.0);
    EXPECT_DOUBLE_EQ(norm(normalized(b)), 1.0);
}

TEST(Mat3, RotationProperties) {
    const Mat3 r = rotation_about_axis({0, 1, 0}, degrees_to_radians(90.0));
    EXPECT_TRUE(is_rotation(r));
    // +z rotated 90 degrees about +y lands on +x.
    const Vec3 v = r * Vec3{0, 0, 1};
    EXPECT_NEAR(v.x, 1.0, 1e-12);
    EXPECT_NEAR(v.y, 0.0, 1e-12);
    EXPECT_NEAR(v.z, 0.0, 1e-12);
    EXPECT_NEAR(determinant(r), 1.0, 1e-12);

    const Mat3 product = r * transpose(r);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            EXPECT_NEAR(product(i, j), i == j ? 1.0 : 0.0, 1e-12);
}

TEST(Mat3, RotationAngleBetween) {
    const Mat3 a = rotation_about_axis({1, 0, 0}, 0.3);
    const Mat3 b = rotation_about_axis({1, 0, 0}, 0.3 + 0.25);
    EXPECT_NEAR(rotation_angle_between(a, b), 0.25, 1e-12);
}

TEST(RigidTransform, InverseAndCompose) {
    RigidTransform t;
    t.rotation = rotation_about_axis(normalized(Vec3{1, 2, 3}), 0.7);
    t.translation = {0.5, -1.0, 2.0};
    t.scale = 1.7;
    const RigidTransform inverse = t.inverse();
    const Vec3 p{0.3, 0.4, -0.9};
    const Vec3 round_trip = inverse.apply(t.apply(p));
    EXPECT_NEAR(round_trip.x, p.x, 1e-12);
    EXPECT_NEAR(round_trip.y, p.y, 1e-12);
    EXPECT_NEAR(round_trip.z, p.z, 1e-12);

    const RigidTransform composed = t * inverse;
    const Vec3 q = composed.apply(p);
    EXPECT_NEAR(q.x, p.x, 1e-12);
    EXPECT_NEAR(q.y, p.y, 1e-12);
    EXPECT_NEAR(q.z, p.z, 1e-12);
}

TEST(Mesh, DegenerateTrianglesDropped) {
    std::vector<Vec3> vertices = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {2, 0, 0}};
    std::vector<std::array<uint32_t, 3>> triangles = {
        {0, 1, 2},
        {0, 1, 3},  // collinear: zero area
        {1, 1, 2},  // repeated vertex
    };
    const TriangleMesh mesh = make_mesh(std::move(vertices), std::move(triangles));
    EXPECT_EQ(mesh.triangle_count(), 1u);
    EXPECT_EQ(mesh.dropped_degenerate, 2u);
    EXPECT_NEAR(norm(mesh.normals[0]), 1.0, 1e-12);
}

TEST(Mesh, OutOfRangeIndexThrows) {
    std::vector<Vec3> vertices = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}};
    std::vector<std::array<uint32_t, 3>> triangles = {{0, 1, 7}};
    try {
        make_mesh(std::move(vertices), std::move(triangles));
        FAIL() << "expected IndexOutOfRange";
    } catch (const Error& error) {
        EXPECT_EQ(error.code(), ErrorCode::IndexOutOfRange);
    }
}

TEST(RayTriangle, HitAndMiss) {
    const Vec3 a{-1, -1, 2}, b{1, -1, 2}, c{0, 1, 2};
    Ray ray;
    ray.origin = {0, 0, 0};
    ray.direction = {0, 0, 1};
    const auto t = ray_triangle(ray, a, b, c);
    ASSERT_TRUE(t.has_value());
    EXPECT_NEAR(*t, 2.0, 1e-12);

    ray.direction = normalized(Vec3{5, 0, 1});  // points far off the triangle
    EXPECT_FALSE(ray_triangle(ray, a, b, c).has_value());

    ray.direction = {1, 0, 0};  // parallel to the triangle plane
    EXPECT_FALSE(ray_triangle(ray, a, b, c).has_value());
}

TEST(RayTriangle, SharedEdgeRegistersOnBothTriangles) {
    // Two triangles sharing the edge x=0: a ray through the shared edge must
    // hit both (inclusive barycentric tolerance), so watertight seams leak
    // nothing and dedupe later collapses the duplicates.
    const Vec3 shared_a{0, -1, 2}, shared_b{0, 1, 2};
    const Vec3 left{-1, 0, 2}, right{1, 0, 2};
    Ray ray;
    ray.origin = {0, 0, 0};
    ray.direction = {0, 0, 1};
    const auto t_left = ray_triangle(ray, shared_a, shared_b, left);
    const auto t_right = ray_triangle(ray, shared_a, right, shared_b);
    ASSERT_TRUE(t_left.has_value());
    ASSERT_TRUE(t_right.has_value());
    EXPECT_NEAR(*t_left, 2.0, 1e-12);
    EXPECT_NEAR(*t_right, 2.0, 1e-12);
}

TEST(RayTriangle, RespectsTminTmax) {
    const Vec3 a{-1, -1, 2}, b{1, -1, 2}, c{0, 1, 2};
    Ray ray;
    ray.origin = {0, 0, 0};
    ray.direction = {0, 0, 1};
    ray.t_min = 3.0;
    EXPECT_FALSE(ray_triangle(ray, a, b, c).has_value());
    ray.t_min = 1e-6;
    ray.t_max = 1.5;
    EXPECT_FALSE(ray_triangle(ray, a, b, c).has_value());
}

TEST(Facing, FrontWhenNormalOpposesRay) {
    const TriangleMesh mesh = testmesh::cube({0, 0, 2}, 0.5);
    Ray ray;
    ray.origin = {0, 0, 0};
    ray.direction = {0, 0, 1};
    const Bvh bvh = build_bvh(mesh);
    const std::vector<Hit> hits = ray_all_hits(bvh, mesh, ray);
    const std::vector<Hit> deduped = dedupe_hits(hits, 1e-6);
    ASSERT_EQ(deduped.size(), 2u);
    EXPECT_EQ(deduped[0].facing, Facing::Front);
    EXPECT_EQ(deduped[1].facing, Facing::Back);
    EXPECT_NEAR(deduped[0].t, 1.5, 1e-12);
    EXPECT_NEAR(deduped[1].t, 2.5, 1e-12);
}

TEST(DedupeHits, CollapsesWithinEpsilon) {
    std::vector<Hit> hits;
    auto hit_at = [](double t, uint32_t id) {
        Hit h;
        h.t = t;
        h.triangle_id = id;
        h.point = {0, 0, t};
        h.facing = Facing::Front;
        return h;
    };
    hits.push_back(hit_at(1.0, 0));
    hits.push_back(hit_at(1.0 + 1e-9, 1));   // duplicate of the first
    hits.push_back(hit_at(1.0 + 5e-7, 2));   // still within epsilon of the kept hit
    hits.push_back(hit_at(1.0 + 2e-6, 3));   // a genuine second surface
    const std::vector<Hit> deduped = dedupe_hits(hits, 1e-6);
    ASSERT_EQ(deduped.size(), 2u);
    EXPECT_EQ(deduped[0].triangle_id, 0u);
    EXPECT_EQ(deduped[1].triangle_id, 3u);

    // Strictly increasing output gaps: every surviving pair is > epsilon apart.
    for (std::size_t i = 1; i < deduped.size(); ++i)
        EXPECT_GT(deduped[i].t - deduped[i - 1].t, 1e-6);
}

TEST(DedupeHits, EmptyAndSingle) {
    EXPECT_TRUE(dedupe_hits({}, 1e-6).empty());
    Hit h;
    h.t = 2.0;
    h.triangle_id = 7;
    EXPECT_EQ(dedupe_hits({h}, 1e-6).size(), 1u);
}

TEST(Bvh, EmptyMeshThrows) {
    TriangleMesh mesh;
    try {
        build_bvh(mesh);
        FAIL() << "expected EmptyMesh";
    } catch (const Error& error) {
        EXPECT_EQ(error.code(), ErrorCode::EmptyMesh);
    }
}

TEST(Bvh, MatchesBruteForceOnRandomScenes) {
    // Smaller version of the acceptance run: exact agreement in (t, id) lists.
    for (uint64_t seed = 0; seed < 8; ++seed) {
        const TriangleMesh mesh = testmesh::random_soup(100 + 50 * seed, seed);
        const Bvh bvh = build_bvh(mesh);
        testmesh::TestRng rng(seed * 977 + 13);
        for (int k = 0; k < 200; ++k) {
            Ray ray;
            ray.origin = rng.point(-2, 2);
            ray.direction = normalized(rng.point(-1, 1));
            const std::vector<Hit> fast = ray_all_hits(bvh, mesh, ray);
            const std::vector<Hit> slow = oracle::all_hits(mesh, ray);
            ASSERT_EQ(fast.size(), slow.size()) << "seed " << seed << " ray " << k;
            for (std::size_t i = 0; i < fast.size(); ++i) {
                EXPECT_EQ(fast[i].triangle_id, slow[i].triangle_id);
                EXPECT_NEAR(fast[i].t, slow[i].t, 1e-9);
            }
        }
    }
}

TEST(Bvh, DeterministicBuild) {
    const TriangleMesh mesh = testmesh::random_soup(500, 42);
    const Bvh a = build_bvh(mesh);
    const Bvh b = build_bvh(mesh);
    ASSERT_EQ(a.nodes.size(), b.nodes.size());
    ASSERT_EQ(a.prim_order, b.prim_order);
    for (std::size_t i = 0; i < a.nodes.size(); ++i) {
        EXPECT_EQ(a.nodes[i].left_or_first, b.nodes[i].left_or_first);
        EXPECT_EQ(a.nodes[i].count, b.nodes[i].count);
    }
}

TEST(Bvh, CoincidentCentroidsStillBuild) {
    // 64 triangles stacked with identical centroids: SAH cannot split them;
    // the builder must fall back to leaves instead of recursing forever.
    std::vector<Vec3> vertices;
    std::vector<std::array<uint32_t, 3>> triangles;
    for (int i = 0; i < 64; ++i) {
        const double z = 1.0 + 1e-4 * i;
        const uint32_t base = uint32_t(vertices.size());
        vertices.push_back({-1, -1, z});
        vertices.push_back({1, -1, z});
        vertices.push_back({0, 2, z});
        // Same centroid in x/y for every triangle; z differs only slightly.
        triangles.push_back({base, base + 1, base + 2});
    }
    const TriangleMesh mesh = make_mesh(std::move(vertices), std::move(triangles));
    const Bvh bvh = build_bvh(mesh);
    Ray ray;
    ray.origin = {0, 0, 0};
    ray.direction = {0, 0, 1};
    EXPECT_EQ(ray_all_hits(bvh, mesh, ray).size(), 64u);
}

TEST(Aabb, ExtendAndDiagonal) {
    Aabb box;
    EXPECT_TRUE(box.empty());
    box.extend({1, 2, 3});
    box.extend({-1, 0, 5});
    EXPECT_FALSE(box.empty());
    EXPECT_DOUBLE_EQ(box.diagonal().x, 2.0);
    EXPECT_DOUBLE_EQ(box.diagonal().y, 2.0);
    EXPECT_DOUBLE_EQ(box.diagonal().z, 2.0);
    EXPECT_DOUBLE_EQ(box.center().y, 1.0);
}

TEST(WatertightParity, CubeSphereTorus) {
    const TriangleMesh shapes[] = {testmesh::cube({0, 0, 0}, 0.5), testmesh::icosphere(2),
                                   testmesh::torus()};
    for (const TriangleMesh& mesh : shapes) {
        const Bvh bvh = build_bvh(mesh);
        const Aabb box = mesh.bounds();
        Aabb inflated = box;
        inflated.lo = inflated.lo - Vec3{1e-3, 1e-3, 1e-3};
        inflated.hi = inflated.hi + Vec3{1e-3, 1e-3, 1e-3};
        testmesh::TestRng rng(7);
        std::size_t hitting = 0, even = 0, alternating = 0;
        for (int k = 0; k < 2000; ++k) {
            Ray ray;
            do {
                ray.origin = rng.point(-4.5, 4.5);
            } while (ray.origin.x > inflated.lo.x && ray.origin.x < inflated.hi.x &&
                     ray.origin.y > inflated.lo.y && ray.origin.y < inflated.hi.y &&
                     ray.origin.z > inflated.lo.z && ray.origin.z < inflated.hi.z);
            // Aim at the bounds so a useful fraction of the rays hit.
            const Vec3 target = {rng.range(box.lo.x, box.hi.x), rng.range(box.lo.y, box.hi.y),
                                 rng.range(box.lo.z, box.hi.z)};
            ray.direction = normalized(target - ray.origin);
            const std::vector<Hit> hits =
                dedupe_hits(ray_all_hits(bvh, mesh, ray), 1e-9);
            if (hits.empty()) continue;
            ++hitting;
            if (hits.size() % 2 == 0) ++even;
            bool alternates = hits[0].facing == Facing::Front;
            for (std::size_t i = 1; i < hits.size() && alternates; ++i)
                alternates = hits[i].facing != hits[i - 1].facing;
            if (alternates) ++alternating;
        }
        ASSERT_GT(hitting, 100u);
        EXPECT_GE(double(even) / double(hitting), 0.999);
        EXPECT_GE(double(alternating) / double(hitting), 0.999);
    }
}
