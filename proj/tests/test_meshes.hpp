#pragma once

// Mesh generators shared by the test suites. All watertight shapes use
// consistent outward winding so facing parity is meaningful.

#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "lari/camera.hpp"
#include "lari/mesh.hpp"
#include "lari/vec.hpp"

namespace testmesh {

struct RawMesh {
    std::vector<lari::Vec3> vertices;
    std::vector<std::array<uint32_t, 3>> triangles;
};

inline RawMesh raw_cube(const lari::Vec3& center = {0, 0, 0}, double half = 0.5) {
    RawMesh raw;
    for (int i = 0; i < 8; ++i) {
        raw.vertices.push_back({center.x + ((i & 1) ? half : -half),
                                center.y + ((i & 2) ? half : -half),
                                center.z + ((i & 4) ? half : -half)});
    }
    raw.triangles = {
        {0, 2, 3}, {0, 3, 1},  // -z
        {4, 5, 7}, {4, 7, 6},  // +z
        {0, 4, 6}, {0, 6, 2},  // -x
        {1, 3, 7}, {1, 7, 5},  // +x
        {0, 1, 5}, {0, 5, 4},  // -y
        {2, 6, 7}, {2, 7, 3},  // +y
    };
    return raw;
}

inline RawMesh merge(const RawMesh& a, const RawMesh& b) {
    RawMesh out = a;
    const uint32_t base = uint32_t(out.vertices.size());
    out.vertices.insert(out.vertices.end(), b.vertices.begin(), b.vertices.end());
    for (const auto& t : b.triangles)
        out.triangles.push_back({t[0] + base, t[1] + base, t[2] + base});
    return out;
}

inline lari::TriangleMesh cube(const lari::Vec3& center = {0, 0, 0}, double half = 0.5) {
    RawMesh raw = raw_cube(center, half);
    return lari::make_mesh(std::move(raw.vertices), std::move(raw.triangles));
}

/// The analytic two-cube scene: unit cubes centered at z=2 and z=5 on the
/// optical axis; a frontal camera sees faces at z = 1.5, 2.5, 4.5, 5.5.
inline lari::TriangleMesh two_cubes() {
    RawMesh raw = merge(raw_cube({0, 0, 2}, 0.5), raw_cube({0, 0, 5}, 0.5));
    return lari::make_mesh(std::move(raw.vertices), std::move(raw.triangles));
}

/// A cube with internal structure: inner cube fully inside the outer one.
inline lari::TriangleMesh nested_cubes(const lari::Vec3& center = {0, 0, 0}) {
    RawMesh raw = merge(raw_cube(center, 1.0), raw_cube(center, 0.5));
    return lari::make_mesh(std::move(raw.vertices), std::move(raw.triangles));
}

/// An object tiny relative to its own bounds: a small cube plus a far-away
/// sliver triangle that inflates the bounding sphere, so orbit cameras see
/// almost nothing.
inline lari::TriangleMesh tiny_in_large_bounds() {
    RawMesh raw = raw_cube({0, 0, 0}, 0.05);
    const uint32_t base = uint32_t(raw.vertices.size());
    raw.vertices.push_back({10.0, 0.0, 0.0});
    raw.vertices.push_back({10.01, 0.0, 0.0});
    raw.vertices.push_back({10.0, 0.01, 0.0});
    raw.triangles.push_back({base, base + 1, base + 2});
    return lari::make_mesh(std::move(raw.vertices), std::move(raw.triangles));
}

inline lari::TriangleMesh icosphere(int subdivisions = 2, double radius = 1.0,
                                    const lari::Vec3& center = {0, 0, 0}) {
    const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
    std::vector<lari::Vec3> vertices = {
        {-1, phi, 0}, {1, phi, 0}, {-1, -phi, 0}, {1, -phi, 0},
        {0, -1, phi}, {0, 1, phi}, {0, -1, -phi}, {0, 1, -phi},
        {phi, 0, -1}, {phi, 0, 1}, {-phi, 0, -1}, {-phi, 0, 1},
    };
    for (lari::Vec3& v : vertices) v = normalized(v);
    std::vector<std::array<uint32_t, 3>> faces = {
        {0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
        {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
        {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
        {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1},
    };

    for (int level = 0; level < subdivisions; ++level) {
        std::map<std::pair<uint32_t, uint32_t>, uint32_t> midpoint;
        auto mid = [&](uint32_t a, uint32_t b) -> uint32_t {
            const auto key = std::minmax(a, b);
            auto it = midpoint.find(key);
            if (it != midpoint.end()) return it->second;
            const uint32_t index = uint32_t(vertices.size());
            vertices.push_back(normalized(vertices[a] + vertices[b]));
            midpoint.emplace(key, index);
            return index;
        };
        std::vector<std::array<uint32_t, 3>> next;
        next.reserve(faces.size() * 4);
        for (const auto& f : faces) {
            const uint32_t ab = mid(f[0], f[1]), bc = mid(f[1], f[2]), ca = mid(f[2], f[0]);
            next.push_back({f[0], ab, ca});
            next.push_back({f[1], bc, ab});
            next.push_back({f[2], ca, bc});
            next.push_back({ab, bc, ca});
        }
        faces = std::move(next);
    }
    for (lari::Vec3& v : vertices) v = v * radius + center;
    return lari::make_mesh(std::move(vertices), std::move(faces));
}

inline lari::TriangleMesh torus(int major_segments = 24, int minor_segments = 12,
                                double major_radius = 1.0, double minor_radius = 0.3,
                                const lari::Vec3& center = {0, 0, 0}) {
    std::vector<lari::Vec3> vertices;
    vertices.reserve(std::size_t(major_segments) * minor_segments);
    for (int i = 0; i < major_segments; ++i) {
        const double u = 2.0 * M_PI * i / major_segments;
        for (int j = 0; j < minor_segments; ++j) {
            const double v = 2.0 * M_PI * j / minor_segments;
            const double ring = major_radius + minor_radius * std::cos(v);
            vertices.push_back({center.x + ring * std::cos(u),
                                center.y + minor_radius * std::sin(v),
                                center.z + ring * std::sin(u)});
        }
    }
    std::vector<std::array<uint32_t, 3>> triangles;
    triangles.reserve(std::size_t(major_segments) * minor_segments * 2);
    auto at = [&](int i, int j) {
        return uint32_t((i % major_segments) * minor_segments + (j % minor_segments));
    };
    // Wound so triangle normals point out of the tube.
    for (int i = 0; i < major_segments; ++i) {
        for (int j = 0; j < minor_segments; ++j) {
            triangles.push_back({at(i, j), at(i + 1, j + 1), at(i + 1, j)});
            triangles.push_back({at(i, j), at(i, j + 1), at(i + 1, j + 1)});
        }
    }
    return lari::make_mesh(std::move(vertices), std::move(triangles));
}

/// splitmix64, the same generator the library uses for sampling.
struct TestRng {
    uint64_t state;
    explicit TestRng(uint64_t seed) : state(seed) {}
    uint64_t next() {
        state += 0x9e3779b97f4a7c15ull;
        uint64_t z = state;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }
    double uniform() { return double(next() >> 11) * 0x1.0p-53; }
    double range(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    lari::Vec3 point(double lo, double hi) {
        return {range(lo, hi), range(lo, hi), range(lo, hi)};
    }
};

/// Random triangle soup: not watertight, useful for oracle comparisons.
inline lari::TriangleMesh random_soup(std::size_t n_triangles, uint64_t seed,
                                      double extent = 1.0) {
    TestRng rng(seed);
    std::vector<lari::Vec3> vertices;
    std::vector<std::array<uint32_t, 3>> triangles;
    vertices.reserve(n_triangles * 3);
    triangles.reserve(n_triangles);
    for (std::size_t i = 0; i < n_triangles; ++i) {
        const uint32_t base = uint32_t(vertices.size());
        vertices.push_back(rng.point(-extent, extent));
        vertices.push_back(rng.point(-extent, extent));
        vertices.push_back(rng.point(-extent, extent));
        triangles.push_back({base, base + 1, base + 2});
    }
    return lari::make_mesh(std::move(vertices), std::move(triangles));
}

inline std::vector<lari::Vec3> random_cloud(std::size_t n, uint64_t seed, double extent = 1.0) {
    TestRng rng(seed);
    std::vector<lari::Vec3> cloud;
    cloud.reserve(n);
    for (std::size_t i = 0; i < n; ++i) cloud.push_back(rng.point(-extent, extent));
    return cloud;
}

/// Frontal camera at the origin looking down +z, fx = fy = width.
inline lari::PinholeCamera frontal_camera(int width, int height) {
    lari::PinholeCamera camera;
    camera.width = width;
    camera.height = height;
    camera.fx = double(width);
    camera.fy = double(width);
    camera.cx = 0.5 * double(width);
    camera.cy = 0.5 * double(height);
    return camera;
}

}  // namespace testmesh
