#pragma once

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

#include "lari/error.hpp"
#include "lari/vec.hpp"

namespace lari {

/// Indexed triangle soup with per-triangle geometric normals.
///
/// Triangles whose area falls below `kDegenerateAreaTolerance` are dropped at
/// construction; the count is kept in `dropped_degenerate`. Immutable after
/// construction and safe to share across threads.
struct TriangleMesh {
    static constexpr double kDegenerateAreaTolerance = 1e-12;

    std::vector<Vec3> vertices;
    std::vector<std::array<uint32_t, 3>> triangles;
    std::vector<Vec3> normals;  // unit geometric normal per triangle, right-hand rule
    std::size_t dropped_degenerate = 0;

    std::size_t triangle_count() const { return triangles.size(); }

    Vec3 vertex(uint32_t tri, int corner) const { return vertices[triangles[tri][corner]]; }

    Aabb bounds() const {
        Aabb box;
        for (const auto& tri : triangles)
            for (uint32_t idx : tri) box.extend(vertices[idx]);
        return box;
    }

    /// Radius of the sphere centered on the bounding-box center enclosing the mesh.
    double bounding_sphere_radius() const {
        Aabb box = bounds();
        if (box.empty()) return 0.0;
        return 0.5 * norm(box.diagonal());
    }
};

/// Builds a mesh from raw vertex and index data. Out-of-range indices are an
/// error; degenerate triangles are silently dropped and counted.
inline TriangleMesh make_mesh(std::vector<Vec3> vertices,
                              const std::vector<std::array<uint32_t, 3>>& triangles) {
    TriangleMesh mesh;
    mesh.vertices = std::move(vertices);
    mesh.triangles.reserve(triangles.size());
    mesh.normals.reserve(triangles.size());
    for (const auto& tri : triangles) {
        for (uint32_t idx : tri) {
            if (idx >= mesh.vertices.size())
                throw Error(ErrorCode::IndexOutOfRange,
                            "triangle index " + std::to_string(idx) + " >= vertex count " +
                                std::to_string(mesh.vertices.size()));
        }
        const Vec3 a = mesh.vertices[tri[0]];
        const Vec3 b = mesh.vertices[tri[1]];
        const Vec3 c = mesh.vertices[tri[2]];
        const Vec3 n = cross(b - a, c - a);
        const double double_area = norm(n);
        if (0.5 * double_area <= TriangleMesh::kDegenerateAreaTolerance) {
            ++mesh.dropped_degenerate;
            continue;
        }
        mesh.triangles.push_back(tri);
        mesh.normals.push_back(n / double_area);
    }
    return mesh;
}

}  // namespace lari
