#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "lari/error.hpp"
#include "lari/mesh.hpp"
#include "lari/vec.hpp"

namespace lari {

struct Ray {
    Vec3 origin;
    Vec3 direction;  // unit length
    double t_min = 1e-6;
    double t_max = std::numeric_limits<double>::infinity();

    Vec3 at(double t) const { return origin + direction * t; }

    void validate() const {
        if (std::abs(norm(direction) - 1.0) > 1e-9)
            throw Error(ErrorCode::InvalidArgument, "ray direction must be unit length");
        if (!(t_min < t_max))
            throw Error(ErrorCode::InvalidArgument, "ray requires t_min < t_max");
    }
};

enum class Facing : uint8_t { Front, Back };

struct Hit {
    double t = 0.0;
    Vec3 point;
    uint32_t triangle_id = 0;
    Facing facing = Facing::Front;
};

/// Barycentric slack on the triangle test. Slightly inclusive so rays through
/// shared edges register on both incident triangles instead of leaking
/// through neither; dedup collapses the duplicates afterwards.
constexpr double kBarycentricTolerance = 1e-9;

/// Moller-Trumbore ray/triangle test. Returns the ray parameter t, or nullopt
/// on a miss. Hits outside [t_min, t_max] are misses.
inline std::optional<double> ray_triangle(const Ray& ray, const Vec3& v0, const Vec3& v1,
                                          const Vec3& v2) {
    const Vec3 e1 = v1 - v0;
    const Vec3 e2 = v2 - v0;
    const Vec3 p = cross(ray.direction, e2);
    const double det = dot(e1, p);
    if (std::abs(det) < 1e-15) return std::nullopt;  // parallel or degenerate
    const double inv_det = 1.0 / det;
    const Vec3 s = ray.origin - v0;
    const double u = dot(s, p) * inv_det;
    if (u < -kBarycentricTolerance || u > 1.0 + kBarycentricTolerance) return std::nullopt;
    const Vec3 q = cross(s, e1);
    const double v = dot(ray.direction, q) * inv_det;
    if (v < -kBarycentricTolerance || u + v > 1.0 + kBarycentricTolerance) return std::nullopt;
    const double t = dot(e2, q) * inv_det;
    if (t < ray.t_min || t > ray.t_max) return std::nullopt;
    return t;
}

inline Hit make_hit(const Ray& ray, double t, uint32_t triangle_id, const Vec3& normal) {
    Hit hit;
    hit.t = t;
    hit.point = ray.at(t);
    hit.triangle_id = triangle_id;
    hit.facing = dot(ray.direction, normal) < 0.0 ? Facing::Front : Facing::Back;
    return hit;
}

/// Collapses runs of hits closer than `epsilon` in t to the first of the run.
/// Input must be sorted by t; output is strictly increasing in t.
inline std::vector<Hit> dedupe_hits(const std::vector<Hit>& hits, double epsilon) {
    std::vector<Hit> out;
    out.reserve(hits.size());
    for (const Hit& hit : hits) {
        if (!out.empty() && hit.t - out.back().t <= epsilon) continue;
        out.push_back(hit);
    }
    return out;
}

}  // namespace lari
