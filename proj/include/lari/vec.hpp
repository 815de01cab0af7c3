#pragma once

#include <algorithm>
#include <cmath>
#include <limits>

#include "lari/error.hpp"

namespace lari {

struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;

    Vec3() = default;
    Vec3(double x, double y, double z) : x(x), y(y), z(z) {}

    double operator[](int i) const { return (&x)[i]; }
    double& operator[](int i) { return (&x)[i]; }

    Vec3 operator-() const { return {-x, -y, -z}; }
    Vec3& operator+=(const Vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }
    Vec3& operator-=(const Vec3& o) { x -= o.x; y -= o.y; z -= o.z; return *this; }
    Vec3& operator*=(double s) { x *= s; y *= s; z *= s; return *this; }
};

inline Vec3 operator+(const Vec3& a, const Vec3& b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
inline Vec3 operator-(const Vec3& a, const Vec3& b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
inline Vec3 operator*(const Vec3& a, double s) { return {a.x * s, a.y * s, a.z * s}; }
inline Vec3 operator*(double s, const Vec3& a) { return a * s; }
inline Vec3 operator/(const Vec3& a, double s) { return a * (1.0 / s); }
inline bool operator==(const Vec3& a, const Vec3& b) { return a.x == b.x && a.y == b.y && a.z == b.z; }

inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

inline Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

inline double norm_squared(const Vec3& v) { return dot(v, v); }
inline double norm(const Vec3& v) { return std::sqrt(dot(v, v)); }
inline Vec3 normalized(const Vec3& v) { return v / norm(v); }
inline double distance(const Vec3& a, const Vec3& b) { return norm(a - b); }

inline Vec3 min(const Vec3& a, const Vec3& b) {
    return {std::min(a.x, b.x), std::min(a.y, b.y), std::min(a.z, b.z)};
}
inline Vec3 max(const Vec3& a, const Vec3& b) {
    return {std::max(a.x, b.x), std::max(a.y, b.y), std::max(a.z, b.z)};
}

inline bool is_finite(const Vec3& v) {
    return std::isfinite(v.x) && std::isfinite(v.y) && std::isfinite(v.z);
}

/// 3x3 matrix, row-major.
struct Mat3 {
    double m[3][3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};

    double operator()(int r, int c) const { return m[r][c]; }
    double& operator()(int r, int c) { return m[r][c]; }

    static Mat3 identity() { return {}; }

    static Mat3 from_rows(const Vec3& r0, const Vec3& r1, const Vec3& r2) {
        Mat3 a;
        for (int c = 0; c < 3; ++c) { a(0, c) = r0[c]; a(1, c) = r1[c]; a(2, c) = r2[c]; }
        return a;
    }

    static Mat3 from_columns(const Vec3& c0, const Vec3& c1, const Vec3& c2) {
        Mat3 a;
        for (int r = 0; r < 3; ++r) { a(r, 0) = c0[r]; a(r, 1) = c1[r]; a(r, 2) = c2[r]; }
        return a;
    }

    static Mat3 diagonal(double a, double b, double c) {
        Mat3 d;
        d(0, 0) = a; d(1, 1) = b; d(2, 2) = c;
        d(0, 1) = d(0, 2) = d(1, 0) = d(1, 2) = d(2, 0) = d(2, 1) = 0.0;
        return d;
    }

    Vec3 row(int r) const { return {m[r][0], m[r][1], m[r][2]}; }
    Vec3 column(int c) const { return {m[0][c], m[1][c], m[2][c]}; }
};

inline Vec3 operator*(const Mat3& a, const Vec3& v) {
    return {dot(a.row(0), v), dot(a.row(1), v), dot(a.row(2), v)};
}

inline Mat3 operator*(const Mat3& a, const Mat3& b) {
    Mat3 c;
    for (int r = 0; r < 3; ++r)
        for (int col = 0; col < 3; ++col)
            c(r, col) = a(r, 0) * b(0, col) + a(r, 1) * b(1, col) + a(r, 2) * b(2, col);
    return c;
}

inline Mat3 transpose(const Mat3& a) {
    Mat3 t;
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) t(r, c) = a(c, r);
    return t;
}

inline double determinant(const Mat3& a) {
    return a(0, 0) * (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1)) -
           a(0, 1) * (a(1, 0) * a(2, 2) - a(1, 2) * a(2, 0)) +
           a(0, 2) * (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0));
}

/// Max absolute entry of R*R^T - I; zero for an orthonormal matrix.
inline double orthonormality_error(const Mat3& r) {
    Mat3 g = r * transpose(r);
    double err = 0.0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) err = std::max(err, std::abs(g(i, j) - (i == j ? 1.0 : 0.0)));
    return err;
}

inline bool is_rotation(const Mat3& r, double tol = 1e-9) {
    return orthonormality_error(r) <= tol && std::abs(determinant(r) - 1.0) <= tol;
}

/// Rotation of `angle_rad` about a unit axis (Rodrigues).
inline Mat3 rotation_about_axis(const Vec3& axis, double angle_rad) {
    const Vec3 u = normalized(axis);
    const double c = std::cos(angle_rad), s = std::sin(angle_rad), t = 1.0 - c;
    Mat3 r;
    r(0, 0) = c + u.x * u.x * t;
    r(0, 1) = u.x * u.y * t - u.z * s;
    r(0, 2) = u.x * u.z * t + u.y * s;
    r(1, 0) = u.y * u.x * t + u.z * s;
    r(1, 1) = c + u.y * u.y * t;
    r(1, 2) = u.y * u.z * t - u.x * s;
    r(2, 0) = u.z * u.x * t - u.y * s;
    r(2, 1) = u.z * u.y * t + u.x * s;
    r(2, 2) = c + u.z * u.z * t;
    return r;
}

inline double degrees_to_radians(double deg) { return deg * (3.14159265358979323846 / 180.0); }

/// Geodesic distance between two rotations, in radians.
inline double rotation_angle_between(const Mat3& a, const Mat3& b) {
    Mat3 d = transpose(a) * b;
    double tr = d(0, 0) + d(1, 1) + d(2, 2);
    return std::acos(std::clamp((tr - 1.0) * 0.5, -1.0, 1.0));
}

/// Similarity transform p -> scale * R * p + t. scale == 1 gives a rigid motion.
struct RigidTransform {
    Mat3 rotation;
    Vec3 translation{0, 0, 0};
    double scale = 1.0;

    Vec3 apply(const Vec3& p) const { return scale * (rotation * p) + translation; }

    RigidTransform inverse() const {
        RigidTransform inv;
        inv.rotation = transpose(rotation);
        inv.scale = 1.0 / scale;
        inv.translation = -inv.scale * (inv.rotation * translation);
        return inv;
    }

    void validate(double tol = 1e-9) const {
        if (!is_rotation(rotation, tol))
            throw Error(ErrorCode::InvalidRotation, "rotation is not orthonormal with det +1");
        if (!(scale > 0.0) || !std::isfinite(scale))
            throw Error(ErrorCode::InvalidArgument, "scale must be positive and finite");
    }
};

/// Composition: (a * b).apply(p) == a.apply(b.apply(p)).
inline RigidTransform operator*(const RigidTransform& a, const RigidTransform& b) {
    RigidTransform c;
    c.rotation = a.rotation * b.rotation;
    c.scale = a.scale * b.scale;
    c.translation = a.scale * (a.rotation * b.translation) + a.translation;
    return c;
}

/// Axis-aligned bounding box.
struct Aabb {
    Vec3 lo{std::numeric_limits<double>::max(), std::numeric_limits<double>::max(),
            std::numeric_limits<double>::max()};
    Vec3 hi{std::numeric_limits<double>::lowest(), std::numeric_limits<double>::lowest(),
            std::numeric_limits<double>::lowest()};

    bool empty() const { return lo.x > hi.x; }

    void extend(const Vec3& p) { lo = min(lo, p); hi = max(hi, p); }
    void extend(const Aabb& b) { lo = min(lo, b.lo); hi = max(hi, b.hi); }

    Vec3 diagonal() const { return hi - lo; }
    Vec3 center() const { return (lo + hi) * 0.5; }

    double half_area() const {
        Vec3 d = diagonal();
        return d.x * d.y + d.y * d.z + d.z * d.x;
    }
};

}  // namespace lari
