#pragma once

#include <cmath>

#include "lari/error.hpp"
#include "lari/intersect.hpp"
#include "lari/vec.hpp"

namespace lari {

/// Pinhole camera: intrinsics in pixels plus a rigid camera-to-world pose.
/// Camera frame is x-right, y-down, z-forward.
struct PinholeCamera {
    double fx = 0.0, fy = 0.0;
    double cx = 0.0, cy = 0.0;
    int width = 0, height = 0;
    RigidTransform pose;  // camera-to-world, scale must stay 1

    void validate() const {
        if (!(fx > 0.0) || !(fy > 0.0))
            throw Error(ErrorCode::InvalidArgument, "focal lengths must be positive");
        if (!(cx > 0.0 && cx < width) || !(cy > 0.0 && cy < height))
            throw Error(ErrorCode::InvalidArgument, "principal point must lie inside the image");
        if (!is_rotation(pose.rotation))
            throw Error(ErrorCode::InvalidRotation, "camera pose rotation is not orthonormal");
        if (std::abs(pose.scale - 1.0) > 1e-12)
            throw Error(ErrorCode::InvalidArgument, "camera pose must be rigid (scale 1)");
    }

    Vec3 position() const { return pose.translation; }

    /// World point -> camera-space point.
    Vec3 world_to_camera(const Vec3& p) const {
        return transpose(pose.rotation) * (p - pose.translation);
    }
};

/// Ray through the center of pixel (u, v) = (column, row).
inline Ray generate_ray(const PinholeCamera& camera, int u, int v) {
    const Vec3 dir_cam{(u + 0.5 - camera.cx) / camera.fx, (v + 0.5 - camera.cy) / camera.fy, 1.0};
    Ray ray;
    ray.origin = camera.position();
    ray.direction = normalized(camera.pose.rotation * dir_cam);
    return ray;
}

/// Camera-to-world pose looking from `eye` toward `target`, keeping the image
/// upright with respect to `world_up`. Falls back to a z-up reference when the
/// view direction is parallel to `world_up`.
inline RigidTransform look_at(const Vec3& eye, const Vec3& target, const Vec3& world_up = {0, 1, 0}) {
    const Vec3 forward = normalized(target - eye);
    Vec3 right = cross(forward, world_up);
    if (norm(right) < 1e-9) right = cross(forward, Vec3{0, 0, 1});
    right = normalized(right);
    const Vec3 down = cross(forward, right);
    RigidTransform pose;
    pose.rotation = Mat3::from_columns(right, down, forward);
    pose.translation = eye;
    return pose;
}

/// Position on the sphere of given radius around `center`; azimuth rotates
/// about +y from +z, elevation lifts toward +y. Angles in degrees.
inline Vec3 orbit_position(const Vec3& center, double radius, double elevation_deg,
                           double azimuth_deg) {
    const double az = degrees_to_radians(azimuth_deg);
    const double el = degrees_to_radians(elevation_deg);
    const Vec3 dir{std::cos(el) * std::sin(az), std::sin(el), std::cos(el) * std::cos(az)};
    return center + dir * radius;
}

}  // namespace lari
