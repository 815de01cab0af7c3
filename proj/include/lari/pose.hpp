#pragma once

#include "lari/error.hpp"
#include "lari/vec.hpp"

namespace lari {

/// Camera axis labels. XrYdZf: x right, y down, z forward (this library's
/// native frame). XrYuZb: x right, y up, z back. The two differ by flipping
/// the camera-local y and z axes; the world frame is shared.
enum class AxisConvention { XrYdZf, XrYuZb };

/// Whether the stored matrix multiplies column vectors from the left
/// (p' = M p + t) or row vectors from the right (p' = p M + t). The row form
/// stores the transpose of the column form.
enum class MatrixSide { LeftColumn, RightRow };

enum class TransformDirection { CameraToWorld, WorldToCamera };

struct PoseConvention {
    AxisConvention axes = AxisConvention::XrYdZf;
    MatrixSide side = MatrixSide::LeftColumn;
    TransformDirection direction = TransformDirection::CameraToWorld;

    bool operator==(const PoseConvention&) const = default;
};

/// A pose as stored under some convention: interpretation of `linear` and
/// `translation` depends on the PoseConvention they travel with.
struct Pose {
    Mat3 linear;
    Vec3 translation{0, 0, 0};
};

namespace detail {

// Camera-basis change between the two axis conventions (involutory).
inline const Mat3 kAxisFlip = Mat3::diagonal(1.0, -1.0, -1.0);

}  // namespace detail

/// Re-expresses a pose between conventions so the world-space rays produced
/// under the output convention match the input's exactly. Conversion runs
/// through a canonical form (column-major camera-to-world in the native
/// frame); converting A to B and then B to C therefore equals A to C.
inline Pose convert_pose(const Pose& pose, const PoseConvention& from,
                         const PoseConvention& to) {
    // To canonical: column form first, then direction, then camera axes.
    Mat3 rotation = (from.side == MatrixSide::RightRow) ? transpose(pose.linear) : pose.linear;
    Vec3 translation = pose.translation;
    if (!is_rotation(rotation, 1e-9))
        throw Error(ErrorCode::InvalidRotation, "pose linear part is not a rotation");
    if (from.direction == TransformDirection::WorldToCamera) {
        rotation = transpose(rotation);
        translation = -(rotation * translation);
    }
    if (from.axes == AxisConvention::XrYuZb) rotation = rotation * detail::kAxisFlip;

    // From canonical: mirror the same steps toward the target convention.
    if (to.axes == AxisConvention::XrYuZb) rotation = rotation * detail::kAxisFlip;
    if (to.direction == TransformDirection::WorldToCamera) {
        rotation = transpose(rotation);
        translation = -(rotation * translation);
    }
    Pose out;
    out.linear = (to.side == MatrixSide::RightRow) ? transpose(rotation) : rotation;
    out.translation = translation;
    return out;
}

}  // namespace lari
