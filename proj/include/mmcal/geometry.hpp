// mmcal - multi-modal extrinsic calibration toolkit
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "mmcal/error.hpp"

namespace mmcal {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;
using Mat26 = Eigen::Matrix<double, 2, 6>;

// Rigid transform mapping source-frame coordinates to target-frame
// coordinates: x_target = rotation * x_source + translation.
struct Pose {
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();

  static Pose identity() { return Pose{}; }

  Vec3 apply(const Vec3& p) const { return rotation * p + translation; }

  Mat4 matrix() const;
  static Pose from_matrix(const Mat4& m);

  // Frobenius deviation of rotation from orthonormality.
  double orthonormality_error() const;
  bool is_valid(double tol = 1e-9) const;

  // Nearest rotation by polar decomposition (SVD).
  Pose orthonormalized() const;
};

// se(3) element, ordered (translation, rotation). The rotation part is
// axis-angle in radians with magnitude in [0, pi] for canonical log output.
struct Twist {
  Vec3 translation = Vec3::Zero();
  Vec3 rotation = Vec3::Zero();

  Vec6 vector() const {
    Vec6 v;
    v << translation, rotation;
    return v;
  }
  static Twist from_vector(const Vec6& v) {
    return Twist{v.head<3>(), v.tail<3>()};
  }
  double norm() const { return vector().norm(); }
};

// Human-facing pose form: translation in meters, intrinsic Z-Y-X Euler
// angles (yaw * pitch * roll) in degrees.
struct EulerPose {
  double x = 0, y = 0, z = 0;           // meters
  double roll = 0, pitch = 0, yaw = 0;  // degrees

  Pose to_pose() const;
  static EulerPose from_pose(const Pose& pose);
};

struct PinholeIntrinsics {
  double fx = 0, fy = 0;
  double cx = 0, cy = 0;
  int width = 0, height = 0;

  void validate() const;
};

Pose compose(const Pose& a, const Pose& b);
Pose inverse(const Pose& a);
Vec3 transform_point(const Pose& a, const Vec3& p);

// SE(3) exponential. exp(0) = identity; switches to a Taylor series below
// rotation magnitude 1e-8.
Pose exp_map(const Twist& xi);

// Canonical SE(3) log with rotation magnitude in [0, pi]. Throws
// DegenerateRotation when the angle is within 1e-6 of pi (axis ambiguous).
Twist log_map(const Pose& pose);

// Pinhole projection u = fx*x/z + cx, v = fy*y/z + cy. Returns the pixel
// even when it falls outside the image bounds; callers filter.
// Throws BehindCamera for z <= 1e-9.
Vec2 project(const PinholeIntrinsics& k, const Vec3& p_cam);

// Non-throwing variant used in inner loops; returns false for z <= 1e-9.
bool try_project(const PinholeIntrinsics& k, const Vec3& p_cam, Vec2* uv);

// Derivative of project(k, exp(dxi) * p_cam) w.r.t. the left perturbation
// dxi at dxi = 0, columns ordered (translation, rotation) to match Twist.
Mat26 projection_jacobian(const PinholeIntrinsics& k, const Vec3& p_cam);

Mat3 skew(const Vec3& v);

// Geodesic angle of the relative rotation, in radians.
double rotation_distance(const Mat3& a, const Mat3& b);

constexpr double kDegPerRad = 57.29577951308232;
inline double deg_to_rad(double d) { return d / kDegPerRad; }
inline double rad_to_deg(double r) { return r * kDegPerRad; }

}  // namespace mmcal
