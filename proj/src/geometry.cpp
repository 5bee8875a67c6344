// mmcal - multi-modal extrinsic calibration toolkit
// SPDX-License-Identifier: Apache-2.0

#include "mmcal/geometry.hpp"

#include <Eigen/SVD>
#include <cmath>

namespace mmcal {

namespace {
constexpr double kTaylorAngle = 1e-8;
constexpr double kMinDepth = 1e-9;
}  // namespace

Mat4 Pose::matrix() const {
  Mat4 m = Mat4::Identity();
  m.topLeftCorner<3, 3>() = rotation;
  m.topRightCorner<3, 1>() = translation;
  return m;
}

Pose Pose::from_matrix(const Mat4& m) {
  return Pose{m.topLeftCorner<3, 3>(), m.topRightCorner<3, 1>()};
}

double Pose::orthonormality_error() const {
  return (rotation.transpose() * rotation - Mat3::Identity()).norm();
}

bool Pose::is_valid(double tol) const {
  if (!rotation.allFinite() || !translation.allFinite()) return false;
  return orthonormality_error() <= tol &&
         std::abs(rotation.determinant() - 1.0) <= tol;
}

Pose Pose::orthonormalized() const {
  Eigen::JacobiSVD<Mat3> svd(rotation,
                             Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3 r = svd.matrixU() * svd.matrixV().transpose();
  if (r.determinant() < 0) {
    Mat3 flip = Mat3::Identity();
    flip(2, 2) = -1;
    r = svd.matrixU() * flip * svd.matrixV().transpose();
  }
  return Pose{r, translation};
}

Pose compose(const Pose& a, const Pose& b) {
  Pose out{a.rotation * b.rotation, a.rotation * b.translation + a.translation};
  if (out.orthonormality_error() > 1e-7) out = out.orthonormalized();
  return out;
}

Pose inverse(const Pose& a) {
  Mat3 rt = a.rotation.transpose();
  return Pose{rt, -(rt * a.translation)};
}

Vec3 transform_point(const Pose& a, const Vec3& p) { return a.apply(p); }

Mat3 skew(const Vec3& v) {
  Mat3 s;
  s << 0, -v.z(), v.y(),  //
      v.z(), 0, -v.x(),   //
      -v.y(), v.x(), 0;
  return s;
}

Pose exp_map(const Twist& xi) {
  if (!xi.translation.allFinite() || !xi.rotation.allFinite()) {
    throw CalibError(ErrorCode::InvalidArgument, "exp_map: non-finite twist");
  }
  const Vec3& omega = xi.rotation;
  const double theta = omega.norm();
  const Mat3 hat = skew(omega);
  const Mat3 hat2 = hat * hat;

  double a, b, c;  // sin t / t, (1 - cos t) / t^2, (t - sin t) / t^3
  if (theta < kTaylorAngle) {
    const double t2 = theta * theta;
    a = 1.0 - t2 / 6.0;
    b = 0.5 - t2 / 24.0;
    c = 1.0 / 6.0 - t2 / 120.0;
  } else {
    const double t2 = theta * theta;
    a = std::sin(theta) / theta;
    b = (1.0 - std::cos(theta)) / t2;
    c = (theta - std::sin(theta)) / (t2 * theta);
  }

  Pose out;
  out.rotation = Mat3::Identity() + a * hat + b * hat2;
  const Mat3 V = Mat3::Identity() + b * hat + c * hat2;
  out.translation = V * xi.translation;
  return out;
}

Twist log_map(const Pose& pose) {
  const Mat3& R = pose.rotation;
  const double cos_theta =
      std::clamp((R.trace() - 1.0) * 0.5, -1.0, 1.0);
  const double theta = std::acos(cos_theta);

  if (M_PI - theta < 1e-6) {
    throw CalibError(ErrorCode::DegenerateRotation,
                     "log_map: rotation angle within 1e-6 of pi");
  }

  Vec3 omega;
  const Vec3 vee(R(2, 1) - R(1, 2), R(0, 2) - R(2, 0), R(1, 0) - R(0, 1));
  if (theta < kTaylorAngle) {
    omega = 0.5 * vee;
  } else {
    omega = theta / (2.0 * std::sin(theta)) * vee;
  }

  const Mat3 hat = skew(omega);
  const Mat3 hat2 = hat * hat;
  Mat3 v_inv;
  if (theta < kTaylorAngle) {
    v_inv = Mat3::Identity() - 0.5 * hat + (1.0 / 12.0) * hat2;
  } else {
    const double k = 1.0 / (theta * theta) -
                     (1.0 + std::cos(theta)) /
                         (2.0 * theta * std::sin(theta));
    v_inv = Mat3::Identity() - 0.5 * hat + k * hat2;
  }

  Twist out;
  out.rotation = omega;
  out.translation = v_inv * pose.translation;
  return out;
}

Pose EulerPose::to_pose() const {
  const double r = deg_to_rad(roll);
  const double p = deg_to_rad(pitch);
  const double w = deg_to_rad(yaw);
  Mat3 rot(Eigen::AngleAxisd(w, Vec3::UnitZ()) *
           Eigen::AngleAxisd(p, Vec3::UnitY()) *
           Eigen::AngleAxisd(r, Vec3::UnitX()));
  return Pose{rot, Vec3(x, y, z)};
}

EulerPose EulerPose::from_pose(const Pose& pose) {
  const Mat3& R = pose.rotation;
  EulerPose out;
  out.x = pose.translation.x();
  out.y = pose.translation.y();
  out.z = pose.translation.z();
  // R = Rz(yaw) Ry(pitch) Rx(roll): R(2,0) = -sin(pitch).
  const double sp = std::clamp(-R(2, 0), -1.0, 1.0);
  out.pitch = rad_to_deg(std::asin(sp));
  if (std::abs(sp) > 0.999999999) {
    // Gimbal lock: roll/yaw indistinguishable, put everything into yaw.
    out.roll = 0.0;
    out.yaw = rad_to_deg(std::atan2(-R(0, 1), R(1, 1)));
  } else {
    out.roll = rad_to_deg(std::atan2(R(2, 1), R(2, 2)));
    out.yaw = rad_to_deg(std::atan2(R(1, 0), R(0, 0)));
  }
  return out;
}

void PinholeIntrinsics::validate() const {
  if (!(fx > 0) || !(fy > 0)) {
    throw CalibError(ErrorCode::ValidationError,
                     "intrinsics: focal lengths must be positive");
  }
  if (!(cx > 0 && cx < width) || !(cy > 0 && cy < height)) {
    throw CalibError(ErrorCode::ValidationError,
                     "intrinsics: principal point outside image");
  }
}

Vec2 project(const PinholeIntrinsics& k, const Vec3& p_cam) {
  Vec2 uv;
  if (!try_project(k, p_cam, &uv)) {
    throw CalibError(ErrorCode::BehindCamera,
                     "project: point depth <= 1e-9");
  }
  return uv;
}

bool try_project(const PinholeIntrinsics& k, const Vec3& p_cam, Vec2* uv) {
  if (p_cam.z() <= kMinDepth) return false;
  const double inv_z = 1.0 / p_cam.z();
  *uv = Vec2(k.fx * p_cam.x() * inv_z + k.cx,
             k.fy * p_cam.y() * inv_z + k.cy);
  return true;
}

Mat26 projection_jacobian(const PinholeIntrinsics& k, const Vec3& p_cam) {
  if (p_cam.z() <= kMinDepth) {
    throw CalibError(ErrorCode::BehindCamera,
                     "projection_jacobian: point depth <= 1e-9");
  }
  const double X = p_cam.x(), Y = p_cam.y(), Z = p_cam.z();
  const double iz = 1.0 / Z;
  const double iz2 = iz * iz;
  Mat26 J;
  J << k.fx * iz, 0, -k.fx * X * iz2,            //
      -k.fx * X * Y * iz2, k.fx + k.fx * X * X * iz2, -k.fx * Y * iz,
      0, k.fy * iz, -k.fy * Y * iz2,             //
      -k.fy - k.fy * Y * Y * iz2, k.fy * X * Y * iz2, k.fy * X * iz;
  return J;
}

double rotation_distance(const Mat3& a, const Mat3& b) {
  const Mat3 rel = a * b.transpose();
  const double c = std::clamp((rel.trace() - 1.0) * 0.5, -1.0, 1.0);
  return std::acos(c);
}

}  // namespace mmcal
