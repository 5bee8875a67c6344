// mmcal - multi-modal extrinsic calibration toolkit
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mmcal/geometry.hpp"
#include "test_util.hpp"

using namespace mmcal;

TEST_CASE("exp_map of zero twist is identity") {
  const Pose p = exp_map(Twist{});
  CHECK((p.rotation - Mat3::Identity()).norm() == doctest::Approx(0.0));
  CHECK(p.translation.norm() == doctest::Approx(0.0));
}

TEST_CASE("exp_map quarter-turn yaw maps x axis to y axis") {
  Twist xi;
  xi.rotation = Vec3(0, 0, M_PI / 2);
  const Pose p = exp_map(xi);
  const Vec3 mapped = p.apply(Vec3(1, 0, 0));
  CHECK((mapped - Vec3(0, 1, 0)).norm() < 1e-12);
  CHECK(p.translation.norm() == doctest::Approx(0.0));
}

TEST_CASE("exp_map rejects non-finite input") {
  Twist xi;
  xi.translation = Vec3(std::nan(""), 0, 0);
  CHECK_THROWS_AS(exp_map(xi), CalibError);
}

TEST_CASE("log/exp roundtrip over 100 seeded random twists") {
  std::mt19937_64 rng(42);
  for (int i = 0; i < 100; ++i) {
    const Twist xi = testutil::random_twist(rng, 2.0, 1.5);
    const Twist back = log_map(exp_map(xi));
    CHECK((back.vector() - xi.vector()).norm() < 1e-9);
  }
}

TEST_CASE("exp/log roundtrip on 100 seeded random poses") {
  std::mt19937_64 rng(43);
  for (int i = 0; i < 100; ++i) {
    const Pose pose = testutil::random_pose(rng, 3.0, 1.4);
    const Pose back = exp_map(log_map(pose));
    CHECK((back.rotation - pose.rotation).norm() < 1e-9);
    CHECK((back.translation - pose.translation).norm() < 1e-9);
  }
}

TEST_CASE("log_map of identity is zero; inverse pair recovers twist") {
  CHECK(log_map(Pose::identity()).norm() == doctest::Approx(0.0));
  Twist xi;
  xi.translation = Vec3(0.1, 0, 0);
  xi.rotation = Vec3(0, 0, 0.2);
  const Twist back = log_map(exp_map(xi));
  CHECK((back.vector() - xi.vector()).norm() < 1e-9);
}

TEST_CASE("log_map rejects rotations at pi") {
  Pose p;
  p.rotation = Mat3(Eigen::AngleAxisd(M_PI, Vec3::UnitZ()));
  CHECK_THROWS_AS(log_map(p), CalibError);
  // Just inside the guard band still works.
  p.rotation = Mat3(Eigen::AngleAxisd(M_PI - 1e-4, Vec3::UnitZ()));
  CHECK_NOTHROW(log_map(p));
}

TEST_CASE("compose with inverse gives identity; translation acts on origin") {
  std::mt19937_64 rng(44);
  const Pose t = testutil::random_pose(rng, 2.0, 1.0);
  const Pose id = compose(t, inverse(t));
  CHECK((id.rotation - Mat3::Identity()).norm() < 1e-12);
  CHECK(id.translation.norm() < 1e-12);

  Pose trans;
  trans.translation = Vec3(1, 2, 3);
  CHECK((transform_point(trans, Vec3::Zero()) - Vec3(1, 2, 3)).norm() == 0.0);
}

TEST_CASE("compose associativity on 50 seeded random triples") {
  std::mt19937_64 rng(45);
  for (int i = 0; i < 50; ++i) {
    const Pose a = testutil::random_pose(rng);
    const Pose b = testutil::random_pose(rng);
    const Pose c = testutil::random_pose(rng);
    const Pose left = compose(compose(a, b), c);
    const Pose right = compose(a, compose(b, c));
    CHECK((left.rotation - right.rotation).norm() < 1e-10);
    CHECK((left.translation - right.translation).norm() < 1e-10);
  }
}

TEST_CASE("orthonormality survives 1000 chained compositions") {
  std::mt19937_64 rng(46);
  Pose acc;
  std::vector<Pose> factors;
  for (int i = 0; i < 1000; ++i) {
    const Pose step = testutil::random_pose(rng, 0.5, 0.8);
    acc = compose(acc, step);
    CHECK(acc.orthonormality_error() < 1e-9);
  }
}

TEST_CASE("projection basics") {
  PinholeIntrinsics k{500, 500, 320, 240, 640, 480};

  SUBCASE("optical axis lands on the principal point") {
    const Vec2 uv = project(k, Vec3(0, 0, 5));
    CHECK(uv.x() == doctest::Approx(320.0));
    CHECK(uv.y() == doctest::Approx(240.0));
  }
  SUBCASE("closed-form pinhole value") {
    const Vec2 uv = project(k, Vec3(1, 0, 2));
    CHECK(uv.x() == doctest::Approx(570.0));
    CHECK(uv.y() == doctest::Approx(240.0));
  }
  SUBCASE("behind-camera raises") {
    CHECK_THROWS_AS(project(k, Vec3(0, 0, -1)), CalibError);
    Vec2 uv;
    CHECK_FALSE(try_project(k, Vec3(0, 0, -1), &uv));
  }
}

TEST_CASE("projection jacobian first entry is fx/Z") {
  PinholeIntrinsics k{500, 500, 320, 240, 640, 480};
  const Mat26 J = projection_jacobian(k, Vec3(1, 1, 2));
  CHECK(J(0, 0) == doctest::Approx(250.0));
}

TEST_CASE("on-axis point zeroes the X/Y cross terms") {
  PinholeIntrinsics k{450, 430, 315, 250, 640, 512};
  const Mat26 J = projection_jacobian(k, Vec3(0, 0, 3));
  CHECK(J(0, 1) == 0.0);  // no fy coupling in row u
  CHECK(J(1, 0) == 0.0);
  CHECK(J(0, 2) == 0.0);  // -fx X / Z^2
  CHECK(J(1, 2) == 0.0);
  CHECK(J(0, 3) == 0.0);  // -fx X Y / Z^2
  CHECK(J(1, 4) == 0.0);  // fy X Y / Z^2
  CHECK(J(0, 5) == 0.0);  // -fx Y / Z
  CHECK(J(1, 5) == 0.0);  // fy X / Z
}

namespace {

// Central-difference oracle for the projection jacobian: perturb the
// identity transform on its left and re-project.
Mat26 fd_projection_jacobian(const PinholeIntrinsics& k, const Vec3& p,
                             double step) {
  Mat26 J;
  for (int i = 0; i < 6; ++i) {
    Vec6 d = Vec6::Zero();
    d[i] = step;
    const Vec2 plus = project(k, exp_map(Twist::from_vector(d)).apply(p));
    d[i] = -step;
    const Vec2 minus = project(k, exp_map(Twist::from_vector(d)).apply(p));
    J.col(i) = (plus - minus) / (2.0 * step);
  }
  return J;
}

}  // namespace

TEST_CASE("projection jacobian matches finite differences at a spot check") {
  PinholeIntrinsics k{500, 480, 320, 240, 640, 480};
  const Vec3 p(0.3, -0.2, 1.5);
  const Mat26 J = projection_jacobian(k, p);
  const Mat26 fd = fd_projection_jacobian(k, p, 1e-6);
  CHECK((J - fd).norm() / fd.norm() < 1e-5);
}

TEST_CASE("projection jacobian matches finite differences on 1000 seeded pairs") {
  std::mt19937_64 rng(47);
  std::uniform_real_distribution<double> uf(300.0, 700.0);
  std::uniform_real_distribution<double> uc(200.0, 400.0);
  std::uniform_real_distribution<double> uxy(-2.0, 2.0);
  std::uniform_real_distribution<double> uz(0.5, 50.0);
  for (int i = 0; i < 1000; ++i) {
    PinholeIntrinsics k{uf(rng), uf(rng), uc(rng), uc(rng), 800, 800};
    const Vec3 p(uxy(rng), uxy(rng), uz(rng));
    const Mat26 J = projection_jacobian(k, p);
    const Mat26 fd = fd_projection_jacobian(k, p, 1e-6);
    CHECK((J - fd).norm() / fd.norm() < 1e-5);
  }
}

TEST_CASE("euler conversions") {
  SUBCASE("roundtrip below gimbal lock") {
    std::mt19937_64 rng(48);
    std::uniform_real_distribution<double> angle(-180.0, 180.0);
    std::uniform_real_distribution<double> pitch(-88.9, 88.9);
    std::uniform_real_distribution<double> pos(-3.0, 3.0);
    for (int i = 0; i < 200; ++i) {
      EulerPose e;
      e.x = pos(rng);
      e.y = pos(rng);
      e.z = pos(rng);
      e.roll = angle(rng);
      e.pitch = pitch(rng);
      e.yaw = angle(rng);
      const EulerPose back = EulerPose::from_pose(e.to_pose());
      CHECK(back.x == doctest::Approx(e.x).epsilon(1e-9));
      CHECK(back.roll == doctest::Approx(e.roll).epsilon(1e-9));
      CHECK(back.pitch == doctest::Approx(e.pitch).epsilon(1e-9));
      CHECK(back.yaw == doctest::Approx(e.yaw).epsilon(1e-9));
    }
  }
  SUBCASE("yaw-pitch-roll composition order") {
    // yaw 90 about z maps x->y regardless of roll.
    EulerPose e;
    e.yaw = 90.0;
    e.roll = 45.0;
    const Pose p = e.to_pose();
    const Vec3 v = p.rotation * Vec3::UnitX();
    CHECK((v - Vec3(0, 1, 0)).norm() < 1e-12);
  }
}

TEST_CASE("intrinsics invariants") {
  PinholeIntrinsics bad{0, 500, 320, 240, 640, 480};
  CHECK_THROWS_AS(bad.validate(), CalibError);
  PinholeIntrinsics good{500, 500, 320, 240, 640, 480};
  CHECK_NOTHROW(good.validate());
}

TEST_CASE("rotation_distance measures the geodesic angle") {
  const Mat3 a = Mat3::Identity();
  const Mat3 b(Eigen::AngleAxisd(deg_to_rad(2.0), Vec3::UnitY()));
  CHECK(rad_to_deg(rotation_distance(a, b)) == doctest::Approx(2.0));
}
