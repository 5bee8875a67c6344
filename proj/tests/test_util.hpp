// mmcal - multi-modal extrinsic calibration toolkit
// SPDX-License-Identifier: Apache-2.0
//
// Shared helpers for the test suites: seeded random poses/clouds and the
// synthetic scene used by the calibration-stage tests.

#pragma once

#include <random>

#include "mmcal/geometry.hpp"
#include "mmcal/pointcloud.hpp"
#include "mmcal/synth.hpp"

namespace mmcal::testutil {

inline Vec3 random_unit(std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vec3 v;
  do {
    v = Vec3(gauss(rng), gauss(rng), gauss(rng));
  } while (v.norm() < 1e-9);
  return v.normalized();
}

inline Twist random_twist(std::mt19937_64& rng, double trans_scale,
                          double rot_scale) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Twist xi;
  xi.translation = trans_scale * Vec3(u(rng), u(rng), u(rng));
  xi.rotation = rot_scale * Vec3(u(rng), u(rng), u(rng));
  return xi;
}

inline Pose random_pose(std::mt19937_64& rng, double trans_scale = 1.0,
                        double rot_scale = 1.0) {
  return exp_map(random_twist(rng, trans_scale, rot_scale));
}

inline PointCloud random_cloud(std::mt19937_64& rng, size_t n,
                               double extent = 5.0) {
  std::uniform_real_distribution<double> u(-extent, extent);
  PointCloud cloud;
  for (size_t i = 0; i < n; ++i) {
    cloud.points.emplace_back(u(rng), u(rng), u(rng));
  }
  return cloud;
}

// The default test rig. Cameras use camera axes (x right, y down,
// z forward); the laser frame is camera-like with a small mounting offset.
inline RigSpec test_rig() {
  RigSpec rig;
  rig.k_left = {500.0, 500.0, 320.0, 240.0, 640, 480};
  rig.k_right = rig.k_left;
  rig.k_thermal = {440.0, 440.0, 320.0, 256.0, 640, 512};
  rig.t_lr = Pose{Mat3::Identity(), Vec3(0.2227, 0.0, 0.0)};
  rig.t_sl = euler_from_fields(0.11, -0.09, -0.04, 2.0, -3.0, 1.5).to_pose();
  rig.t_st = euler_from_fields(0.08, 0.01, -0.015, -1.5, 2.0, -1.0).to_pose();
  rig.laser = LaserModel{96, 2048, 75.0, 130.0, 120.0};
  return rig;
}

// Boxes in front of a back wall, varied depths to pin all six pose axes.
inline SceneSpec two_box_scene(uint64_t seed = 7) {
  SceneSpec spec;
  spec.seed = seed;
  spec.rig = test_rig();
  spec.boxes = {
      Box{Vec3(-2.2, -1.1, 4.0), Vec3(-0.9, 1.4, 5.0), 210},
      Box{Vec3(0.7, -1.5, 6.0), Vec3(2.3, 1.2, 7.2), 170},
      // back wall
      Box{Vec3(-16.0, -6.0, 12.0), Vec3(16.0, 7.0, 12.4), 90},
  };
  spec.background_gray = 30;
  spec.features_per_frame = 320;
  return spec;
}

}  // namespace mmcal::testutil
