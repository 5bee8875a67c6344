// mmcal - multi-modal extrinsic calibration toolkit
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "mmcal/dataset.hpp"
#include "mmcal/laser_edges.hpp"

namespace mmcal {

// Axis-aligned box in the world frame. Planes are boxes with one near-zero
// extent. `gray` is the flat shade used in rendered views.
struct Box {
  Vec3 lo, hi;
  uint8_t gray = 128;
};

struct LaserModel {
  int rings = 128;         // Ouster OS0-class default
  int cols = 1024;
  double vfov_deg = 90.0;  // total, symmetric about forward
  double hfov_deg = 360.0;
  double max_range = 120.0;
};

struct NoiseSpec {
  double laser_sigma = 0.0;   // range noise along the ray, meters
  double stereo_sigma = 0.0;  // isotropic 3D perturbation of feature points
};

struct RigSpec {
  Pose t_sl;  // laser -> stereo
  Pose t_st;  // thermal -> stereo
  Pose t_lr;  // right -> left
  PinholeIntrinsics k_left, k_right, k_thermal;
  LaserModel laser;
};

enum class ThermalKind {
  EdgeMap,    // rasterize silhouette chains directly into thermal.png
  Intensity,  // render a flat-shaded thermal image for the Canny path
};

struct SceneSpec {
  std::vector<Box> boxes;
  uint8_t background_gray = 30;  // rays that miss everything
  RigSpec rig;
  NoiseSpec noise;
  uint64_t seed = 1;
  int features_per_frame = 350;
  ThermalKind thermal_kind = ThermalKind::EdgeMap;
  // world <- stereo pose per frame; auto-generated viewpoints when empty.
  std::vector<Pose> frame_poses;
};

SceneSpec load_scene_spec(const std::filesystem::path& path);

// Per-frame generator byproducts that never reach the on-disk dataset:
// the analytic labels and predictions the tests check against.
struct SynthFrameExtras {
  Pose world_from_stereo;
  // Aligned with the frame's correspondence rows:
  std::vector<uint8_t> match_edge_labels;
  std::vector<Vec3> match_points_stereo;  // the (noisy) points in stereo frame
  // Noise-free silhouette prediction for the laser edge detector.
  std::vector<std::pair<int, int>> predicted_laser_edge_cells;  // (ring, col)
};

struct SynthOutput {
  Dataset dataset;
  GroundTruth truth;
  std::vector<SynthFrameExtras> extras;
};

// Deterministic rendering of `n_frames` synchronized captures: organized
// laser scans by ray casting, stereo correspondences from sampled surface
// and silhouette points, and a thermal edge map (or flat-shaded image).
// Throws EmptyView when a sensor sees nothing in some frame.
SynthOutput generate(const SceneSpec& spec, int n_frames);

// generate() + write to the CLI dataset layout, plus ground_truth.json.
SynthOutput generate_to_disk(const SceneSpec& spec, int n_frames,
                             const std::filesystem::path& out_dir);

// Offsets a pose by a uniformly random rotation axis with geodesic angle
// uniform in [rot_min_deg, rot_max_deg] and a uniformly random translation
// direction with magnitude uniform in [trans_min, trans_max].
Pose perturb_pose(const Pose& t, double rot_min_deg, double rot_max_deg,
                  double trans_min, double trans_max, uint64_t seed);

// Analytic silhouette prediction on a noise-free scan: candidates are the
// near sides of object-id transitions whose own-side window is smooth on
// one object and whose far-side window is uniformly deeper than epsilon.
// Cell layout matches detect_laser_edges' flag layout over valid points.
std::vector<std::pair<int, int>> predict_laser_edges(
    const OrganizedScan& scan, const std::vector<int>& cell_object_ids,
    const LaserEdgeParams& params);

// Deterministic sub-stream seeding.
uint64_t mix_seed(uint64_t seed, uint64_t stream);

}  // namespace mmcal
