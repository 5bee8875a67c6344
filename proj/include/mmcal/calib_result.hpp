// mmcal - multi-modal extrinsic calibration toolkit
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "mmcal/geometry.hpp"

namespace mmcal {

struct FrameDiagnostics {
  std::string frame_id;
  size_t stereo_count = 0;  // inliers (thermal) or gated correspondences (ICP)
  size_t laser_count = 0;   // thermal-path laser inliers; unused for ICP
};

// One outer iteration of an alternating calibration loop. Costs are
// evaluated on the iteration's frozen correspondence/inlier sets, before
// and after the inner solve.
struct OuterIterationRecord {
  double cost_start = 0.0;
  double cost_end = 0.0;
  size_t stereo_count = 0;
  size_t laser_count = 0;
};

struct CalibrationResult {
  Pose extrinsic;
  std::vector<double> cost_trace;  // cost_end per outer iteration
  std::vector<OuterIterationRecord> iterations;
  std::vector<FrameDiagnostics> frame_stats;
  std::string termination;
  int outer_iterations = 0;
};

}  // namespace mmcal
