// mmcal - multi-modal extrinsic calibration toolkit
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <memory>
#include <vector>

#include "mmcal/calib_result.hpp"
#include "mmcal/optimizer.hpp"
#include "mmcal/pointcloud.hpp"

namespace mmcal {

struct IcpParams {
  int max_outer_iterations = 50;
  double gate = 1.0;         // correspondence distance gate, meters
  double gate_decay = 0.9;   // per outer iteration
  double gate_floor = 0.2;   // meters
  double pose_tolerance = 1e-6;  // twist norm of the pose change
  SolveOptions solver;

  void validate() const;
};

// One synchronized capture for registration. The laser index may be shared
// across calls; it is built on demand when absent.
struct IcpFrame {
  std::string id;
  PointCloud stereo;  // stereo (left camera) frame
  PointCloud laser;   // laser frame
  std::shared_ptr<const SpatialIndex> laser_index;
};

// Builds any missing laser indices in place.
void prepare_frames(std::vector<IcpFrame>& frames);

// Registration cost: sum over frames and stereo points p of
// |T_SL^-1 p - q|^2, where q is p's nearest laser point, restricted to
// pairs within `gate`. Pass an infinite gate for the ungated sum.
// Throws NoOverlap when no pair over any frame passes the gate.
double mficp_cost(const std::vector<IcpFrame>& frames, const Pose& t_sl,
                  double gate, size_t* gated_out = nullptr);

// Multi-frame ICP for the laser->stereo extrinsic: alternates nearest-
// neighbor correspondence under the current estimate (distance gated) with
// one damped Gauss-Newton solve over the frozen pairs, jointly across all
// frames. Stops when the pose change drops below the tolerance.
CalibrationResult calibrate_laser(const std::vector<IcpFrame>& frames,
                                  const Pose& t_sl_init,
                                  const IcpParams& params = {});

}  // namespace mmcal
