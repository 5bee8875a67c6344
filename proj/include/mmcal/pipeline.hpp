// mmcal - multi-modal extrinsic calibration toolkit
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "mmcal/dataset.hpp"
#include "mmcal/laser_edges.hpp"
#include "mmcal/mficp.hpp"
#include "mmcal/reae_calib.hpp"
#include "mmcal/thermal_edges.hpp"

namespace mmcal {

// Every named default of the toolkit, overridable through Config entries
// with the same dotted names (see README).
struct PipelineParams {
  double sobel_threshold = 100.0;         // sobel.threshold
  double stereo_max_depth = 80.0;         // stereo.max_depth_m
  LaserEdgeParams laser_edges;            // laser_edges.{k,epsilon_m,wrap}
  CannyParams canny;                      // canny.{sigma,low,high,...}
  IcpParams icp;                          // mficp.*
  ReaeParams reae;                        // reae.*
  double overlay_depth_max = 10.0;        // overlay.depth_max_m

  static PipelineParams from_config(const Config& cfg);
};

struct PipelineLog {
  std::vector<std::string> warnings;
  TriangulationStats triangulation;
};

// Triangulates each frame's correspondences into a stereo cloud and pairs
// it with the flattened laser scan. Frames must carry matches.csv.
std::vector<IcpFrame> build_icp_frames(const Dataset& dataset,
                                       const PipelineParams& params,
                                       PipelineLog* log = nullptr);

// Full edge pipeline for the thermal stage: Sobel-tagged stereo edge
// points, laser depth-discontinuity edge points, and the attraction field
// per frame. Frames whose thermal channel yields no edges are skipped with
// a warning.
std::vector<EdgeProjectionSet> build_edge_sets(const Dataset& dataset,
                                               const Pose& t_sl,
                                               const PipelineParams& params,
                                               PipelineLog* log = nullptr);

CalibrationResult run_calibrate_laser(const Dataset& dataset,
                                      const Pose& init,
                                      const PipelineParams& params,
                                      PipelineLog* log = nullptr);

CalibrationResult run_calibrate_thermal(const Dataset& dataset,
                                        const Pose& init, const Pose& t_sl,
                                        const PipelineParams& params,
                                        PipelineLog* log = nullptr);

enum class OverlayMode { LaserOnRgb, EdgesOnThermal };

// Diagnostic overlay: red marks at projected laser points (left image) or
// projected stereo/laser edge points (thermal image).
ImageRGB make_overlay(const Dataset& dataset, const std::string& frame_id,
                      OverlayMode mode, const Pose& t_sl, const Pose& t_st,
                      const PipelineParams& params,
                      PipelineLog* log = nullptr);

}  // namespace mmcal
