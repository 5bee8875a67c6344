// mmcal - multi-modal extrinsic calibration toolkit
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "mmcal/calib_result.hpp"
#include "mmcal/config.hpp"
#include "mmcal/geometry.hpp"
#include "mmcal/image.hpp"
#include "mmcal/pointcloud.hpp"
#include "mmcal/stereo_frontend.hpp"

namespace mmcal {

// Root description of a capture: intrinsics, the stereo right->left
// transform, and the per-frame file listing under frames/<id>/.
struct DatasetManifest {
  std::filesystem::path root;
  PinholeIntrinsics k_left, k_right, k_thermal;
  Pose t_lr;
  std::string thermal_kind = "intensity";  // or "edge_map"
  std::vector<std::string> frame_ids;
};

struct FrameData {
  std::string id;
  ImageU8 left, right, thermal;
  OrganizedScan scan;
  CorrespondenceSet matches;
  bool has_matches = false;
};

struct Dataset {
  DatasetManifest manifest;
  std::vector<FrameData> frames;
};

struct GroundTruth {
  Pose t_sl;  // laser -> stereo
  Pose t_st;  // thermal -> stereo
};

DatasetManifest load_manifest(const std::filesystem::path& root);
Dataset load_dataset(const std::filesystem::path& root);
void write_dataset(const Dataset& dataset,
                   const std::filesystem::path& root);

GroundTruth load_ground_truth(const std::filesystem::path& path);
void save_ground_truth(const GroundTruth& truth,
                       const std::filesystem::path& path);

// Calibration result JSON: estimated pose as Euler angles plus a row-major
// 4x4 matrix, the outer-iteration cost trace, per-frame counts, the
// parameter snapshot, and the termination reason.
void save_calibration_result(const CalibrationResult& result,
                             const std::string& target,  // "laser"/"thermal"
                             const std::optional<Pose>& init,
                             const Config& params,
                             const std::filesystem::path& path);

struct LoadedCalibration {
  Pose extrinsic;
  std::string target;
  std::optional<Pose> init;
};
LoadedCalibration load_calibration_result(const std::filesystem::path& path);

struct EvalReport {
  std::string target;
  double rotation_error_deg = 0.0;
  double translation_error_cm = 0.0;
  std::optional<double> init_rotation_error_deg;
  std::optional<double> init_translation_error_cm;
};

EvalReport evaluate_calibration(const LoadedCalibration& calib,
                                const GroundTruth& truth);
void save_eval_report(const EvalReport& report,
                      const std::filesystem::path& path);

// Pose <-> JSON-ish helpers shared by the writers above.
EulerPose euler_from_fields(double x, double y, double z, double roll,
                            double pitch, double yaw);

}  // namespace mmcal
