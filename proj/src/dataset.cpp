// mmcal - multi-modal extrinsic calibration toolkit
// SPDX-License-Identifier: Apache-2.0

#include "mmcal/dataset.hpp"

#include <json.hpp>

#include <fstream>

namespace mmcal {

namespace {

using nlohmann::json;

json euler_to_json(const Pose& pose) {
  const EulerPose e = EulerPose::from_pose(pose);
  return json{{"x", e.x},         {"y", e.y},         {"z", e.z},
              {"roll_deg", e.roll}, {"pitch_deg", e.pitch}, {"yaw_deg", e.yaw}};
}

json matrix_to_json(const Pose& pose) {
  const Mat4 m = pose.matrix();
  json arr = json::array();
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) arr.push_back(m(r, c));
  }
  return arr;
}

Pose pose_from_euler_json(const json& j) {
  EulerPose e;
  e.x = j.value("x", 0.0);
  e.y = j.value("y", 0.0);
  e.z = j.value("z", 0.0);
  e.roll = j.value("roll_deg", 0.0);
  e.pitch = j.value("pitch_deg", 0.0);
  e.yaw = j.value("yaw_deg", 0.0);
  return e.to_pose();
}

Pose pose_from_matrix_json(const json& arr) {
  if (!arr.is_array() || arr.size() != 16) {
    throw CalibError(ErrorCode::ParseError,
                     "pose matrix must be a 16-element array");
  }
  Mat4 m;
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) m(r, c) = arr[4 * r + c].get<double>();
  }
  Pose pose = Pose::from_matrix(m);
  if (!pose.is_valid(1e-6)) {
    throw CalibError(ErrorCode::ValidationError,
                     "pose matrix is not a rigid transform");
  }
  return pose;
}

// Accepts {"pose": {...euler...}, "matrix": [...]} with the matrix taking
// precedence, or a bare euler object.
Pose pose_from_result_json(const json& j) {
  if (j.contains("matrix")) return pose_from_matrix_json(j["matrix"]);
  if (j.contains("pose")) return pose_from_euler_json(j["pose"]);
  return pose_from_euler_json(j);
}

json intrinsics_to_json(const PinholeIntrinsics& k) {
  return json{{"fx", k.fx},       {"fy", k.fy},     {"cx", k.cx},
              {"cy", k.cy},       {"width", k.width}, {"height", k.height}};
}

PinholeIntrinsics intrinsics_from_json(const json& j) {
  PinholeIntrinsics k;
  k.fx = j.at("fx").get<double>();
  k.fy = j.at("fy").get<double>();
  k.cx = j.at("cx").get<double>();
  k.cy = j.at("cy").get<double>();
  k.width = j.at("width").get<int>();
  k.height = j.at("height").get<int>();
  k.validate();
  return k;
}

json load_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw CalibError(ErrorCode::IoError, "cannot open: " + path.string());
  }
  try {
    json j;
    in >> j;
    return j;
  } catch (const json::exception& e) {
    throw CalibError(ErrorCode::ParseError, path.string() + ": " + e.what());
  }
}

void write_json_file(const json& j, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) {
    throw CalibError(ErrorCode::IoError, "cannot write: " + path.string());
  }
  out << j.dump(2) << "\n";
}

}  // namespace

DatasetManifest load_manifest(const std::filesystem::path& root) {
  const auto path = root / "manifest.json";
  const json j = load_json_file(path);
  try {
    DatasetManifest m;
    m.root = root;
    m.k_left = intrinsics_from_json(j.at("intrinsics").at("left"));
    m.k_right = intrinsics_from_json(j.at("intrinsics").at("right"));
    m.k_thermal = intrinsics_from_json(j.at("intrinsics").at("thermal"));
    m.t_lr = pose_from_euler_json(j.at("t_lr"));
    m.thermal_kind = j.value("thermal_kind", "intensity");
    if (m.thermal_kind != "intensity" && m.thermal_kind != "edge_map") {
      throw CalibError(ErrorCode::ValidationError,
                       path.string() + ": bad thermal_kind");
    }
    std::vector<std::string> seen;
    for (const auto& f : j.at("frames")) {
      const std::string id = f.at("id").get<std::string>();
      if (std::find(seen.begin(), seen.end(), id) != seen.end()) {
        throw CalibError(ErrorCode::ValidationError,
                         path.string() + ": duplicate frame id " + id);
      }
      seen.push_back(id);
      m.frame_ids.push_back(id);
    }
    if (m.frame_ids.empty()) {
      throw CalibError(ErrorCode::ValidationError,
                       path.string() + ": no frames listed");
    }
    return m;
  } catch (const json::exception& e) {
    throw CalibError(ErrorCode::ParseError, path.string() + ": " + e.what());
  }
}

Dataset load_dataset(const std::filesystem::path& root) {
  Dataset ds;
  ds.manifest = load_manifest(root);
  for (const std::string& id : ds.manifest.frame_ids) {
    const auto dir = root / "frames" / id;
    FrameData frame;
    frame.id = id;
    for (const char* name : {"left.png", "right.png", "thermal.png",
                             "laser.csv"}) {
      if (!std::filesystem::exists(dir / name)) {
        throw CalibError(ErrorCode::IoError,
                         "frame " + id + ": missing " + std::string(name) +
                             " under " + dir.string());
      }
    }
    frame.left = load_image_gray8(dir / "left.png");
    frame.right = load_image_gray8(dir / "right.png");
    frame.thermal = load_image_gray8(dir / "thermal.png");
    frame.scan = load_scan(dir / "laser.csv");
    if (std::filesystem::exists(dir / "matches.csv")) {
      frame.matches = load_matches(dir / "matches.csv");
      frame.has_matches = true;
    }
    ds.frames.push_back(std::move(frame));
  }
  return ds;
}

void write_dataset(const Dataset& dataset, const std::filesystem::path& root) {
  std::filesystem::create_directories(root / "frames");
  json manifest;
  manifest["intrinsics"] = {
      {"left", intrinsics_to_json(dataset.manifest.k_left)},
      {"right", intrinsics_to_json(dataset.manifest.k_right)},
      {"thermal", intrinsics_to_json(dataset.manifest.k_thermal)}};
  manifest["t_lr"] = euler_to_json(dataset.manifest.t_lr);
  manifest["thermal_kind"] = dataset.manifest.thermal_kind;
  json frames = json::array();
  for (const auto& frame : dataset.frames) {
    frames.push_back(json{{"id", frame.id}});
  }
  manifest["frames"] = frames;
  write_json_file(manifest, root / "manifest.json");

  for (const auto& frame : dataset.frames) {
    const auto dir = root / "frames" / frame.id;
    std::filesystem::create_directories(dir);
    save_image_gray8(dir / "left.png", frame.left);
    save_image_gray8(dir / "right.png", frame.right);
    save_image_gray8(dir / "thermal.png", frame.thermal);
    save_scan(dir / "laser.csv", frame.scan);
    if (frame.has_matches) save_matches(dir / "matches.csv", frame.matches);
  }
}

GroundTruth load_ground_truth(const std::filesystem::path& path) {
  const json j = load_json_file(path);
  try {
    GroundTruth truth;
    truth.t_sl = pose_from_result_json(j.at("t_sl"));
    truth.t_st = pose_from_result_json(j.at("t_st"));
    return truth;
  } catch (const json::exception& e) {
    throw CalibError(ErrorCode::ParseError, path.string() + ": " + e.what());
  }
}

void save_ground_truth(const GroundTruth& truth,
                       const std::filesystem::path& path) {
  json j;
  j["t_sl"] = {{"pose", euler_to_json(truth.t_sl)},
               {"matrix", matrix_to_json(truth.t_sl)}};
  j["t_st"] = {{"pose", euler_to_json(truth.t_st)},
               {"matrix", matrix_to_json(truth.t_st)}};
  write_json_file(j, path);
}

void save_calibration_result(const CalibrationResult& result,
                             const std::string& target,
                             const std::optional<Pose>& init,
                             const Config& params,
                             const std::filesystem::path& path) {
  json j;
  j["target"] = target;
  j["pose"] = euler_to_json(result.extrinsic);
  j["matrix"] = matrix_to_json(result.extrinsic);
  j["trace"] = result.cost_trace;
  j["termination"] = result.termination;
  j["outer_iterations"] = result.outer_iterations;
  if (init) {
    j["init"] = {{"pose", euler_to_json(*init)},
                 {"matrix", matrix_to_json(*init)}};
  }
  json iters = json::array();
  for (const auto& it : result.iterations) {
    iters.push_back(json{{"cost_start", it.cost_start},
                         {"cost_end", it.cost_end},
                         {"stereo_count", it.stereo_count},
                         {"laser_count", it.laser_count}});
  }
  j["iterations"] = iters;
  json frames = json::array();
  for (const auto& f : result.frame_stats) {
    frames.push_back(json{{"id", f.frame_id},
                          {"stereo_count", f.stereo_count},
                          {"laser_count", f.laser_count}});
  }
  j["frames"] = frames;
  json cfg = json::object();
  for (const auto& [key, value] : params.entries()) cfg[key] = value;
  j["params"] = cfg;
  write_json_file(j, path);
}

LoadedCalibration load_calibration_result(const std::filesystem::path& path) {
  const json j = load_json_file(path);
  try {
    LoadedCalibration out;
    out.extrinsic = pose_from_result_json(j);
    out.target = j.value("target", "");
    if (j.contains("init")) out.init = pose_from_result_json(j["init"]);
    return out;
  } catch (const json::exception& e) {
    throw CalibError(ErrorCode::ParseError, path.string() + ": " + e.what());
  }
}

EvalReport evaluate_calibration(const LoadedCalibration& calib,
                                const GroundTruth& truth) {
  const Pose& gt = calib.target == "laser" ? truth.t_sl : truth.t_st;
  EvalReport report;
  report.target = calib.target;
  report.rotation_error_deg =
      rad_to_deg(rotation_distance(calib.extrinsic.rotation, gt.rotation));
  report.translation_error_cm =
      (calib.extrinsic.translation - gt.translation).norm() * 100.0;
  if (calib.init) {
    report.init_rotation_error_deg =
        rad_to_deg(rotation_distance(calib.init->rotation, gt.rotation));
    report.init_translation_error_cm =
        (calib.init->translation - gt.translation).norm() * 100.0;
  }
  return report;
}

void save_eval_report(const EvalReport& report,
                      const std::filesystem::path& path) {
  json j;
  j["target"] = report.target;
  j["rotation_error_deg"] = report.rotation_error_deg;
  j["translation_error_cm"] = report.translation_error_cm;
  if (report.init_rotation_error_deg) {
    j["init_rotation_error_deg"] = *report.init_rotation_error_deg;
    j["init_translation_error_cm"] = *report.init_translation_error_cm;
  }
  write_json_file(j, path);
}

EulerPose euler_from_fields(double x, double y, double z, double roll,
                            double pitch, double yaw) {
  EulerPose e;
  e.x = x;
  e.y = y;
  e.z = z;
  e.roll = roll;
  e.pitch = pitch;
  e.yaw = yaw;
  return e;
}

}  // namespace mmcal
