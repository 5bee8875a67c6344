// mmcal - multi-modal extrinsic calibration toolkit
// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end: dataset synthesis, the two calibration stages,
// evaluation against ground truth, and diagnostic overlays.

#include <CLI11.hpp>

#include <iostream>

#include "mmcal/mmcal.hpp"

namespace {

using namespace mmcal;

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::IoError:
    case ErrorCode::ParseError:
    case ErrorCode::ValidationError:
    case ErrorCode::EmptyCloud:
    case ErrorCode::InvalidArgument:
      return 2;
    case ErrorCode::DegenerateProblem:
    case ErrorCode::NoOverlap:
    case ErrorCode::EmptyEdges:
    case ErrorCode::EmptyView:
    case ErrorCode::DegenerateGeometry:
      return 3;
    case ErrorCode::InitOutOfRange:
      return 4;
    default:
      return 1;
  }
}

Pose parse_init(const std::string& init_csv, const std::string& init_file) {
  if (!init_file.empty()) {
    return load_calibration_result(init_file).extrinsic;
  }
  std::array<double, 6> v{};
  std::stringstream ss(init_csv);
  for (int i = 0; i < 6; ++i) {
    std::string tok;
    if (!std::getline(ss, tok, ',')) {
      throw CalibError(ErrorCode::InvalidArgument,
                       "--init expects x,y,z,roll,pitch,yaw");
    }
    v[i] = std::stod(tok);
  }
  return euler_from_fields(v[0], v[1], v[2], v[3], v[4], v[5]).to_pose();
}

Config load_config(const std::string& config_file,
                   const std::vector<std::string>& overrides) {
  Config cfg;
  if (!config_file.empty()) cfg = Config::from_file(config_file);
  for (const auto& line : overrides) cfg.merge_line(line);
  return cfg;
}

void print_warnings(const PipelineLog& log) {
  for (const auto& w : log.warnings) std::cerr << "warning: " << w << "\n";
}

int run(int argc, char** argv) {
  CLI::App app{"Targetless stereo/thermal/laser extrinsic calibration"};
  app.require_subcommand(1);

  // --- synth ---------------------------------------------------------------
  auto* synth_cmd = app.add_subcommand(
      "synth", "Generate a synthetic dataset with known ground truth");
  std::string synth_spec, synth_out;
  int synth_frames = 5;
  synth_cmd->add_option("--spec", synth_spec, "Scene spec JSON")->required();
  synth_cmd->add_option("--out", synth_out, "Output dataset dir")->required();
  synth_cmd->add_option("--frames", synth_frames, "Number of frames");

  // --- calibrate-laser -------------------------------------------------------
  auto* claser = app.add_subcommand(
      "calibrate-laser", "Estimate the laser->stereo extrinsic (multi-frame ICP)");
  std::string cl_dataset, cl_init, cl_init_file, cl_config, cl_out =
      "laser_calib.json";
  std::vector<std::string> cl_sets;
  claser->add_option("--dataset", cl_dataset, "Dataset root")->required();
  claser->add_option("--init", cl_init, "Initial guess x,y,z,roll,pitch,yaw "
                                        "(m, deg)");
  claser->add_option("--init-file", cl_init_file, "Initial guess JSON");
  claser->add_option("--config", cl_config, "Config file (key=value)");
  claser->add_option("--set", cl_sets, "Config override key=value");
  claser->add_option("--out", cl_out, "Output JSON path");

  // --- calibrate-thermal ------------------------------------------------------
  auto* ctherm = app.add_subcommand(
      "calibrate-thermal",
      "Estimate the thermal->stereo extrinsic (edge alignment)");
  std::string ct_dataset, ct_init, ct_init_file, ct_config, ct_laser,
      ct_out = "thermal_calib.json";
  std::vector<std::string> ct_sets;
  ctherm->add_option("--dataset", ct_dataset, "Dataset root")->required();
  ctherm->add_option("--init", ct_init, "Initial guess x,y,z,roll,pitch,yaw");
  ctherm->add_option("--init-file", ct_init_file, "Initial guess JSON");
  ctherm->add_option("--laser-calib", ct_laser,
                     "laser_calib.json from calibrate-laser")->required();
  ctherm->add_option("--config", ct_config, "Config file (key=value)");
  ctherm->add_option("--set", ct_sets, "Config override key=value");
  ctherm->add_option("--out", ct_out, "Output JSON path");

  // --- evaluate --------------------------------------------------------------
  auto* ev = app.add_subcommand("evaluate",
                                "Compare a calibration result to ground truth");
  std::string ev_result, ev_truth, ev_out;
  ev->add_option("--result", ev_result, "Calibration result JSON")->required();
  ev->add_option("--truth", ev_truth, "ground_truth.json")->required();
  ev->add_option("--out", ev_out, "Optional eval_report.json path");

  // --- overlay ---------------------------------------------------------------
  auto* ov = app.add_subcommand("overlay", "Write a projection overlay PNG");
  std::string ov_dataset, ov_calib, ov_laser_calib, ov_frame, ov_mode,
      ov_out = "overlay.png", ov_config;
  std::vector<std::string> ov_sets;
  double ov_depth = -1.0;
  ov->add_option("--dataset", ov_dataset, "Dataset root")->required();
  ov->add_option("--calib", ov_calib, "Calibration result JSON")->required();
  ov->add_option("--laser-calib", ov_laser_calib,
                 "laser_calib.json (edges-on-thermal mode)");
  ov->add_option("--frame", ov_frame, "Frame id")->required();
  ov->add_option("--mode", ov_mode, "laser-on-rgb | edges-on-thermal")
      ->required();
  ov->add_option("--depth-max", ov_depth, "Depth filter in meters");
  ov->add_option("--config", ov_config, "Config file (key=value)");
  ov->add_option("--set", ov_sets, "Config override key=value");
  ov->add_option("--out", ov_out, "Output PNG path");

  CLI11_PARSE(app, argc, argv);

  if (synth_cmd->parsed()) {
    const SceneSpec spec = load_scene_spec(synth_spec);
    generate_to_disk(spec, synth_frames, synth_out);
    std::cout << "wrote dataset with " << synth_frames << " frames to "
              << synth_out << "\n";
    return 0;
  }

  if (claser->parsed()) {
    const Config cfg = load_config(cl_config, cl_sets);
    const PipelineParams params = PipelineParams::from_config(cfg);
    const Pose init = parse_init(cl_init, cl_init_file);
    const Dataset dataset = load_dataset(cl_dataset);
    PipelineLog log;
    const CalibrationResult result =
        run_calibrate_laser(dataset, init, params, &log);
    print_warnings(log);
    save_calibration_result(result, "laser", init, cfg, cl_out);
    const EulerPose e = EulerPose::from_pose(result.extrinsic);
    std::cout << "laser->stereo: x=" << e.x << " y=" << e.y << " z=" << e.z
              << " roll=" << e.roll << " pitch=" << e.pitch
              << " yaw=" << e.yaw << " (" << result.termination << ", "
              << result.outer_iterations << " outer iterations)\n"
              << "wrote " << cl_out << "\n";
    return 0;
  }

  if (ctherm->parsed()) {
    const Config cfg = load_config(ct_config, ct_sets);
    const PipelineParams params = PipelineParams::from_config(cfg);
    const Pose init = parse_init(ct_init, ct_init_file);
    const Pose t_sl = load_calibration_result(ct_laser).extrinsic;
    const Dataset dataset = load_dataset(ct_dataset);
    PipelineLog log;
    const CalibrationResult result =
        run_calibrate_thermal(dataset, init, t_sl, params, &log);
    print_warnings(log);
    save_calibration_result(result, "thermal", init, cfg, ct_out);
    const EulerPose e = EulerPose::from_pose(result.extrinsic);
    std::cout << "thermal->stereo: x=" << e.x << " y=" << e.y << " z=" << e.z
              << " roll=" << e.roll << " pitch=" << e.pitch
              << " yaw=" << e.yaw << " (" << result.termination << ", "
              << result.outer_iterations << " outer iterations)\n"
              << "wrote " << ct_out << "\n";
    return 0;
  }

  if (ev->parsed()) {
    const LoadedCalibration calib = load_calibration_result(ev_result);
    if (calib.target.empty()) {
      throw CalibError(ErrorCode::ValidationError,
                       ev_result + ": result has no 'target' field");
    }
    const GroundTruth truth = load_ground_truth(ev_truth);
    const EvalReport report = evaluate_calibration(calib, truth);
    std::cout << report.target
              << " rotation error: " << report.rotation_error_deg
              << " deg, translation error: " << report.translation_error_cm
              << " cm\n";
    if (report.init_rotation_error_deg) {
      std::cout << "init rotation error: " << *report.init_rotation_error_deg
                << " deg, init translation error: "
                << *report.init_translation_error_cm << " cm\n";
    }
    if (!ev_out.empty()) save_eval_report(report, ev_out);
    return 0;
  }

  if (ov->parsed()) {
    const Config cfg = load_config(ov_config, ov_sets);
    PipelineParams params = PipelineParams::from_config(cfg);
    if (ov_depth >= 0) params.overlay_depth_max = ov_depth;
    const Dataset dataset = load_dataset(ov_dataset);
    const LoadedCalibration calib = load_calibration_result(ov_calib);

    OverlayMode mode;
    Pose t_sl, t_st;
    if (ov_mode == "laser-on-rgb") {
      mode = OverlayMode::LaserOnRgb;
      t_sl = calib.extrinsic;
    } else if (ov_mode == "edges-on-thermal") {
      mode = OverlayMode::EdgesOnThermal;
      t_st = calib.extrinsic;
      if (ov_laser_calib.empty()) {
        throw CalibError(ErrorCode::InvalidArgument,
                         "edges-on-thermal mode needs --laser-calib");
      }
      t_sl = load_calibration_result(ov_laser_calib).extrinsic;
    } else {
      throw CalibError(ErrorCode::InvalidArgument,
                       "--mode must be laser-on-rgb or edges-on-thermal");
    }
    PipelineLog log;
    const ImageRGB img =
        make_overlay(dataset, ov_frame, mode, t_sl, t_st, params, &log);
    print_warnings(log);
    save_image_rgb8(ov_out, img);
    std::cout << "wrote " << ov_out << "\n";
    return 0;
  }

  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const CalibError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
