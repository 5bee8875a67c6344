// mmcal - multi-modal extrinsic calibration toolkit
// SPDX-License-Identifier: Apache-2.0

#include "mmcal/pipeline.hpp"

namespace mmcal {

PipelineParams PipelineParams::from_config(const Config& cfg) {
  PipelineParams p;
  p.sobel_threshold = cfg.get_double("sobel.threshold", p.sobel_threshold);
  p.stereo_max_depth = cfg.get_double("stereo.max_depth_m", p.stereo_max_depth);

  p.laser_edges.k = cfg.get_int("laser_edges.k", p.laser_edges.k);
  p.laser_edges.epsilon =
      cfg.get_double("laser_edges.epsilon_m", p.laser_edges.epsilon);
  p.laser_edges.wrap = cfg.get_bool("laser_edges.wrap", p.laser_edges.wrap);

  p.canny.sigma = cfg.get_double("canny.sigma", p.canny.sigma);
  p.canny.low = cfg.get_double("canny.low", p.canny.low);
  p.canny.high = cfg.get_double("canny.high", p.canny.high);
  p.canny.min_edge_length =
      cfg.get_int("canny.min_edge_length_px", p.canny.min_edge_length);
  p.canny.clutter_filter =
      cfg.get_bool("canny.clutter_filter", p.canny.clutter_filter);
  p.canny.clutter_fill_ratio =
      cfg.get_double("canny.clutter_fill_ratio", p.canny.clutter_fill_ratio);

  p.icp.max_outer_iterations =
      cfg.get_int("mficp.max_outer_iterations", p.icp.max_outer_iterations);
  p.icp.gate = cfg.get_double("mficp.gate_m", p.icp.gate);
  p.icp.gate_decay = cfg.get_double("mficp.gate_decay", p.icp.gate_decay);
  p.icp.gate_floor = cfg.get_double("mficp.gate_floor_m", p.icp.gate_floor);
  p.icp.pose_tolerance =
      cfg.get_double("mficp.pose_tolerance", p.icp.pose_tolerance);

  p.reae.inlier_threshold =
      cfg.get_double("reae.inlier_threshold_px", p.reae.inlier_threshold);
  p.reae.max_outer_iterations =
      cfg.get_int("reae.max_outer_iterations", p.reae.max_outer_iterations);
  p.reae.rot_grid_step_deg =
      cfg.get_double("reae.rot_grid_step_deg", p.reae.rot_grid_step_deg);
  p.reae.rot_half_range_deg =
      cfg.get_double("reae.rot_half_range_deg", p.reae.rot_half_range_deg);
  p.reae.trans_grid_step =
      cfg.get_double("reae.trans_grid_step_m", p.reae.trans_grid_step);
  p.reae.trans_half_range =
      cfg.get_double("reae.trans_half_range_m", p.reae.trans_half_range);
  p.reae.pose_tolerance =
      cfg.get_double("reae.pose_tolerance", p.reae.pose_tolerance);
  p.reae.skip_rough = cfg.get_bool("reae.skip_rough", p.reae.skip_rough);

  for (SolveOptions* solver : {&p.icp.solver, &p.reae.solver}) {
    solver->max_iterations =
        cfg.get_int("solver.max_iterations", solver->max_iterations);
    solver->initial_damping =
        cfg.get_double("solver.initial_damping", solver->initial_damping);
    solver->cost_tolerance =
        cfg.get_double("solver.cost_tolerance", solver->cost_tolerance);
    solver->step_tolerance =
        cfg.get_double("solver.step_tolerance", solver->step_tolerance);
  }

  p.overlay_depth_max =
      cfg.get_double("overlay.depth_max_m", p.overlay_depth_max);
  return p;
}

namespace {

void log_warning(PipelineLog* log, const std::string& message) {
  if (log) log->warnings.push_back(message);
}

StereoRig rig_of(const Dataset& dataset) {
  return StereoRig{dataset.manifest.k_left, dataset.manifest.k_right,
                   dataset.manifest.t_lr};
}

PointCloud stereo_cloud_for_frame(const FrameData& frame, const StereoRig& rig,
                                  const PipelineParams& params,
                                  PipelineLog* log,
                                  CorrespondenceSet* kept_matches) {
  if (!frame.has_matches) {
    throw CalibError(ErrorCode::IoError,
                     "frame " + frame.id +
                         ": matches.csv is missing; precompute stereo "
                         "correspondences for every frame");
  }
  TriangulationStats stats;
  std::vector<size_t> kept;
  PointCloud cloud = triangulate_set(frame.matches, rig,
                                     params.stereo_max_depth, &stats, &kept);
  if (log) {
    log->triangulation.input += stats.input;
    log->triangulation.degenerate += stats.degenerate;
    log->triangulation.cheirality += stats.cheirality;
    log->triangulation.too_deep += stats.too_deep;
    log->triangulation.kept += stats.kept;
  }
  if (kept_matches) {
    kept_matches->clear();
    for (size_t idx : kept) kept_matches->push_back(frame.matches[idx]);
  }
  return cloud;
}

}  // namespace

std::vector<IcpFrame> build_icp_frames(const Dataset& dataset,
                                       const PipelineParams& params,
                                       PipelineLog* log) {
  const StereoRig rig = rig_of(dataset);
  std::vector<IcpFrame> frames;
  for (const auto& frame : dataset.frames) {
    IcpFrame out;
    out.id = frame.id;
    out.stereo = stereo_cloud_for_frame(frame, rig, params, log, nullptr);
    out.laser = frame.scan.flatten();
    if (out.stereo.points.empty()) {
      log_warning(log, "frame " + frame.id +
                           ": no usable stereo points after triangulation");
      continue;
    }
    if (out.laser.points.empty()) {
      log_warning(log, "frame " + frame.id + ": laser scan has no returns");
      continue;
    }
    frames.push_back(std::move(out));
  }
  if (frames.empty()) {
    throw CalibError(ErrorCode::DegenerateProblem,
                     "no frame has both stereo and laser points");
  }
  return frames;
}

std::vector<EdgeProjectionSet> build_edge_sets(const Dataset& dataset,
                                               const Pose& t_sl,
                                               const PipelineParams& params,
                                               PipelineLog* log) {
  const StereoRig rig = rig_of(dataset);
  const bool thermal_is_edge_map = dataset.manifest.thermal_kind == "edge_map";

  std::vector<EdgeProjectionSet> sets;
  for (const auto& frame : dataset.frames) {
    // Thermal edges and the attraction field.
    EdgeMap raw_edges;
    if (thermal_is_edge_map) {
      raw_edges = EdgeMap(frame.thermal.width(), frame.thermal.height(), 0);
      for (int y = 0; y < frame.thermal.height(); ++y) {
        for (int x = 0; x < frame.thermal.width(); ++x) {
          raw_edges.at(x, y) = frame.thermal.at(x, y) > 0 ? 1 : 0;
        }
      }
    } else {
      raw_edges = canny(frame.thermal, params.canny);
    }
    const EdgeMap filtered =
        filter_edges(raw_edges, params.canny.min_edge_length,
                     params.canny.clutter_filter,
                     params.canny.clutter_fill_ratio);

    size_t raw_count = 0, kept_count = 0;
    for (uint8_t v : raw_edges.data()) raw_count += (v != 0);
    for (uint8_t v : filtered.data()) kept_count += (v != 0);
    if (raw_count > 0 && kept_count < raw_count * 7 / 10) {
      log_warning(log, "frame " + frame.id +
                           ": edge filtering removed more than 30% of edge "
                           "pixels");
    }

    EdgeProjectionSet set;
    set.frame_id = frame.id;
    try {
      set.field = std::make_shared<AttractionField>(
          AttractionField::build(filtered));
    } catch (const CalibError& e) {
      if (e.code() == ErrorCode::EmptyEdges) {
        log_warning(log, "frame " + frame.id +
                             ": no thermal edges, frame skipped");
        continue;
      }
      throw;
    }

    // Stereo edge points via Sobel tagging of the triangulated features.
    CorrespondenceSet kept_matches;
    const PointCloud cloud =
        stereo_cloud_for_frame(frame, rig, params, log, &kept_matches);
    const EdgeMap left_edges = sobel_edges(frame.left, params.sobel_threshold);
    const EdgeMap right_edges =
        sobel_edges(frame.right, params.sobel_threshold);
    const PointCloud tagged =
        tag_stereo_edge_points(kept_matches, left_edges, right_edges, cloud);
    set.stereo_edges = tagged.edge_subset();

    // Laser edge points from the organized scan.
    const PointCloud laser_tagged =
        detect_laser_edges(frame.scan, params.laser_edges);
    set.laser_edges = laser_tagged.edge_subset();

    set.thermal = dataset.manifest.k_thermal;
    set.t_sl = t_sl;
    if (set.stereo_edges.points.empty() && set.laser_edges.points.empty()) {
      log_warning(log, "frame " + frame.id +
                           ": no stereo or laser edge points, frame skipped");
      continue;
    }
    sets.push_back(std::move(set));
  }
  if (sets.empty()) {
    throw CalibError(ErrorCode::DegenerateProblem,
                     "no frame produced edges for thermal calibration");
  }
  return sets;
}

CalibrationResult run_calibrate_laser(const Dataset& dataset, const Pose& init,
                                      const PipelineParams& params,
                                      PipelineLog* log) {
  std::vector<IcpFrame> frames = build_icp_frames(dataset, params, log);
  prepare_frames(frames);
  return calibrate_laser(frames, init, params.icp);
}

CalibrationResult run_calibrate_thermal(const Dataset& dataset,
                                        const Pose& init, const Pose& t_sl,
                                        const PipelineParams& params,
                                        PipelineLog* log) {
  const auto sets = build_edge_sets(dataset, t_sl, params, log);
  return calibrate_thermal(sets, init, params.reae);
}

ImageRGB make_overlay(const Dataset& dataset, const std::string& frame_id,
                      OverlayMode mode, const Pose& t_sl, const Pose& t_st,
                      const PipelineParams& params, PipelineLog* log) {
  const FrameData* frame = nullptr;
  for (const auto& f : dataset.frames) {
    if (f.id == frame_id) {
      frame = &f;
      break;
    }
  }
  if (!frame) {
    std::string ids;
    for (const auto& f : dataset.frames) ids += " " + f.id;
    throw CalibError(ErrorCode::ValidationError,
                     "unknown frame id '" + frame_id + "'; valid ids:" + ids);
  }

  auto mark = [](ImageRGB& img, const Vec2& uv) {
    const int x = static_cast<int>(std::lround(uv.x()));
    const int y = static_cast<int>(std::lround(uv.y()));
    img.set(x, y, 255, 0, 0);
    img.set(x + 1, y, 255, 0, 0);
    img.set(x - 1, y, 255, 0, 0);
    img.set(x, y + 1, 255, 0, 0);
    img.set(x, y - 1, 255, 0, 0);
  };

  size_t marks = 0;
  if (mode == OverlayMode::LaserOnRgb) {
    ImageRGB img = ImageRGB::from_gray(frame->left);
    const PointCloud laser = frame->scan.flatten();
    for (const Vec3& q : laser.points) {
      const Vec3 p_cam = t_sl.apply(q);  // laser -> stereo(left)
      if (p_cam.z() <= 0 || p_cam.z() > params.overlay_depth_max) continue;
      Vec2 uv;
      if (!try_project(dataset.manifest.k_left, p_cam, &uv)) continue;
      if (uv.x() < 0 || uv.x() > img.width - 1 || uv.y() < 0 ||
          uv.y() > img.height - 1) {
        continue;
      }
      mark(img, uv);
      ++marks;
    }
    if (marks == 0) log_warning(log, "overlay: no points within depth_max");
    return img;
  }

  // edges-on-thermal
  Dataset single;
  single.manifest = dataset.manifest;
  single.frames.push_back(*frame);
  const auto sets = build_edge_sets(single, t_sl, params, log);
  ImageRGB img = ImageRGB::from_gray(frame->thermal);
  for (const auto& set : sets) {
    const Pose w = inverse(t_st);
    const Pose wl = compose(w, set.t_sl);
    for (const Vec3& p : set.stereo_edges.points) {
      Vec2 uv;
      if (try_project(set.thermal, w.apply(p), &uv) && uv.x() >= 0 &&
          uv.x() <= img.width - 1 && uv.y() >= 0 && uv.y() <= img.height - 1) {
        mark(img, uv);
        ++marks;
      }
    }
    for (const Vec3& q : set.laser_edges.points) {
      const Vec3 p_cam = wl.apply(q);
      if (p_cam.z() <= 0 || p_cam.z() > params.overlay_depth_max) continue;
      Vec2 uv;
      if (try_project(set.thermal, p_cam, &uv) && uv.x() >= 0 &&
          uv.x() <= img.width - 1 && uv.y() >= 0 && uv.y() <= img.height - 1) {
        mark(img, uv);
        ++marks;
      }
    }
  }
  if (marks == 0) log_warning(log, "overlay: nothing projected into view");
  return img;
}

}  // namespace mmcal
