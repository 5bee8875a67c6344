// mmcal - multi-modal extrinsic calibration toolkit
// SPDX-License-Identifier: Apache-2.0

#include "mmcal/reae_calib.hpp"

#include <cmath>

namespace mmcal {

void ReaeParams::validate() const {
  if (!(inlier_threshold > 0)) {
    throw CalibError(ErrorCode::InvalidArgument,
                     "reae: inlier threshold must be positive");
  }
  if (!(rot_grid_step_deg > 0) || !(trans_grid_step > 0)) {
    throw CalibError(ErrorCode::InvalidArgument,
                     "reae: grid sizes must be positive");
  }
  if (rot_half_range_deg < rot_grid_step_deg ||
      trans_half_range < trans_grid_step) {
    throw CalibError(ErrorCode::InvalidArgument,
                     "reae: grid half-ranges must cover at least one step");
  }
  if (max_outer_iterations < 1) {
    throw CalibError(ErrorCode::InvalidArgument,
                     "reae: need at least one outer iteration");
  }
}

Vec2 project_stereo_edge(const Vec3& p, const Pose& t_st,
                         const PinholeIntrinsics& k) {
  return project(k, inverse(t_st).apply(p));
}

bool try_project_stereo_edge(const Vec3& p, const Pose& t_st,
                             const PinholeIntrinsics& k, Vec2* uv) {
  return try_project(k, inverse(t_st).apply(p), uv);
}

Vec2 project_laser_edge(const Vec3& q, const Pose& t_st, const Pose& t_sl,
                        const PinholeIntrinsics& k) {
  return project(k, compose(inverse(t_st), t_sl).apply(q));
}

bool try_project_laser_edge(const Vec3& q, const Pose& t_st, const Pose& t_sl,
                            const PinholeIntrinsics& k, Vec2* uv) {
  return try_project(k, compose(inverse(t_st), t_sl).apply(q), uv);
}

InlierSelection select_inliers(const EdgeProjectionSet& set, const Pose& t_st,
                               double th) {
  InlierSelection out;
  const Pose w = inverse(t_st);                 // stereo -> thermal
  const Pose wl = compose(w, set.t_sl);         // laser -> thermal
  const AttractionField& field = *set.field;

  auto scan = [&](const std::vector<Vec3>& points, const Pose& chain,
                  std::vector<uint32_t>& keep) {
    for (uint32_t i = 0; i < points.size(); ++i) {
      Vec2 uv;
      if (!try_project(set.thermal, chain.apply(points[i]), &uv)) continue;
      if (!field.in_domain(uv)) continue;
      if (field.sample(uv) <= th) keep.push_back(i);
    }
  };
  scan(set.stereo_edges.points, w, out.stereo);
  scan(set.laser_edges.points, wl, out.laser);
  return out;
}

namespace {

// Clamped field value for one point under `chain` (native frame ->
// thermal). Behind-camera points read as `fallback` with no gradient.
double clamped_value(const Vec3& p, const Pose& chain,
                     const PinholeIntrinsics& k, const AttractionField& field,
                     double fallback) {
  Vec2 uv;
  if (!try_project(k, chain.apply(p), &uv)) return fallback;
  return field.sample(field.clamp_to_domain(uv));
}

}  // namespace

double reae_cost(const std::vector<EdgeProjectionSet>& sets, const Pose& t_st,
                 const std::vector<InlierSelection>& inliers, double th) {
  if (sets.size() != inliers.size()) {
    throw CalibError(ErrorCode::InvalidArgument,
                     "reae_cost: inlier selections do not match sets");
  }
  size_t total = 0;
  for (const auto& sel : inliers) total += sel.total();
  if (total == 0) {
    throw CalibError(ErrorCode::DegenerateProblem,
                     "reae_cost: no inlier edge points");
  }

  double cost = 0.0;
  for (size_t s = 0; s < sets.size(); ++s) {
    const auto& set = sets[s];
    const Pose w = inverse(t_st);
    const Pose wl = compose(w, set.t_sl);
    for (uint32_t i : inliers[s].stereo) {
      cost += clamped_value(set.stereo_edges.points[i], w, set.thermal,
                            *set.field, th);
    }
    for (uint32_t i : inliers[s].laser) {
      cost += clamped_value(set.laser_edges.points[i], wl, set.thermal,
                            *set.field, th);
    }
  }
  return cost;
}

Eigen::Matrix<double, 1, 6> reae_jacobian_row(const Vec3& point,
                                              const AttractionField& field,
                                              const PinholeIntrinsics& k,
                                              const Pose& chain) {
  Eigen::Matrix<double, 1, 6> row = Eigen::Matrix<double, 1, 6>::Zero();
  const Vec3 p_cam = chain.apply(point);
  Vec2 uv;
  if (!try_project(k, p_cam, &uv)) return row;
  if (!field.in_domain(uv)) return row;
  const Vec2 grad = field.sample_gradient(uv);
  row = grad.transpose() * projection_jacobian(k, p_cam);
  return row;
}

namespace {

size_t count_inliers(const std::vector<EdgeProjectionSet>& sets,
                     const Pose& t_st, double th) {
  size_t total = 0;
  for (const auto& set : sets) total += select_inliers(set, t_st, th).total();
  return total;
}

// Residual blocks over w = T_ST^-1 for one frame's frozen inliers. Residual
// entries are raw attraction-field values; rows follow the gradient /
// projection chain. Out-of-domain and behind-camera points contribute a
// clamped constant with a zero row so the residual dimension stays fixed.
ResidualBlock make_reae_block(const EdgeProjectionSet& set,
                              const std::vector<uint32_t>& indices,
                              bool laser_side, double th) {
  const PointCloud& cloud = laser_side ? set.laser_edges : set.stereo_edges;
  ResidualBlock block;
  block.residuals = [&set, &indices, &cloud, laser_side, th](const Pose& w) {
    const Pose chain = laser_side ? compose(w, set.t_sl) : w;
    Eigen::VectorXd r(indices.size());
    for (size_t i = 0; i < indices.size(); ++i) {
      r[i] = clamped_value(cloud.points[indices[i]], chain, set.thermal,
                           *set.field, th);
    }
    return r;
  };
  block.jacobian = [&set, &indices, &cloud, laser_side](const Pose& w) {
    const Pose chain = laser_side ? compose(w, set.t_sl) : w;
    Eigen::MatrixXd J(indices.size(), 6);
    for (size_t i = 0; i < indices.size(); ++i) {
      J.row(i) = reae_jacobian_row(cloud.points[indices[i]], *set.field,
                                   set.thermal, chain);
    }
    return J;
  };
  return block;
}

}  // namespace

Pose rough_calibrate(const std::vector<EdgeProjectionSet>& sets,
                     const Pose& t_init, const ReaeParams& params) {
  params.validate();
  if (sets.empty()) {
    throw CalibError(ErrorCode::InvalidArgument,
                     "rough_calibrate: no edge projection sets");
  }

  const EulerPose init = EulerPose::from_pose(t_init);

  struct Best {
    size_t count = 0;
    double offset_norm2 = std::numeric_limits<double>::infinity();
    long order = -1;
    Pose pose;
    bool found = false;
  };

  auto consider = [&](Best& best, const Pose& cand, double norm2, long order) {
    const size_t count = count_inliers(sets, cand, params.inlier_threshold);
    if (count == 0) return;
    const bool better =
        !best.found || count > best.count ||
        (count == best.count &&
         (norm2 < best.offset_norm2 ||
          (norm2 == best.offset_norm2 && order < best.order)));
    if (better) best = Best{count, norm2, order, cand, true};
  };

  // Stage 1: rotation sweep, translation pinned to the initial guess.
  const int rot_steps =
      static_cast<int>(std::floor(params.rot_half_range_deg /
                                  params.rot_grid_step_deg + 1e-9));
  Best rot_best;
  long order = 0;
  for (int ir = -rot_steps; ir <= rot_steps; ++ir) {
    for (int ip = -rot_steps; ip <= rot_steps; ++ip) {
      for (int iy = -rot_steps; iy <= rot_steps; ++iy) {
        EulerPose e = init;
        const double dr = ir * params.rot_grid_step_deg;
        const double dp = ip * params.rot_grid_step_deg;
        const double dy = iy * params.rot_grid_step_deg;
        e.roll += dr;
        e.pitch += dp;
        e.yaw += dy;
        consider(rot_best, e.to_pose(), dr * dr + dp * dp + dy * dy, order++);
      }
    }
  }
  if (!rot_best.found) {
    throw CalibError(ErrorCode::InitOutOfRange,
                     "rough_calibrate: zero inliers over the rotation grid");
  }

  // Stage 2: translation sweep around the stage-1 winner, rotation fixed.
  const int trans_steps = static_cast<int>(
      std::floor(params.trans_half_range / params.trans_grid_step + 1e-9));
  Best trans_best;
  order = 0;
  for (int ix = -trans_steps; ix <= trans_steps; ++ix) {
    for (int iy = -trans_steps; iy <= trans_steps; ++iy) {
      for (int iz = -trans_steps; iz <= trans_steps; ++iz) {
        const Vec3 offset(ix * params.trans_grid_step,
                          iy * params.trans_grid_step,
                          iz * params.trans_grid_step);
        Pose cand = rot_best.pose;
        cand.translation += offset;
        consider(trans_best, cand, offset.squaredNorm(), order++);
      }
    }
  }
  if (!trans_best.found) {
    throw CalibError(ErrorCode::InitOutOfRange,
                     "rough_calibrate: zero inliers over the translation grid");
  }
  return trans_best.pose;
}

CalibrationResult calibrate_thermal(const std::vector<EdgeProjectionSet>& sets,
                                    const Pose& t_init,
                                    const ReaeParams& params) {
  params.validate();
  if (sets.empty()) {
    throw CalibError(ErrorCode::InvalidArgument,
                     "calibrate_thermal: no edge projection sets");
  }
  size_t total_edges = 0;
  for (const auto& set : sets) {
    total_edges += set.stereo_edges.size() + set.laser_edges.size();
  }
  if (total_edges == 0) {
    throw CalibError(ErrorCode::DegenerateProblem,
                     "calibrate_thermal: no edge points in any frame");
  }

  CalibrationResult result;
  Pose t_st = params.skip_rough ? t_init : rough_calibrate(sets, t_init, params);

  std::vector<InlierSelection> prev_inliers;
  double prev_cost = std::numeric_limits<double>::infinity();

  for (int outer = 0; outer < params.max_outer_iterations; ++outer) {
    result.outer_iterations = outer + 1;

    std::vector<InlierSelection> inliers;
    inliers.reserve(sets.size());
    size_t n_stereo = 0, n_laser = 0;
    for (const auto& set : sets) {
      inliers.push_back(select_inliers(set, t_st, params.inlier_threshold));
      n_stereo += inliers.back().stereo.size();
      n_laser += inliers.back().laser.size();
    }
    if (n_stereo + n_laser == 0) {
      throw CalibError(ErrorCode::DegenerateProblem,
                       "calibrate_thermal: inlier sets are empty");
    }

    OuterIterationRecord record;
    record.stereo_count = n_stereo;
    record.laser_count = n_laser;
    record.cost_start = reae_cost(sets, t_st, inliers, params.inlier_threshold);

    std::vector<ResidualBlock> blocks;
    for (size_t s = 0; s < sets.size(); ++s) {
      if (!inliers[s].stereo.empty()) {
        blocks.push_back(make_reae_block(sets[s], inliers[s].stereo, false,
                                         params.inlier_threshold));
      }
      if (!inliers[s].laser.empty()) {
        blocks.push_back(make_reae_block(sets[s], inliers[s].laser, true,
                                         params.inlier_threshold));
      }
    }

    Pose w = inverse(t_st);
    const SolveReport report = solve(blocks, w, params.solver);
    const Pose t_st_new = inverse(report.final_pose);
    const double cost_end =
        reae_cost(sets, t_st_new, inliers, params.inlier_threshold);

    if (cost_end > record.cost_start) {
      // The squared-residual inner step raised the raw edge-alignment sum;
      // reject it and stop at the current pose.
      record.cost_end = record.cost_start;
      result.iterations.push_back(record);
      result.cost_trace.push_back(record.cost_end);
      result.termination = "no_decrease";
      break;
    }

    record.cost_end = cost_end;
    result.iterations.push_back(record);
    result.cost_trace.push_back(cost_end);

    const double change = log_map(compose(inverse(t_st_new), t_st)).norm();
    t_st = t_st_new;

    if (report.termination == Termination::Stalled) {
      result.termination = "stalled";
      break;
    }
    if (change < params.pose_tolerance) {
      result.termination = "pose_tolerance";
      break;
    }
    const bool inliers_stable = !prev_inliers.empty() && inliers == prev_inliers;
    const bool cost_stable =
        std::isfinite(prev_cost) &&
        std::abs(prev_cost - cost_end) <=
            params.cost_tolerance * std::max(prev_cost, 1e-300);
    if (inliers_stable && cost_stable) {
      result.termination = "inliers_stable";
      break;
    }
    prev_inliers = std::move(inliers);
    prev_cost = cost_end;
  }
  if (result.termination.empty()) result.termination = "max_outer_iterations";

  result.extrinsic = t_st;

  for (const auto& set : sets) {
    const auto sel = select_inliers(set, t_st, params.inlier_threshold);
    FrameDiagnostics diag;
    diag.frame_id = set.frame_id;
    diag.stereo_count = sel.stereo.size();
    diag.laser_count = sel.laser.size();
    result.frame_stats.push_back(diag);
  }
  return result;
}

}  // namespace mmcal
