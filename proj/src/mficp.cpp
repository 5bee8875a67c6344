// mmcal - multi-modal extrinsic calibration toolkit
// SPDX-License-Identifier: Apache-2.0

#include "mmcal/mficp.hpp"

#include <cmath>

namespace mmcal {

void IcpParams::validate() const {
  if (!(gate > 0) || !(gate_floor > 0) || !(gate_decay > 0)) {
    throw CalibError(ErrorCode::InvalidArgument,
                     "icp: gate parameters must be positive");
  }
  if (!(pose_tolerance > 0) || max_outer_iterations < 1) {
    throw CalibError(ErrorCode::InvalidArgument,
                     "icp: bad iteration parameters");
  }
}

void prepare_frames(std::vector<IcpFrame>& frames) {
  for (auto& frame : frames) {
    if (!frame.laser_index) {
      frame.laser_index = std::make_shared<SpatialIndex>(frame.laser);
    }
  }
}

namespace {

struct FramePairs {
  std::vector<Vec3> stereo;  // stereo-frame points with a gated match
  std::vector<Vec3> laser;   // their nearest laser-frame points
};

// Correspondences under pose w = T_SL^-1 (stereo -> laser).
FramePairs match_frame(const IcpFrame& frame, const SpatialIndex& index,
                       const Pose& w, double gate) {
  FramePairs pairs;
  const double gate2 = gate * gate;
  for (const Vec3& p : frame.stereo.points) {
    const auto nn = index.nearest(w.apply(p));
    if (nn.squared_distance <= gate2) {
      pairs.stereo.push_back(p);
      pairs.laser.push_back(nn.point);
    }
  }
  return pairs;
}

double pairs_cost(const std::vector<FramePairs>& all, const Pose& w) {
  double cost = 0.0;
  for (const auto& pairs : all) {
    for (size_t i = 0; i < pairs.stereo.size(); ++i) {
      cost += (w.apply(pairs.stereo[i]) - pairs.laser[i]).squaredNorm();
    }
  }
  return cost;
}

ResidualBlock make_block(const FramePairs& pairs) {
  ResidualBlock block;
  block.residuals = [&pairs](const Pose& w) {
    Eigen::VectorXd r(3 * pairs.stereo.size());
    for (size_t i = 0; i < pairs.stereo.size(); ++i) {
      r.segment<3>(3 * i) = w.apply(pairs.stereo[i]) - pairs.laser[i];
    }
    return r;
  };
  block.jacobian = [&pairs](const Pose& w) {
    Eigen::MatrixXd J(3 * pairs.stereo.size(), 6);
    for (size_t i = 0; i < pairs.stereo.size(); ++i) {
      J.block<3, 3>(3 * i, 0) = Mat3::Identity();
      J.block<3, 3>(3 * i, 3) = -skew(w.apply(pairs.stereo[i]));
    }
    return J;
  };
  return block;
}

}  // namespace

double mficp_cost(const std::vector<IcpFrame>& frames, const Pose& t_sl,
                  double gate, size_t* gated_out) {
  const Pose w = inverse(t_sl);
  const double gate2 = gate * gate;
  double cost = 0.0;
  size_t matched = 0, dropped = 0;
  for (const auto& frame : frames) {
    if (frame.stereo.points.empty() || frame.laser.points.empty()) {
      throw CalibError(ErrorCode::InvalidArgument,
                       "mficp_cost: frame with an empty cloud");
    }
    std::shared_ptr<const SpatialIndex> owned;
    if (!frame.laser_index) owned = std::make_shared<SpatialIndex>(frame.laser);
    const SpatialIndex& index = frame.laser_index ? *frame.laser_index : *owned;
    for (const Vec3& p : frame.stereo.points) {
      const auto nn = index.nearest(w.apply(p));
      if (nn.squared_distance <= gate2) {
        cost += nn.squared_distance;
        ++matched;
      } else {
        ++dropped;
      }
    }
  }
  if (gated_out) *gated_out = dropped;
  if (matched == 0) {
    throw CalibError(ErrorCode::NoOverlap,
                     "mficp_cost: no correspondences within the gate");
  }
  return cost;
}

CalibrationResult calibrate_laser(const std::vector<IcpFrame>& frames,
                                  const Pose& t_sl_init,
                                  const IcpParams& params) {
  params.validate();
  if (frames.empty()) {
    throw CalibError(ErrorCode::InvalidArgument,
                     "calibrate_laser: need at least one frame");
  }

  // Indices over the (static) laser clouds, built once.
  std::vector<std::shared_ptr<const SpatialIndex>> indices;
  indices.reserve(frames.size());
  for (const auto& frame : frames) {
    if (frame.stereo.points.empty() || frame.laser.points.empty()) {
      throw CalibError(ErrorCode::InvalidArgument,
                       "calibrate_laser: frame with an empty cloud");
    }
    indices.push_back(frame.laser_index
                          ? frame.laser_index
                          : std::make_shared<SpatialIndex>(frame.laser));
  }

  CalibrationResult result;
  Pose w = inverse(t_sl_init);
  double gate = params.gate;

  for (int outer = 0; outer < params.max_outer_iterations; ++outer) {
    result.outer_iterations = outer + 1;

    std::vector<FramePairs> pairs;
    pairs.reserve(frames.size());
    size_t total = 0;
    for (size_t i = 0; i < frames.size(); ++i) {
      pairs.push_back(match_frame(frames[i], *indices[i], w, gate));
      total += pairs.back().stereo.size();
    }
    if (total == 0) {
      throw CalibError(ErrorCode::NoOverlap,
                       "calibrate_laser: no correspondences within the gate");
    }

    std::vector<ResidualBlock> blocks;
    blocks.reserve(pairs.size());
    for (const auto& fp : pairs) {
      if (!fp.stereo.empty()) blocks.push_back(make_block(fp));
    }

    OuterIterationRecord record;
    record.cost_start = pairs_cost(pairs, w);
    record.stereo_count = total;

    const SolveReport report = solve(blocks, w, params.solver);
    const Pose w_new = report.final_pose;
    record.cost_end = report.final_cost();
    result.iterations.push_back(record);
    result.cost_trace.push_back(record.cost_end);

    const double change =
        log_map(compose(w_new, inverse(w))).norm();
    w = w_new;

    if (report.termination == Termination::Stalled) {
      result.termination = "stalled";
      break;
    }
    if (change < params.pose_tolerance) {
      result.termination = "pose_tolerance";
      break;
    }
    gate = std::max(gate * params.gate_decay, params.gate_floor);
  }
  if (result.termination.empty()) result.termination = "max_outer_iterations";

  result.extrinsic = inverse(w);

  // Final per-frame correspondence counts at the solution.
  for (size_t i = 0; i < frames.size(); ++i) {
    FrameDiagnostics diag;
    diag.frame_id = frames[i].id;
    diag.stereo_count = match_frame(frames[i], *indices[i], w, gate).stereo.size();
    result.frame_stats.push_back(diag);
  }
  return result;
}

}  // namespace mmcal
