// mmcal - multi-modal extrinsic calibration toolkit
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <string>
#include <vector>

#include "mmcal/geometry.hpp"

namespace mmcal {

// One block of residuals over a Pose. `residuals` must return a vector of
// fixed dimension for a given problem instance. `jacobian`, when set, fills
// an m x 6 matrix of derivatives w.r.t. the left perturbation
// x <- exp(dxi) * x, columns ordered (translation, rotation). Blocks
// without an analytic jacobian are differentiated numerically.
struct ResidualBlock {
  std::function<Eigen::VectorXd(const Pose&)> residuals;
  std::function<Eigen::MatrixXd(const Pose&)> jacobian;  // optional
};

struct SolveOptions {
  int max_iterations = 50;
  double initial_damping = 1e-4;
  double cost_tolerance = 1e-8;   // relative decrease per accepted step
  double step_tolerance = 1e-10;  // twist norm of the update
  double fd_step = 1e-7;          // for blocks without analytic jacobians
};

enum class Termination {
  CostTolerance,
  StepTolerance,
  MaxIterations,
  Stalled,  // damping exceeded 1e12 with every step rejected
};

const char* termination_name(Termination t);

struct SolveReport {
  Pose final_pose;
  std::vector<double> cost_trace;  // initial cost, then accepted steps
  Termination termination = Termination::MaxIterations;
  int iterations = 0;

  double initial_cost() const { return cost_trace.front(); }
  double final_cost() const { return cost_trace.back(); }
};

// Damped Gauss-Newton (Levenberg-Marquardt) over a single Pose. Cost is the
// sum of squared residuals across blocks. Updates are applied as
// x <- exp_map(dxi) * x; damping doubles on a rejected step and halves on an
// accepted one. A stall (damping above 1e12, nothing accepted) is reported
// in the termination reason with the best pose so far.
SolveReport solve(const std::vector<ResidualBlock>& blocks, const Pose& x0,
                  const SolveOptions& opts = {});

// Central differences of a block's residuals along the 6 left-perturbation
// directions.
Eigen::MatrixXd finite_difference_jacobian(const ResidualBlock& block,
                                           const Pose& x, double step);

}  // namespace mmcal
