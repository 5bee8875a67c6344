// mmcal - multi-modal extrinsic calibration toolkit
// SPDX-License-Identifier: Apache-2.0

#include "mmcal/optimizer.hpp"

#include <Eigen/Cholesky>
#include <cmath>

namespace mmcal {

namespace {

constexpr double kMaxDamping = 1e12;

double total_cost(const std::vector<ResidualBlock>& blocks, const Pose& x) {
  double cost = 0.0;
  for (const auto& block : blocks) {
    cost += block.residuals(x).squaredNorm();
  }
  return cost;
}

}  // namespace

const char* termination_name(Termination t) {
  switch (t) {
    case Termination::CostTolerance: return "cost_tolerance";
    case Termination::StepTolerance: return "step_tolerance";
    case Termination::MaxIterations: return "max_iterations";
    case Termination::Stalled: return "stalled";
  }
  return "unknown";
}

Eigen::MatrixXd finite_difference_jacobian(const ResidualBlock& block,
                                           const Pose& x, double step) {
  if (!(step > 0)) {
    throw CalibError(ErrorCode::InvalidArgument,
                     "finite_difference_jacobian: step must be positive");
  }
  const Eigen::VectorXd r0 = block.residuals(x);
  Eigen::MatrixXd jac(r0.size(), 6);
  for (int i = 0; i < 6; ++i) {
    Vec6 delta = Vec6::Zero();
    delta[i] = step;
    const Pose plus = compose(exp_map(Twist::from_vector(delta)), x);
    delta[i] = -step;
    const Pose minus = compose(exp_map(Twist::from_vector(delta)), x);
    jac.col(i) =
        (block.residuals(plus) - block.residuals(minus)) / (2.0 * step);
  }
  return jac;
}

SolveReport solve(const std::vector<ResidualBlock>& blocks, const Pose& x0,
                  const SolveOptions& opts) {
  if (blocks.empty()) {
    throw CalibError(ErrorCode::InvalidArgument, "solve: no residual blocks");
  }
  if (!x0.is_valid(1e-6)) {
    throw CalibError(ErrorCode::InvalidArgument, "solve: invalid start pose");
  }

  SolveReport report;
  report.final_pose = x0;
  double cost = total_cost(blocks, x0);
  report.cost_trace.push_back(cost);

  if (cost == 0.0) {
    report.termination = Termination::CostTolerance;
    return report;
  }

  double damping = opts.initial_damping;
  Pose x = x0;

  for (int it = 0; it < opts.max_iterations; ++it) {
    report.iterations = it + 1;

    Eigen::Matrix<double, 6, 6> H = Eigen::Matrix<double, 6, 6>::Zero();
    Vec6 g = Vec6::Zero();
    for (const auto& block : blocks) {
      const Eigen::VectorXd r = block.residuals(x);
      const Eigen::MatrixXd J = block.jacobian
                                    ? block.jacobian(x)
                                    : finite_difference_jacobian(
                                          block, x, opts.fd_step);
      H += J.transpose() * J;
      g += J.transpose() * r;
    }

    // Try steps with increasing damping until one lowers the cost.
    bool accepted = false;
    while (!accepted) {
      Eigen::Matrix<double, 6, 6> damped = H;
      damped.diagonal().array() += damping;
      const Eigen::LLT<Eigen::Matrix<double, 6, 6>> llt(damped);
      if (llt.info() == Eigen::Success) {
        const Vec6 delta = llt.solve(-g);
        const Pose candidate = compose(exp_map(Twist::from_vector(delta)), x);
        const double new_cost = total_cost(blocks, candidate);
        if (new_cost < cost) {
          x = candidate;
          damping *= 0.5;
          report.cost_trace.push_back(new_cost);
          report.final_pose = x;
          const double decrease = cost - new_cost;
          cost = new_cost;
          accepted = true;
          if (decrease <= opts.cost_tolerance * std::max(cost, 1e-300)) {
            report.termination = Termination::CostTolerance;
            return report;
          }
          if (delta.norm() < opts.step_tolerance) {
            report.termination = Termination::StepTolerance;
            return report;
          }
          break;
        }
      }
      damping *= 2.0;
      if (damping > kMaxDamping) {
        report.termination = Termination::Stalled;
        return report;
      }
    }
  }

  report.termination = Termination::MaxIterations;
  return report;
}

}  // namespace mmcal
