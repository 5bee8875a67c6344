// mmcal - multi-modal extrinsic calibration toolkit
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <memory>
#include <vector>

#include "mmcal/calib_result.hpp"
#include "mmcal/optimizer.hpp"
#include "mmcal/pointcloud.hpp"
#include "mmcal/thermal_edges.hpp"

namespace mmcal {

struct ReaeParams {
  double inlier_threshold = 10.0;     // px, inclusive
  int max_outer_iterations = 30;
  double rot_grid_step_deg = 1.0;     // rough-calibration rotation grid
  double rot_half_range_deg = 6.0;    // per axis
  double trans_grid_step = 0.04;      // meters
  double trans_half_range = 0.12;     // per axis
  double pose_tolerance = 1e-6;       // outer-loop twist norm
  double cost_tolerance = 1e-8;       // outer-loop relative decrease
  bool skip_rough = false;
  SolveOptions solver;

  void validate() const;
};

// Per-frame evaluation bundle for the edge-alignment cost: edge points in
// their native frames, the frame's attraction field, the thermal camera
// intrinsics, and the (fixed) laser->stereo extrinsic for Eq.-style laser
// projection.
struct EdgeProjectionSet {
  std::string frame_id;
  PointCloud stereo_edges;  // stereo frame, edge points only
  PointCloud laser_edges;   // laser frame, edge points only
  std::shared_ptr<const AttractionField> field;
  PinholeIntrinsics thermal;
  Pose t_sl;  // laser -> stereo
};

// Projection of a stereo-frame point into the thermal image under the
// thermal->stereo extrinsic t_st: u = (1/Z) K (T_ST^-1 p)_{1:3}.
// Throws BehindCamera when the transformed depth is <= 1e-9.
Vec2 project_stereo_edge(const Vec3& p, const Pose& t_st,
                         const PinholeIntrinsics& k);
bool try_project_stereo_edge(const Vec3& p, const Pose& t_st,
                             const PinholeIntrinsics& k, Vec2* uv);

// Laser-frame variant, composed through T_ST^-1 T_SL.
Vec2 project_laser_edge(const Vec3& q, const Pose& t_st, const Pose& t_sl,
                        const PinholeIntrinsics& k);
bool try_project_laser_edge(const Vec3& q, const Pose& t_st, const Pose& t_sl,
                            const PinholeIntrinsics& k, Vec2* uv);

// Indices of edge points whose projection succeeds, lands in the field's
// samplable interior, and reads an attraction value <= th.
struct InlierSelection {
  std::vector<uint32_t> stereo;
  std::vector<uint32_t> laser;

  size_t total() const { return stereo.size() + laser.size(); }
  bool operator==(const InlierSelection&) const = default;
};
InlierSelection select_inliers(const EdgeProjectionSet& set, const Pose& t_st,
                               double th);

// Edge-alignment cost over frozen inlier sets: the sum of attraction-field
// values at the projections. Points that leave the samplable region
// contribute the clamped boundary value; points that fall behind the
// camera contribute the inlier threshold as a neutral constant.
// Throws DegenerateProblem when every inlier set is empty.
double reae_cost(const std::vector<EdgeProjectionSet>& sets, const Pose& t_st,
                 const std::vector<InlierSelection>& inliers,
                 double th = 10.0);

// One row of the edge-alignment Jacobian w.r.t. the left perturbation of
// the stereo->thermal pose: the field gradient at the projection chained
// with the pinhole projection Jacobian. `chain` maps the point's native
// frame into the thermal frame. Clamped or behind-camera points get a zero
// row.
Eigen::Matrix<double, 1, 6> reae_jacobian_row(const Vec3& point,
                                              const AttractionField& field,
                                              const PinholeIntrinsics& k,
                                              const Pose& chain);

// Two-stage grid search around the initial guess maximizing the inlier
// count: rotation offsets first (translation fixed), then translation
// offsets around the stage-1 winner. Ties prefer the smallest offset norm,
// then the earliest grid candidate in lexicographic sweep order.
// Throws InitOutOfRange when no grid candidate yields a single inlier.
Pose rough_calibrate(const std::vector<EdgeProjectionSet>& sets,
                     const Pose& t_init, const ReaeParams& params);

// Full thermal extrinsic calibration: rough grid search, then alternating
// inlier selection (frozen per outer iteration) and damped Gauss-Newton
// on the edge-alignment cost. An outer step is accepted only if it does
// not increase the cost of its frozen problem.
CalibrationResult calibrate_thermal(const std::vector<EdgeProjectionSet>& sets,
                                    const Pose& t_init,
                                    const ReaeParams& params = {});

}  // namespace mmcal
