// mmcal - multi-modal extrinsic calibration toolkit
// SPDX-License-Identifier: Apache-2.0

#include "mmcal/laser_edges.hpp"

#include <cmath>

namespace mmcal {

void LaserEdgeParams::validate() const {
  if (k < 1) {
    throw CalibError(ErrorCode::InvalidArgument, "laser edges: k must be >= 1");
  }
  if (!(epsilon > 0)) {
    throw CalibError(ErrorCode::InvalidArgument,
                     "laser edges: epsilon must be positive");
  }
}

namespace {

// Gathers the k ranges on one side of col (dir = -1 left, +1 right).
// Returns false if the window leaves the ring (wrap disabled) or touches an
// invalid return.
bool gather_window(const OrganizedScan& scan, int ring, int col, int dir,
                   int k, bool wrap, double* ranges) {
  const int cols = scan.cols();
  for (int i = 1; i <= k; ++i) {
    int c = col + dir * i;
    if (wrap) {
      c = ((c % cols) + cols) % cols;
    } else if (c < 0 || c >= cols) {
      return false;
    }
    if (!scan.valid(ring, c)) return false;
    ranges[i - 1] = scan.at(ring, c).norm();
  }
  return true;
}

}  // namespace

PointCloud detect_laser_edges(const OrganizedScan& scan,
                              const LaserEdgeParams& params) {
  params.validate();
  if (scan.cols() <= 2 * params.k) {
    throw CalibError(ErrorCode::InvalidArgument,
                     "detect_laser_edges: scan needs more than 2k columns");
  }

  PointCloud out;
  std::vector<double> left(params.k), right(params.k);
  for (int ring = 0; ring < scan.rings(); ++ring) {
    for (int col = 0; col < scan.cols(); ++col) {
      if (!scan.valid(ring, col)) continue;
      const Vec3& p = scan.at(ring, col);
      out.points.push_back(p);

      bool edge = false;
      if (gather_window(scan, ring, col, -1, params.k, params.wrap,
                        left.data()) &&
          gather_window(scan, ring, col, +1, params.k, params.wrap,
                        right.data())) {
        const double range = p.norm();
        auto all_close = [&](const std::vector<double>& w) {
          for (double r : w) {
            if (std::abs(r - range) > params.epsilon) return false;
          }
          return true;
        };
        auto all_deeper = [&](const std::vector<double>& w) {
          for (double r : w) {
            if (!(r - range > params.epsilon)) return false;
          }
          return true;
        };
        const bool alpha0 = all_close(left), alpha1 = all_close(right);
        const bool beta0 = all_deeper(left), beta1 = all_deeper(right);
        edge = (alpha0 && beta1) || (beta0 && alpha1);
      }
      out.edge_flags.push_back(edge ? 1 : 0);
    }
  }
  return out;
}

LaserEdgeStats edge_stats(const OrganizedScan& scan,
                          const PointCloud& flagged) {
  LaserEdgeStats stats;
  stats.points_per_ring.assign(scan.rings(), 0);
  stats.edges_per_ring.assign(scan.rings(), 0);
  size_t i = 0;
  for (int ring = 0; ring < scan.rings(); ++ring) {
    for (int col = 0; col < scan.cols(); ++col) {
      if (!scan.valid(ring, col)) continue;
      ++stats.points_per_ring[ring];
      ++stats.total_points;
      if (i < flagged.edge_flags.size() && flagged.edge_flags[i]) {
        ++stats.edges_per_ring[ring];
        ++stats.total_edges;
      }
      ++i;
    }
  }
  stats.edge_fraction =
      stats.total_points ? double(stats.total_edges) / stats.total_points : 0.0;
  return stats;
}

}  // namespace mmcal
