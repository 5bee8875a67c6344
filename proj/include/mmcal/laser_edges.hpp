// mmcal - multi-modal extrinsic calibration toolkit
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "mmcal/pointcloud.hpp"

namespace mmcal {

struct LaserEdgeParams {
  int k = 3;              // neighborhood radius in columns
  double epsilon = 0.3;   // depth difference threshold, meters
  bool wrap = false;      // azimuth wrap-around for full-360 scans

  void validate() const;
};

// Depth-discontinuity edge points on an organized scan. A point is flagged
// when its k valid neighbors on one side all stay within epsilon of its
// range while the k valid neighbors on the other side are all deeper than
// epsilon; this keeps only the near-side points, which remain visible from
// a camera. A window that runs off the ring or contains an invalid return
// disqualifies the candidate. Output contains every valid point in scan
// order, with edge flags set on the detected subset.
PointCloud detect_laser_edges(const OrganizedScan& scan,
                              const LaserEdgeParams& params);

struct LaserEdgeStats {
  std::vector<size_t> points_per_ring;
  std::vector<size_t> edges_per_ring;
  size_t total_points = 0;
  size_t total_edges = 0;
  double edge_fraction = 0.0;
};

LaserEdgeStats edge_stats(const OrganizedScan& scan,
                          const PointCloud& flagged);

}  // namespace mmcal
