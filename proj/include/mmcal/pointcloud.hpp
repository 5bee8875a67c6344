// mmcal - multi-modal extrinsic calibration toolkit
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <vector>

#include "mmcal/geometry.hpp"

namespace mmcal {

// Unordered 3D points with an optional per-point edge flag. `edge_flags`
// is either empty or the same length as `points`.
struct PointCloud {
  std::vector<Vec3> points;
  std::vector<uint8_t> edge_flags;

  size_t size() const { return points.size(); }
  bool has_edge_flags() const { return !edge_flags.empty(); }
  void validate() const;

  size_t edge_count() const;
  PointCloud edge_subset() const;
};

// Ring-ordered laser scan. Cell (ring, col) holds a point in the laser
// frame or is marked invalid (no return). Column order follows the azimuth
// order of the physical scan.
class OrganizedScan {
 public:
  OrganizedScan() = default;
  OrganizedScan(int rings, int cols);

  int rings() const { return rings_; }
  int cols() const { return cols_; }

  void set(int ring, int col, const Vec3& p);
  void set_invalid(int ring, int col);
  bool valid(int ring, int col) const { return valid_[index(ring, col)]; }
  const Vec3& at(int ring, int col) const { return points_[index(ring, col)]; }

  // All valid points, scan order (ring-major). No edge flags.
  PointCloud flatten() const;

 private:
  size_t index(int ring, int col) const {
    return static_cast<size_t>(ring) * cols_ + col;
  }
  int rings_ = 0;
  int cols_ = 0;
  std::vector<Vec3> points_;
  std::vector<uint8_t> valid_;
};

// Exact nearest-neighbor index (kd-tree). Ties in squared distance are
// broken toward the lowest stored point index, matching the brute-force
// reference ordering.
class SpatialIndex {
 public:
  // Throws EmptyCloud for an empty input.
  explicit SpatialIndex(const PointCloud& cloud);

  struct Result {
    Vec3 point;
    size_t index;
    double squared_distance;
  };
  Result nearest(const Vec3& query) const;

  size_t size() const { return points_.size(); }

 private:
  struct Node {
    int axis = -1;              // -1 marks a leaf
    double split = 0.0;
    int32_t left = -1, right = -1;
    uint32_t begin = 0, end = 0;  // leaf range into order_
  };
  int32_t build(uint32_t begin, uint32_t end);
  void search(int32_t node, const Vec3& q, Result* best) const;

  std::vector<Vec3> points_;    // original order
  std::vector<uint32_t> order_; // permutation grouped by leaves
  std::vector<Node> nodes_;
  int32_t root_ = -1;
};

inline SpatialIndex build_index(const PointCloud& cloud) {
  return SpatialIndex(cloud);
}

// ASCII PLY with float32 x/y/z vertex properties and an optional uchar
// `edge` property.
PointCloud load_cloud(const std::filesystem::path& path);
void save_cloud(const std::filesystem::path& path, const PointCloud& cloud);

// CSV with header `ring,col,x,y,z,valid`. An optional leading comment line
// `# rings=R cols=C` pins the scan dimensions; otherwise they are inferred
// from the largest indices present.
OrganizedScan load_scan(const std::filesystem::path& path);
void save_scan(const std::filesystem::path& path, const OrganizedScan& scan);

}  // namespace mmcal
