// mmcal - multi-modal extrinsic calibration toolkit
// SPDX-License-Identifier: Apache-2.0

#include "mmcal/pointcloud.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace mmcal {

void PointCloud::validate() const {
  for (size_t i = 0; i < points.size(); ++i) {
    if (!points[i].allFinite()) {
      throw CalibError(ErrorCode::ValidationError,
                       "point cloud: non-finite coordinate at index " +
                           std::to_string(i));
    }
  }
  if (!edge_flags.empty() && edge_flags.size() != points.size()) {
    throw CalibError(ErrorCode::ValidationError,
                     "point cloud: edge flag count does not match points");
  }
}

size_t PointCloud::edge_count() const {
  size_t n = 0;
  for (uint8_t f : edge_flags) n += (f != 0);
  return n;
}

PointCloud PointCloud::edge_subset() const {
  PointCloud out;
  for (size_t i = 0; i < edge_flags.size(); ++i) {
    if (edge_flags[i]) out.points.push_back(points[i]);
  }
  return out;
}

OrganizedScan::OrganizedScan(int rings, int cols)
    : rings_(rings), cols_(cols),
      points_(static_cast<size_t>(rings) * cols, Vec3::Zero()),
      valid_(static_cast<size_t>(rings) * cols, 0) {}

void OrganizedScan::set(int ring, int col, const Vec3& p) {
  points_[index(ring, col)] = p;
  valid_[index(ring, col)] = 1;
}

void OrganizedScan::set_invalid(int ring, int col) {
  valid_[index(ring, col)] = 0;
}

PointCloud OrganizedScan::flatten() const {
  PointCloud out;
  out.points.reserve(points_.size());
  for (int r = 0; r < rings_; ++r) {
    for (int c = 0; c < cols_; ++c) {
      if (valid_[index(r, c)]) out.points.push_back(points_[index(r, c)]);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// SpatialIndex

namespace {
constexpr uint32_t kLeafSize = 16;
}

SpatialIndex::SpatialIndex(const PointCloud& cloud) : points_(cloud.points) {
  if (points_.empty()) {
    throw CalibError(ErrorCode::EmptyCloud,
                     "build_index: cannot index an empty cloud");
  }
  order_.resize(points_.size());
  for (uint32_t i = 0; i < order_.size(); ++i) order_[i] = i;
  nodes_.reserve(2 * points_.size() / kLeafSize + 2);
  root_ = build(0, static_cast<uint32_t>(order_.size()));
}

int32_t SpatialIndex::build(uint32_t begin, uint32_t end) {
  Node node;
  if (end - begin <= kLeafSize) {
    node.begin = begin;
    node.end = end;
    nodes_.push_back(node);
    return static_cast<int32_t>(nodes_.size() - 1);
  }

  Vec3 lo = points_[order_[begin]], hi = lo;
  for (uint32_t i = begin + 1; i < end; ++i) {
    lo = lo.cwiseMin(points_[order_[i]]);
    hi = hi.cwiseMax(points_[order_[i]]);
  }
  int axis = 0;
  (hi - lo).maxCoeff(&axis);

  const uint32_t mid = begin + (end - begin) / 2;
  std::nth_element(order_.begin() + begin, order_.begin() + mid,
                   order_.begin() + end, [&](uint32_t a, uint32_t b) {
                     return points_[a][axis] < points_[b][axis];
                   });
  node.axis = axis;
  node.split = points_[order_[mid]][axis];
  const int32_t self = static_cast<int32_t>(nodes_.size());
  nodes_.push_back(node);
  const int32_t left = build(begin, mid);
  const int32_t right = build(mid, end);
  nodes_[self].left = left;
  nodes_[self].right = right;
  return self;
}

void SpatialIndex::search(int32_t node_id, const Vec3& q, Result* best) const {
  const Node& node = nodes_[node_id];
  if (node.axis < 0) {
    for (uint32_t i = node.begin; i < node.end; ++i) {
      const uint32_t idx = order_[i];
      const double d2 = (points_[idx] - q).squaredNorm();
      if (d2 < best->squared_distance ||
          (d2 == best->squared_distance && idx < best->index)) {
        best->squared_distance = d2;
        best->index = idx;
      }
    }
    return;
  }
  const double diff = q[node.axis] - node.split;
  const int32_t near = diff < 0 ? node.left : node.right;
  const int32_t far = diff < 0 ? node.right : node.left;
  search(near, q, best);
  // The far side can still hold an equally close, lower-index point, so do
  // not prune on exact equality.
  if (diff * diff <= best->squared_distance) search(far, q, best);
}

SpatialIndex::Result SpatialIndex::nearest(const Vec3& query) const {
  Result best;
  best.index = points_.size();
  best.squared_distance = std::numeric_limits<double>::infinity();
  search(root_, query, &best);
  best.point = points_[best.index];
  return best;
}

// ---------------------------------------------------------------------------
// File I/O

namespace {

[[noreturn]] void parse_fail(const std::filesystem::path& path, size_t line,
                             const std::string& what) {
  throw CalibError(ErrorCode::ParseError, path.string() + ":" +
                                              std::to_string(line) + ": " +
                                              what);
}

}  // namespace

PointCloud load_cloud(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw CalibError(ErrorCode::IoError,
                     "cannot open PLY file: " + path.string());
  }
  std::string line;
  size_t line_no = 0;
  auto next_line = [&]() -> bool {
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      return true;
    }
    return false;
  };

  if (!next_line() || line != "ply") parse_fail(path, line_no, "missing 'ply' magic");
  size_t vertex_count = 0;
  bool has_edge = false;
  std::vector<std::string> properties;
  bool in_vertex_element = false;
  while (true) {
    if (!next_line()) parse_fail(path, line_no, "unterminated header");
    std::istringstream ss(line);
    std::string word;
    ss >> word;
    if (word == "end_header") break;
    if (word == "comment") continue;
    if (word == "format") {
      std::string fmt;
      ss >> fmt;
      if (fmt != "ascii") parse_fail(path, line_no, "only ascii PLY supported");
    } else if (word == "element") {
      std::string name;
      size_t count;
      ss >> name >> count;
      in_vertex_element = (name == "vertex");
      if (in_vertex_element) vertex_count = count;
    } else if (word == "property" && in_vertex_element) {
      std::string type, name;
      ss >> type >> name;
      properties.push_back(name);
      if (name == "edge") has_edge = true;
    }
  }
  if (properties.size() < 3 || properties[0] != "x" || properties[1] != "y" ||
      properties[2] != "z") {
    parse_fail(path, line_no, "vertex element must start with x y z");
  }

  PointCloud cloud;
  cloud.points.reserve(vertex_count);
  if (has_edge) cloud.edge_flags.reserve(vertex_count);
  for (size_t i = 0; i < vertex_count; ++i) {
    if (!next_line()) parse_fail(path, line_no, "truncated vertex list");
    std::istringstream ss(line);
    double x, y, z;
    if (!(ss >> x >> y >> z)) parse_fail(path, line_no, "bad vertex row");
    if (!std::isfinite(x) || !std::isfinite(y) || !std::isfinite(z)) {
      throw CalibError(ErrorCode::ValidationError,
                       path.string() + ":" + std::to_string(line_no) +
                           ": non-finite coordinate");
    }
    cloud.points.emplace_back(x, y, z);
    if (has_edge) {
      int e;
      if (!(ss >> e)) parse_fail(path, line_no, "missing edge flag");
      cloud.edge_flags.push_back(e ? 1 : 0);
    }
  }
  return cloud;
}

void save_cloud(const std::filesystem::path& path, const PointCloud& cloud) {
  cloud.validate();
  std::ofstream out(path);
  if (!out) {
    throw CalibError(ErrorCode::IoError,
                     "cannot write PLY file: " + path.string());
  }
  const bool has_edge = cloud.has_edge_flags();
  out << "ply\nformat ascii 1.0\nelement vertex " << cloud.size() << "\n"
      << "property float x\nproperty float y\nproperty float z\n";
  if (has_edge) out << "property uchar edge\n";
  out << "end_header\n";
  out.precision(9);
  for (size_t i = 0; i < cloud.size(); ++i) {
    const Vec3& p = cloud.points[i];
    out << p.x() << " " << p.y() << " " << p.z();
    if (has_edge) out << " " << int(cloud.edge_flags[i] ? 1 : 0);
    out << "\n";
  }
}

OrganizedScan load_scan(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw CalibError(ErrorCode::IoError,
                     "cannot open scan file: " + path.string());
  }
  std::string line;
  size_t line_no = 0;
  int declared_rings = -1, declared_cols = -1;

  if (!std::getline(in, line)) {
    throw CalibError(ErrorCode::ParseError, path.string() + ":1: empty file");
  }
  ++line_no;
  if (!line.empty() && line[0] == '#') {
    std::sscanf(line.c_str(), "# rings=%d cols=%d", &declared_rings,
                &declared_cols);
    if (!std::getline(in, line)) parse_fail(path, line_no, "missing header");
    ++line_no;
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "ring,col,x,y,z,valid") {
    parse_fail(path, line_no, "expected header 'ring,col,x,y,z,valid'");
  }

  struct Row {
    int ring, col, valid;
    Vec3 p;
  };
  std::vector<Row> rows;
  int max_ring = -1, max_col = -1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    Row r;
    std::istringstream ss(line);
    char c1, c2, c3, c4, c5;
    if (!(ss >> r.ring >> c1 >> r.col >> c2 >> r.p.x() >> c3 >> r.p.y() >>
          c4 >> r.p.z() >> c5 >> r.valid) ||
        c1 != ',' || c2 != ',' || c3 != ',' || c4 != ',' || c5 != ',') {
      parse_fail(path, line_no, "malformed row");
    }
    if (r.ring < 0 || r.col < 0) parse_fail(path, line_no, "negative index");
    if (r.valid != 0 && r.valid != 1) {
      throw CalibError(ErrorCode::ValidationError,
                       path.string() + ":" + std::to_string(line_no) +
                           ": valid must be 0 or 1");
    }
    if (r.valid && !r.p.allFinite()) {
      throw CalibError(ErrorCode::ValidationError,
                       path.string() + ":" + std::to_string(line_no) +
                           ": non-finite coordinate");
    }
    max_ring = std::max(max_ring, r.ring);
    max_col = std::max(max_col, r.col);
    rows.push_back(r);
  }
  if (rows.empty()) {
    throw CalibError(ErrorCode::ParseError,
                     path.string() + ": scan has no data rows");
  }

  const int rings = declared_rings > 0 ? declared_rings : max_ring + 1;
  const int cols = declared_cols > 0 ? declared_cols : max_col + 1;
  if (max_ring >= rings || max_col >= cols) {
    throw CalibError(ErrorCode::ValidationError,
                     path.string() + ": ring/col index out of declared range");
  }

  OrganizedScan scan(rings, cols);
  std::vector<uint8_t> seen(static_cast<size_t>(rings) * cols, 0);
  for (const Row& r : rows) {
    const size_t idx = static_cast<size_t>(r.ring) * cols + r.col;
    if (seen[idx]) {
      throw CalibError(ErrorCode::ValidationError,
                       path.string() + ": duplicate (ring,col) pair " +
                           std::to_string(r.ring) + "," +
                           std::to_string(r.col));
    }
    seen[idx] = 1;
    if (r.valid) scan.set(r.ring, r.col, r.p);
  }
  return scan;
}

void save_scan(const std::filesystem::path& path, const OrganizedScan& scan) {
  std::ofstream out(path);
  if (!out) {
    throw CalibError(ErrorCode::IoError,
                     "cannot write scan file: " + path.string());
  }
  out << "# rings=" << scan.rings() << " cols=" << scan.cols() << "\n";
  out << "ring,col,x,y,z,valid\n";
  out.precision(9);
  for (int r = 0; r < scan.rings(); ++r) {
    for (int c = 0; c < scan.cols(); ++c) {
      if (scan.valid(r, c)) {
        const Vec3& p = scan.at(r, c);
        out << r << "," << c << "," << p.x() << "," << p.y() << "," << p.z()
            << ",1\n";
      } else {
        out << r << "," << c << ",0,0,0,0\n";
      }
    }
  }
}

}  // namespace mmcal
