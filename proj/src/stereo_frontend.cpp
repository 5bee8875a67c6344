// mmcal - multi-modal extrinsic calibration toolkit
// SPDX-License-Identifier: Apache-2.0

#include "mmcal/stereo_frontend.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace mmcal {

namespace {
constexpr double kMinTriangulationAngle = 1e-4;  // radians

Vec3 back_project(const PinholeIntrinsics& k, const Vec2& px) {
  return Vec3((px.x() - k.cx) / k.fx, (px.y() - k.cy) / k.fy, 1.0).normalized();
}
}  // namespace

std::optional<Vec3> try_triangulate(const Vec2& left_px, const Vec2& right_px,
                                    const PinholeIntrinsics& k_left,
                                    const PinholeIntrinsics& k_right,
                                    const Pose& t_lr,
                                    TriangulationFailure* failure) {
  // Rays in the left frame: left camera at the origin, right camera at
  // t_lr.translation with direction rotated by t_lr.rotation.
  const Vec3 d1 = back_project(k_left, left_px);
  const Vec3 d2 = t_lr.rotation * back_project(k_right, right_px);
  const Vec3 c2 = t_lr.translation;

  const double angle = std::atan2(d1.cross(d2).norm(), d1.dot(d2));
  if (angle < kMinTriangulationAngle) {
    if (failure) *failure = TriangulationFailure::DegenerateGeometry;
    return std::nullopt;
  }

  // Closest points on the two rays: minimize |s*d1 - (c2 + t*d2)|.
  const double b = d1.dot(d2);
  const double d = d1.dot(c2);
  const double e = d2.dot(c2);
  const double denom = 1.0 - b * b;  // sin^2(angle), bounded away from 0
  const double s = (d - b * e) / denom;
  const double t = (b * d - e) / denom;
  if (s <= 0.0 || t <= 0.0) {
    if (failure) *failure = TriangulationFailure::Cheirality;
    return std::nullopt;
  }
  return 0.5 * ((s * d1) + (c2 + t * d2));
}

Vec3 triangulate(const Vec2& left_px, const Vec2& right_px,
                 const PinholeIntrinsics& k_left,
                 const PinholeIntrinsics& k_right, const Pose& t_lr) {
  TriangulationFailure failure;
  auto p = try_triangulate(left_px, right_px, k_left, k_right, t_lr, &failure);
  if (!p) {
    if (failure == TriangulationFailure::DegenerateGeometry) {
      throw CalibError(ErrorCode::DegenerateGeometry,
                       "triangulate: rays nearly parallel");
    }
    throw CalibError(ErrorCode::Cheirality,
                     "triangulate: point behind a camera");
  }
  return *p;
}

PointCloud triangulate_set(const CorrespondenceSet& matches,
                           const StereoRig& rig, double max_depth,
                           TriangulationStats* stats,
                           std::vector<size_t>* kept_indices) {
  TriangulationStats local;
  local.input = matches.size();
  PointCloud cloud;
  if (kept_indices) kept_indices->clear();
  for (size_t i = 0; i < matches.size(); ++i) {
    TriangulationFailure failure;
    auto p = try_triangulate(matches[i].left, matches[i].right, rig.k_left,
                             rig.k_right, rig.t_lr, &failure);
    if (!p) {
      if (failure == TriangulationFailure::DegenerateGeometry) {
        ++local.degenerate;
      } else {
        ++local.cheirality;
      }
      continue;
    }
    if (p->z() > max_depth) {
      ++local.too_deep;
      continue;
    }
    cloud.points.push_back(*p);
    if (kept_indices) kept_indices->push_back(i);
    ++local.kept;
  }
  if (stats) *stats = local;
  return cloud;
}

EdgeMap sobel_edges(const ImageU8& image, double magnitude_threshold) {
  const int w = image.width(), h = image.height();
  if (w < 3 || h < 3) {
    throw CalibError(ErrorCode::InvalidArgument,
                     "sobel_edges: image must be at least 3x3");
  }
  EdgeMap edges(w, h, 0);
  for (int y = 1; y < h - 1; ++y) {
    for (int x = 1; x < w - 1; ++x) {
      const double p00 = image.at(x - 1, y - 1), p10 = image.at(x, y - 1),
                   p20 = image.at(x + 1, y - 1);
      const double p01 = image.at(x - 1, y), p21 = image.at(x + 1, y);
      const double p02 = image.at(x - 1, y + 1), p12 = image.at(x, y + 1),
                   p22 = image.at(x + 1, y + 1);
      const double gx = (p20 + 2 * p21 + p22) - (p00 + 2 * p01 + p02);
      const double gy = (p02 + 2 * p12 + p22) - (p00 + 2 * p10 + p20);
      if (std::sqrt(gx * gx + gy * gy) >= magnitude_threshold) {
        edges.at(x, y) = 1;
      }
    }
  }
  return edges;
}

namespace {

bool near_edge(const EdgeMap& edges, const Vec2& px) {
  const int x = static_cast<int>(std::lround(px.x()));
  const int y = static_cast<int>(std::lround(px.y()));
  for (int dy = -1; dy <= 1; ++dy) {
    for (int dx = -1; dx <= 1; ++dx) {
      if (edges.in_bounds(x + dx, y + dy) && edges.at(x + dx, y + dy)) {
        return true;
      }
    }
  }
  return false;
}

}  // namespace

PointCloud tag_stereo_edge_points(const CorrespondenceSet& correspondences,
                                  const EdgeMap& left_edges,
                                  const EdgeMap& right_edges,
                                  const PointCloud& cloud) {
  if (correspondences.size() != cloud.size()) {
    throw CalibError(ErrorCode::ValidationError,
                     "tag_stereo_edge_points: cloud size does not match "
                     "correspondences");
  }
  PointCloud out = cloud;
  out.edge_flags.assign(cloud.size(), 0);
  for (size_t i = 0; i < correspondences.size(); ++i) {
    if (near_edge(left_edges, correspondences[i].left) &&
        near_edge(right_edges, correspondences[i].right)) {
      out.edge_flags[i] = 1;
    }
  }
  return out;
}

CorrespondenceSet load_matches(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw CalibError(ErrorCode::IoError,
                     "cannot open matches file: " + path.string());
  }
  std::string line;
  size_t line_no = 0;
  if (!std::getline(in, line)) {
    throw CalibError(ErrorCode::ParseError, path.string() + ":1: empty file");
  }
  ++line_no;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "ul,vl,ur,vr") {
    throw CalibError(ErrorCode::ParseError,
                     path.string() + ":1: expected header 'ul,vl,ur,vr'");
  }
  CorrespondenceSet out;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream ss(line);
    Correspondence c;
    char c1, c2, c3;
    if (!(ss >> c.left.x() >> c1 >> c.left.y() >> c2 >> c.right.x() >> c3 >>
          c.right.y()) ||
        c1 != ',' || c2 != ',' || c3 != ',') {
      throw CalibError(ErrorCode::ParseError,
                       path.string() + ":" + std::to_string(line_no) +
                           ": malformed row");
    }
    out.push_back(c);
  }
  return out;
}

void save_matches(const std::filesystem::path& path,
                  const CorrespondenceSet& matches) {
  std::ofstream out(path);
  if (!out) {
    throw CalibError(ErrorCode::IoError,
                     "cannot write matches file: " + path.string());
  }
  out << "ul,vl,ur,vr\n";
  out.precision(9);
  for (const auto& m : matches) {
    out << m.left.x() << "," << m.left.y() << "," << m.right.x() << ","
        << m.right.y() << "\n";
  }
}

}  // namespace mmcal
