// mmcal - multi-modal extrinsic calibration toolkit
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <optional>
#include <vector>

#include "mmcal/geometry.hpp"
#include "mmcal/image.hpp"
#include "mmcal/pointcloud.hpp"

namespace mmcal {

// Matched subpixel feature locations for one frame: left pixel, right pixel.
struct Correspondence {
  Vec2 left;
  Vec2 right;
};
using CorrespondenceSet = std::vector<Correspondence>;

struct StereoRig {
  PinholeIntrinsics k_left;
  PinholeIntrinsics k_right;
  Pose t_lr;  // right-camera frame -> left-camera frame
};

enum class TriangulationFailure {
  DegenerateGeometry,  // rays closer than 1e-4 rad to parallel
  Cheirality,          // midpoint behind either camera
};

// Midpoint of the common perpendicular between the two back-projected rays,
// in the left (base) camera frame. Throws DegenerateGeometry / Cheirality.
Vec3 triangulate(const Vec2& left_px, const Vec2& right_px,
                 const PinholeIntrinsics& k_left,
                 const PinholeIntrinsics& k_right, const Pose& t_lr);

std::optional<Vec3> try_triangulate(const Vec2& left_px, const Vec2& right_px,
                                    const PinholeIntrinsics& k_left,
                                    const PinholeIntrinsics& k_right,
                                    const Pose& t_lr,
                                    TriangulationFailure* failure = nullptr);

struct TriangulationStats {
  size_t input = 0;
  size_t degenerate = 0;
  size_t cheirality = 0;
  size_t too_deep = 0;
  size_t kept = 0;
};

// Triangulate a whole frame, dropping degenerate pairs and points deeper
// than max_depth. The output cloud is positionally aligned with `kept`
// entries; `kept_indices` maps cloud rows back to correspondence rows.
PointCloud triangulate_set(const CorrespondenceSet& matches,
                           const StereoRig& rig, double max_depth,
                           TriangulationStats* stats = nullptr,
                           std::vector<size_t>* kept_indices = nullptr);

// 3x3 Sobel magnitude threshold; border pixels are never marked.
EdgeMap sobel_edges(const ImageU8& image, double magnitude_threshold);

// Flags cloud point i when correspondence i's left pixel rounds to within
// Chebyshev distance 1 of a left edge pixel and the right pixel likewise.
// The cloud must align 1:1 with the correspondences.
PointCloud tag_stereo_edge_points(const CorrespondenceSet& correspondences,
                                  const EdgeMap& left_edges,
                                  const EdgeMap& right_edges,
                                  const PointCloud& cloud);

// CSV with header `ul,vl,ur,vr`, subpixel floats.
CorrespondenceSet load_matches(const std::filesystem::path& path);
void save_matches(const std::filesystem::path& path,
                  const CorrespondenceSet& matches);

}  // namespace mmcal
