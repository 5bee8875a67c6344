// mmcal - multi-modal extrinsic calibration toolkit
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "mmcal/geometry.hpp"
#include "mmcal/image.hpp"

namespace mmcal {

struct CannyParams {
  double sigma = 1.4;        // Gaussian smoothing, pixels
  double low = 40.0;         // hysteresis low threshold (8-bit scale)
  double high = 100.0;       // hysteresis high threshold
  int min_edge_length = 50;  // pixels, for filter_edges
  bool clutter_filter = true;
  double clutter_fill_ratio = 0.5;

  void validate() const;
};

// Canny pipeline: Gaussian smoothing, Sobel gradients, non-maximum
// suppression over 4 quantized directions, double-threshold hysteresis
// (8-connected). Deterministic; border pixels are never edges.
EdgeMap canny(const ImageU8& image, const CannyParams& params);

// Removes 8-connected components with fewer than min_length pixels.
// Components at least 3 px thick in both bounding-box dimensions whose
// fill ratio (pixels / box area) exceeds fill_ratio are removed as
// cluttered interior texture; 1-2 px thick strokes are kept regardless,
// since object outlines are exactly such strokes.
EdgeMap filter_edges(const EdgeMap& edges, int min_length,
                     bool clutter_filter = true, double fill_ratio = 0.5);

// Euclidean distance (pixels) to the nearest edge pixel, exact. Zero on
// edge pixels, 1-Lipschitz everywhere. Sampleable with a bilinear
// interpolant and a bilinearly interpolated central-difference gradient.
class AttractionField {
 public:
  AttractionField() = default;

  // Throws EmptyEdges when the map has no edge pixels.
  static AttractionField build(const EdgeMap& edges);

  int width() const { return distance_.width(); }
  int height() const { return distance_.height(); }
  double at(int x, int y) const { return distance_.at(x, y); }

  // Valid sampling domain: [1, width-2] x [1, height-2] inclusive.
  bool in_domain(const Vec2& uv) const;
  Vec2 clamp_to_domain(const Vec2& uv) const;

  // Bilinear value / gradient. Throw OutOfField outside the domain.
  double sample(const Vec2& uv) const;
  Vec2 sample_gradient(const Vec2& uv) const;

  // Squared integer distances, exposed for exactness tests.
  const Image<int32_t>& squared() const { return squared_; }

  // min(distance, 255) rounded, for debug dumps.
  ImageU8 to_gray8() const;

 private:
  Image<int32_t> squared_;
  ImageF64 distance_;
  ImageF64 grad_x_, grad_y_;  // central differences, one-sided at borders
};

inline AttractionField build_attraction_field(const EdgeMap& edges) {
  return AttractionField::build(edges);
}

inline double sample_field(const AttractionField& f, const Vec2& uv) {
  return f.sample(uv);
}
inline Vec2 sample_gradient(const AttractionField& f, const Vec2& uv) {
  return f.sample_gradient(uv);
}

}  // namespace mmcal
