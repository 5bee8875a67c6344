// mmcal - multi-modal extrinsic calibration toolkit
// SPDX-License-Identifier: Apache-2.0

#include "mmcal/thermal_edges.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace mmcal {

void CannyParams::validate() const {
  if (!(sigma > 0)) {
    throw CalibError(ErrorCode::InvalidArgument, "canny: sigma must be > 0");
  }
  if (!(low > 0) || !(low < high)) {
    throw CalibError(ErrorCode::InvalidArgument,
                     "canny: need 0 < low < high");
  }
  if (min_edge_length < 1) {
    throw CalibError(ErrorCode::InvalidArgument,
                     "canny: min edge length must be >= 1");
  }
}

namespace {

// Separable Gaussian with replicated borders.
ImageF64 gaussian_blur(const ImageU8& image, double sigma) {
  const int radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
  std::vector<double> kernel(2 * radius + 1);
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    kernel[i + radius] = std::exp(-0.5 * (i * i) / (sigma * sigma));
    sum += kernel[i + radius];
  }
  for (double& k : kernel) k /= sum;

  const int w = image.width(), h = image.height();
  ImageF64 tmp(w, h), out(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int i = -radius; i <= radius; ++i) {
        const int xx = std::clamp(x + i, 0, w - 1);
        acc += kernel[i + radius] * image.at(xx, y);
      }
      tmp.at(x, y) = acc;
    }
  }
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int i = -radius; i <= radius; ++i) {
        const int yy = std::clamp(y + i, 0, h - 1);
        acc += kernel[i + radius] * tmp.at(x, yy);
      }
      out.at(x, y) = acc;
    }
  }
  return out;
}

}  // namespace

EdgeMap canny(const ImageU8& image, const CannyParams& params) {
  params.validate();
  const int w = image.width(), h = image.height();
  if (w < 5 || h < 5) {
    throw CalibError(ErrorCode::InvalidArgument,
                     "canny: image must be at least 5x5");
  }

  const ImageF64 smooth = gaussian_blur(image, params.sigma);

  ImageF64 mag(w, h, 0.0);
  ImageF64 gx_img(w, h, 0.0), gy_img(w, h, 0.0);
  for (int y = 1; y < h - 1; ++y) {
    for (int x = 1; x < w - 1; ++x) {
      const double gx = (smooth.at(x + 1, y - 1) + 2 * smooth.at(x + 1, y) +
                         smooth.at(x + 1, y + 1)) -
                        (smooth.at(x - 1, y - 1) + 2 * smooth.at(x - 1, y) +
                         smooth.at(x - 1, y + 1));
      const double gy = (smooth.at(x - 1, y + 1) + 2 * smooth.at(x, y + 1) +
                         smooth.at(x + 1, y + 1)) -
                        (smooth.at(x - 1, y - 1) + 2 * smooth.at(x, y - 1) +
                         smooth.at(x + 1, y - 1));
      gx_img.at(x, y) = gx;
      gy_img.at(x, y) = gy;
      mag.at(x, y) = std::sqrt(gx * gx + gy * gy);
    }
  }

  // Non-maximum suppression along the gradient direction, quantized to 4
  // bins. Equal-magnitude plateaus keep exactly one pixel: the comparison
  // is strict against the negative-direction neighbor and non-strict
  // against the positive one.
  enum : uint8_t { kNone = 0, kWeak = 1, kStrong = 2 };
  Image<uint8_t> cls(w, h, kNone);
  for (int y = 1; y < h - 1; ++y) {
    for (int x = 1; x < w - 1; ++x) {
      const double m = mag.at(x, y);
      if (m < params.low) continue;
      const double gx = gx_img.at(x, y), gy = gy_img.at(x, y);
      // Direction bin: 0 = horizontal, 1 = +45deg, 2 = vertical, 3 = -45deg.
      double angle = std::atan2(gy, gx);
      if (angle < 0) angle += M_PI;
      int dx, dy;
      if (angle < M_PI / 8 || angle >= 7 * M_PI / 8) {
        dx = 1; dy = 0;
      } else if (angle < 3 * M_PI / 8) {
        dx = 1; dy = 1;
      } else if (angle < 5 * M_PI / 8) {
        dx = 0; dy = 1;
      } else {
        dx = 1; dy = -1;
      }
      const double m_pos = mag.at(x + dx, y + dy);
      const double m_neg = mag.at(x - dx, y - dy);
      if (m >= m_pos && m > m_neg) {
        cls.at(x, y) = (m >= params.high) ? kStrong : kWeak;
      }
    }
  }

  // Hysteresis: keep weak pixels 8-connected to a strong one.
  EdgeMap edges(w, h, 0);
  std::vector<std::pair<int, int>> stack;
  for (int y = 1; y < h - 1; ++y) {
    for (int x = 1; x < w - 1; ++x) {
      if (cls.at(x, y) == kStrong && !edges.at(x, y)) {
        edges.at(x, y) = 1;
        stack.emplace_back(x, y);
        while (!stack.empty()) {
          auto [cx, cy] = stack.back();
          stack.pop_back();
          for (int dy = -1; dy <= 1; ++dy) {
            for (int dx = -1; dx <= 1; ++dx) {
              const int nx = cx + dx, ny = cy + dy;
              if (!edges.in_bounds(nx, ny)) continue;
              if (cls.at(nx, ny) != kNone && !edges.at(nx, ny)) {
                edges.at(nx, ny) = 1;
                stack.emplace_back(nx, ny);
              }
            }
          }
        }
      }
    }
  }
  return edges;
}

EdgeMap filter_edges(const EdgeMap& edges, int min_length, bool clutter_filter,
                     double fill_ratio) {
  const int w = edges.width(), h = edges.height();
  EdgeMap out(w, h, 0);
  Image<int32_t> label(w, h, -1);
  std::vector<std::pair<int, int>> component;
  std::vector<std::pair<int, int>> stack;

  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!edges.at(x, y) || label.at(x, y) >= 0) continue;
      component.clear();
      stack.assign(1, {x, y});
      label.at(x, y) = 1;
      int min_x = x, max_x = x, min_y = y, max_y = y;
      while (!stack.empty()) {
        auto [cx, cy] = stack.back();
        stack.pop_back();
        component.emplace_back(cx, cy);
        min_x = std::min(min_x, cx);
        max_x = std::max(max_x, cx);
        min_y = std::min(min_y, cy);
        max_y = std::max(max_y, cy);
        for (int dy = -1; dy <= 1; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            const int nx = cx + dx, ny = cy + dy;
            if (edges.in_bounds(nx, ny) && edges.at(nx, ny) &&
                label.at(nx, ny) < 0) {
              label.at(nx, ny) = 1;
              stack.emplace_back(nx, ny);
            }
          }
        }
      }

      if (static_cast<int>(component.size()) < min_length) continue;
      if (clutter_filter) {
        const int box_w = max_x - min_x + 1, box_h = max_y - min_y + 1;
        const double ratio =
            double(component.size()) / (double(box_w) * box_h);
        if (std::min(box_w, box_h) >= 3 && ratio > fill_ratio) continue;
      }
      for (auto [px, py] : component) out.at(px, py) = 1;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// AttractionField

namespace {

// 1D squared-distance transform by lower envelope of parabolas.
void dt_1d(const std::vector<double>& f, std::vector<double>& d, int n,
           std::vector<int>& v, std::vector<double>& z) {
  int k = 0;
  v[0] = 0;
  z[0] = -std::numeric_limits<double>::infinity();
  z[1] = std::numeric_limits<double>::infinity();
  for (int q = 1; q < n; ++q) {
    double s;
    while (true) {
      s = ((f[q] + double(q) * q) - (f[v[k]] + double(v[k]) * v[k])) /
          (2.0 * q - 2.0 * v[k]);
      if (s <= z[k]) {
        --k;
      } else {
        break;
      }
    }
    ++k;
    v[k] = q;
    z[k] = s;
    z[k + 1] = std::numeric_limits<double>::infinity();
  }
  k = 0;
  for (int q = 0; q < n; ++q) {
    while (z[k + 1] < q) ++k;
    const double dq = q - v[k];
    d[q] = dq * dq + f[v[k]];
  }
}

}  // namespace

AttractionField AttractionField::build(const EdgeMap& edges) {
  const int w = edges.width(), h = edges.height();
  bool any = false;
  for (uint8_t v : edges.data()) {
    if (v) {
      any = true;
      break;
    }
  }
  if (!any) {
    throw CalibError(ErrorCode::EmptyEdges,
                     "attraction field: edge map has no edge pixels");
  }

  constexpr double kInf = 1e18;
  ImageF64 sq(w, h);
  {
    // Columns first, then rows.
    std::vector<double> f(std::max(w, h)), d(std::max(w, h));
    std::vector<int> v(std::max(w, h));
    std::vector<double> z(std::max(w, h) + 1);
    for (int x = 0; x < w; ++x) {
      for (int y = 0; y < h; ++y) f[y] = edges.at(x, y) ? 0.0 : kInf;
      dt_1d(f, d, h, v, z);
      for (int y = 0; y < h; ++y) sq.at(x, y) = d[y];
    }
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) f[x] = sq.at(x, y);
      dt_1d(f, d, w, v, z);
      for (int x = 0; x < w; ++x) sq.at(x, y) = d[x];
    }
  }

  AttractionField field;
  field.squared_ = Image<int32_t>(w, h);
  field.distance_ = ImageF64(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const int32_t s = static_cast<int32_t>(std::llround(sq.at(x, y)));
      field.squared_.at(x, y) = s;
      field.distance_.at(x, y) = std::sqrt(double(s));
    }
  }

  field.grad_x_ = ImageF64(w, h);
  field.grad_y_ = ImageF64(w, h);
  auto& dist = field.distance_;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (x == 0) {
        field.grad_x_.at(x, y) = dist.at(1, y) - dist.at(0, y);
      } else if (x == w - 1) {
        field.grad_x_.at(x, y) = dist.at(w - 1, y) - dist.at(w - 2, y);
      } else {
        field.grad_x_.at(x, y) = 0.5 * (dist.at(x + 1, y) - dist.at(x - 1, y));
      }
      if (y == 0) {
        field.grad_y_.at(x, y) = dist.at(x, 1) - dist.at(x, 0);
      } else if (y == h - 1) {
        field.grad_y_.at(x, y) = dist.at(x, h - 1) - dist.at(x, h - 2);
      } else {
        field.grad_y_.at(x, y) = 0.5 * (dist.at(x, y + 1) - dist.at(x, y - 1));
      }
    }
  }
  return field;
}

bool AttractionField::in_domain(const Vec2& uv) const {
  return uv.x() >= 1.0 && uv.x() <= width() - 2.0 && uv.y() >= 1.0 &&
         uv.y() <= height() - 2.0;
}

Vec2 AttractionField::clamp_to_domain(const Vec2& uv) const {
  return Vec2(std::clamp(uv.x(), 1.0, double(width() - 2)),
              std::clamp(uv.y(), 1.0, double(height() - 2)));
}

namespace {

double bilinear(const ImageF64& img, const Vec2& uv) {
  const int x0 = static_cast<int>(std::floor(uv.x()));
  const int y0 = static_cast<int>(std::floor(uv.y()));
  const int x1 = std::min(x0 + 1, img.width() - 1);
  const int y1 = std::min(y0 + 1, img.height() - 1);
  const double fx = uv.x() - x0;
  const double fy = uv.y() - y0;
  return (1 - fx) * (1 - fy) * img.at(x0, y0) +
         fx * (1 - fy) * img.at(x1, y0) +
         (1 - fx) * fy * img.at(x0, y1) +
         fx * fy * img.at(x1, y1);
}

}  // namespace

double AttractionField::sample(const Vec2& uv) const {
  if (!in_domain(uv)) {
    throw CalibError(ErrorCode::OutOfField,
                     "sample_field: query outside samplable interior");
  }
  return bilinear(distance_, uv);
}

Vec2 AttractionField::sample_gradient(const Vec2& uv) const {
  if (!in_domain(uv)) {
    throw CalibError(ErrorCode::OutOfField,
                     "sample_gradient: query outside samplable interior");
  }
  return Vec2(bilinear(grad_x_, uv), bilinear(grad_y_, uv));
}

ImageU8 AttractionField::to_gray8() const {
  ImageU8 out(width(), height());
  for (int y = 0; y < height(); ++y) {
    for (int x = 0; x < width(); ++x) {
      out.at(x, y) =
          static_cast<uint8_t>(std::lround(std::min(distance_.at(x, y), 255.0)));
    }
  }
  return out;
}

}  // namespace mmcal
