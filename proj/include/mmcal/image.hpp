// mmcal - multi-modal extrinsic calibration toolkit
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "mmcal/error.hpp"

namespace mmcal {

// Dense row-major raster. (x, y) with x in [0, width), y in [0, height).
template <typename T>
class Image {
 public:
  Image() = default;
  Image(int width, int height, T fill = T{})
      : width_(width), height_(height),
        data_(static_cast<size_t>(width) * height, fill) {}

  int width() const { return width_; }
  int height() const { return height_; }
  bool empty() const { return data_.empty(); }

  T& at(int x, int y) { return data_[static_cast<size_t>(y) * width_ + x]; }
  const T& at(int x, int y) const {
    return data_[static_cast<size_t>(y) * width_ + x];
  }

  bool in_bounds(int x, int y) const {
    return x >= 0 && x < width_ && y >= 0 && y < height_;
  }

  std::vector<T>& data() { return data_; }
  const std::vector<T>& data() const { return data_; }

  bool operator==(const Image& other) const = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<T> data_;
};

using ImageU8 = Image<uint8_t>;
using ImageF64 = Image<double>;

// Binary edge labels, nonzero = edge. Dimensions match the source image.
using EdgeMap = ImageU8;

// 8-bit grayscale image I/O. PNG and ASCII PGM (P2) are both accepted;
// the format is picked from the file extension.
ImageU8 load_image_gray8(const std::filesystem::path& path);
void save_image_gray8(const std::filesystem::path& path, const ImageU8& img);

// Interleaved RGB, for diagnostic overlays.
struct ImageRGB {
  int width = 0;
  int height = 0;
  std::vector<uint8_t> data;  // 3 bytes per pixel, row-major

  static ImageRGB from_gray(const ImageU8& gray);
  void set(int x, int y, uint8_t r, uint8_t g, uint8_t b);
};
void save_image_rgb8(const std::filesystem::path& path, const ImageRGB& img);

ImageU8 load_pgm(const std::filesystem::path& path);
void save_pgm(const std::filesystem::path& path, const ImageU8& img);

}  // namespace mmcal
