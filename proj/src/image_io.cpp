// mmcal - multi-modal extrinsic calibration toolkit
// SPDX-License-Identifier: Apache-2.0
//
// PNG front-end built on libpng. All reads are normalized to 8-bit gray.

#include <png.h>

#include <cstdio>
#include <memory>

#include "mmcal/image.hpp"

namespace mmcal {

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

[[noreturn]] void fail(const std::filesystem::path& path, const char* what) {
  throw CalibError(ErrorCode::ParseError, path.string() + ": " + what);
}

ImageU8 read_png_gray8(const std::filesystem::path& path) {
  FilePtr fp(std::fopen(path.string().c_str(), "rb"));
  if (!fp) {
    throw CalibError(ErrorCode::IoError,
                     "cannot open PNG file: " + path.string());
  }
  png_structp png =
      png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) fail(path, "png_create_read_struct failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    fail(path, "png_create_info_struct failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    fail(path, "not a valid PNG file");
  }
  png_init_io(png, fp.get());
  png_read_info(png, info);

  const png_byte color = png_get_color_type(png, info);
  const png_byte depth = png_get_bit_depth(png, info);
  if (depth == 16) png_set_strip_16(png);
  if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (color & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
  if (color == PNG_COLOR_TYPE_RGB || color == PNG_COLOR_TYPE_RGB_ALPHA ||
      color == PNG_COLOR_TYPE_PALETTE) {
    png_set_rgb_to_gray_fixed(png, 1, -1, -1);
  }
  png_read_update_info(png, info);

  const int w = static_cast<int>(png_get_image_width(png, info));
  const int h = static_cast<int>(png_get_image_height(png, info));
  ImageU8 img(w, h);
  std::vector<png_bytep> rows(h);
  for (int y = 0; y < h; ++y) rows[y] = &img.data()[static_cast<size_t>(y) * w];
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return img;
}

void write_png(const std::filesystem::path& path, int width, int height,
               int color_type, int bytes_per_pixel, const uint8_t* pixels) {
  FilePtr fp(std::fopen(path.string().c_str(), "wb"));
  if (!fp) {
    throw CalibError(ErrorCode::IoError,
                     "cannot write PNG file: " + path.string());
  }
  png_structp png =
      png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) fail(path, "png_create_write_struct failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    fail(path, "png_create_info_struct failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    fail(path, "PNG write failed");
  }
  png_init_io(png, fp.get());
  png_set_IHDR(png, info, width, height, 8, color_type, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  std::vector<png_bytep> rows(height);
  for (int y = 0; y < height; ++y) {
    rows[y] = const_cast<png_bytep>(
        pixels + static_cast<size_t>(y) * width * bytes_per_pixel);
  }
  png_write_image(png, rows.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

bool has_extension(const std::filesystem::path& path, const char* ext) {
  auto e = path.extension().string();
  for (auto& c : e) c = static_cast<char>(std::tolower(c));
  return e == ext;
}

}  // namespace

ImageU8 load_image_gray8(const std::filesystem::path& path) {
  if (has_extension(path, ".pgm")) return load_pgm(path);
  if (has_extension(path, ".png")) return read_png_gray8(path);
  throw CalibError(ErrorCode::IoError,
                   "unsupported image format (want .png or .pgm): " +
                       path.string());
}

void save_image_gray8(const std::filesystem::path& path, const ImageU8& img) {
  if (has_extension(path, ".pgm")) {
    save_pgm(path, img);
    return;
  }
  if (has_extension(path, ".png")) {
    write_png(path, img.width(), img.height(), PNG_COLOR_TYPE_GRAY, 1,
              img.data().data());
    return;
  }
  throw CalibError(ErrorCode::IoError,
                   "unsupported image format (want .png or .pgm): " +
                       path.string());
}

void save_image_rgb8(const std::filesystem::path& path, const ImageRGB& img) {
  write_png(path, img.width, img.height, PNG_COLOR_TYPE_RGB, 3,
            img.data.data());
}

}  // namespace mmcal
