// mmcal - multi-modal extrinsic calibration toolkit
// SPDX-License-Identifier: Apache-2.0

#include "mmcal/image.hpp"

#include <fstream>
#include <sstream>

namespace mmcal {

ImageRGB ImageRGB::from_gray(const ImageU8& gray) {
  ImageRGB out;
  out.width = gray.width();
  out.height = gray.height();
  out.data.resize(static_cast<size_t>(out.width) * out.height * 3);
  for (int y = 0; y < out.height; ++y) {
    for (int x = 0; x < out.width; ++x) {
      const uint8_t v = gray.at(x, y);
      const size_t i = (static_cast<size_t>(y) * out.width + x) * 3;
      out.data[i] = out.data[i + 1] = out.data[i + 2] = v;
    }
  }
  return out;
}

void ImageRGB::set(int x, int y, uint8_t r, uint8_t g, uint8_t b) {
  if (x < 0 || x >= width || y < 0 || y >= height) return;
  const size_t i = (static_cast<size_t>(y) * width + x) * 3;
  data[i] = r;
  data[i + 1] = g;
  data[i + 2] = b;
}

ImageU8 load_pgm(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw CalibError(ErrorCode::IoError,
                     "cannot open PGM file: " + path.string());
  }
  std::string magic;
  in >> magic;
  if (magic != "P2") {
    throw CalibError(ErrorCode::ParseError,
                     path.string() + ": expected ASCII PGM magic P2");
  }
  auto next_token = [&](int& out) {
    std::string tok;
    while (in >> tok) {
      if (tok[0] == '#') {
        std::string rest;
        std::getline(in, rest);
        continue;
      }
      out = std::stoi(tok);
      return;
    }
    throw CalibError(ErrorCode::ParseError,
                     path.string() + ": truncated PGM header");
  };
  int w = 0, h = 0, maxval = 0;
  next_token(w);
  next_token(h);
  next_token(maxval);
  if (w <= 0 || h <= 0 || maxval <= 0 || maxval > 255) {
    throw CalibError(ErrorCode::ParseError,
                     path.string() + ": bad PGM dimensions or maxval");
  }
  ImageU8 img(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      int v;
      if (!(in >> v)) {
        throw CalibError(ErrorCode::ParseError,
                         path.string() + ": truncated PGM pixel data");
      }
      if (v < 0 || v > maxval) {
        throw CalibError(ErrorCode::ParseError,
                         path.string() + ": PGM pixel out of range");
      }
      img.at(x, y) = static_cast<uint8_t>(v);
    }
  }
  return img;
}

void save_pgm(const std::filesystem::path& path, const ImageU8& img) {
  std::ofstream out(path);
  if (!out) {
    throw CalibError(ErrorCode::IoError,
                     "cannot write PGM file: " + path.string());
  }
  out << "P2\n" << img.width() << " " << img.height() << "\n255\n";
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      out << int(img.at(x, y)) << (x + 1 == img.width() ? '\n' : ' ');
    }
  }
}

}  // namespace mmcal
