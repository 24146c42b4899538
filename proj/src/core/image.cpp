// Copyright 2026 The PAIQA Toolkit Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "core/image.hpp"

#include <png.h>

#include <algorithm>
#include <cstring>

#include "core/json_io.hpp"

namespace paiqa {
namespace {

// Owns a png_image control struct and releases libpng state on scope exit.
struct PngImage {
  png_image img;
  PngImage() {
    std::memset(&img, 0, sizeof img);
    img.version = PNG_IMAGE_VERSION;
  }
  ~PngImage() { png_image_free(&img); }
  PngImage(const PngImage&) = delete;
  PngImage& operator=(const PngImage&) = delete;
};

}  // namespace

Image::Image(int width, int height, Rgb fill) : width_(width), height_(height) {
  if (width <= 0 || height <= 0) throw ValidationError("image dimensions must be positive");
  pixels_.resize(static_cast<std::size_t>(width) * height * 3);
  for (std::size_t i = 0; i < pixels_.size(); i += 3) {
    std::copy(fill.begin(), fill.end(), pixels_.begin() + static_cast<std::ptrdiff_t>(i));
  }
}

Rgb Image::at(int x, int y) const {
  const std::size_t o = (static_cast<std::size_t>(y) * width_ + x) * 3;
  return {pixels_[o], pixels_[o + 1], pixels_[o + 2]};
}

void Image::set(int x, int y, Rgb c) {
  const std::size_t o = (static_cast<std::size_t>(y) * width_ + x) * 3;
  pixels_[o] = c[0];
  pixels_[o + 1] = c[1];
  pixels_[o + 2] = c[2];
}

void Image::fill_rect(const BBox& r, Rgb c) {
  validate_bbox(r, width_, height_);
  for (int y = r.y_min; y < r.y_max; ++y) {
    for (int x = r.x_min; x < r.x_max; ++x) set(x, y, c);
  }
}

void Image::draw_outline(const BBox& r, Rgb c, int thickness) {
  validate_bbox(r, width_, height_);
  for (int y = r.y_min; y < r.y_max; ++y) {
    for (int x = r.x_min; x < r.x_max; ++x) {
      const bool edge = x < r.x_min + thickness || x >= r.x_max - thickness ||
                        y < r.y_min + thickness || y >= r.y_max - thickness;
      if (edge) set(x, y, c);
    }
  }
}

Image Image::crop(const BBox& r) const {
  validate_bbox(r, width_, height_);
  Image out(r.width(), r.height());
  for (int y = 0; y < r.height(); ++y) {
    const auto src = pixels_.begin() +
                     static_cast<std::ptrdiff_t>((static_cast<std::size_t>(r.y_min + y) * width_ + r.x_min) * 3);
    std::copy(src, src + static_cast<std::ptrdiff_t>(r.width()) * 3,
              out.pixels_.begin() + static_cast<std::ptrdiff_t>(y) * r.width() * 3);
  }
  return out;
}

Image read_png(const std::filesystem::path& path) {
  PngImage p;
  if (!png_image_begin_read_from_file(&p.img, path.c_str())) {
    throw DataError("cannot read PNG " + path.string() + ": " + p.img.message);
  }
  p.img.format = PNG_FORMAT_RGB;
  Image out(static_cast<int>(p.img.width), static_cast<int>(p.img.height));
  std::vector<std::uint8_t> buf(PNG_IMAGE_SIZE(p.img));
  if (!png_image_finish_read(&p.img, nullptr, buf.data(), 0, nullptr)) {
    throw DataError("cannot decode PNG " + path.string() + ": " + p.img.message);
  }
  for (int y = 0; y < out.height(); ++y) {
    for (int x = 0; x < out.width(); ++x) {
      const std::size_t o = (static_cast<std::size_t>(y) * out.width() + x) * 3;
      out.set(x, y, {buf[o], buf[o + 1], buf[o + 2]});
    }
  }
  return out;
}

std::string encode_png(const Image& image) {
  PngImage p;
  p.img.width = static_cast<png_uint_32>(image.width());
  p.img.height = static_cast<png_uint_32>(image.height());
  p.img.format = PNG_FORMAT_RGB;
  png_alloc_size_t size = 0;
  if (!png_image_write_to_memory(&p.img, nullptr, &size, 0, image.pixels().data(), 0, nullptr)) {
    throw DataError(std::string("cannot size PNG: ") + p.img.message);
  }
  std::string out(size, '\0');
  if (!png_image_write_to_memory(&p.img, out.data(), &size, 0, image.pixels().data(), 0,
                                 nullptr)) {
    throw DataError(std::string("cannot encode PNG: ") + p.img.message);
  }
  out.resize(size);
  return out;
}

void write_png(const std::filesystem::path& path, const Image& image) {
  write_file(path, encode_png(image));
}

ImageSize read_png_size(const std::filesystem::path& path) {
  PngImage p;
  if (!png_image_begin_read_from_file(&p.img, path.c_str())) {
    throw DataError("cannot read PNG " + path.string() + ": " + p.img.message);
  }
  return {static_cast<int>(p.img.width), static_cast<int>(p.img.height)};
}

}  // namespace paiqa
