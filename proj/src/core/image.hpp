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

#ifndef PAIQA_CORE_IMAGE_HPP_
#define PAIQA_CORE_IMAGE_HPP_

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "core/model.hpp"

namespace paiqa {

using Rgb = std::array<std::uint8_t, 3>;

// 8-bit interleaved RGB raster.
class Image {
 public:
  Image() = default;
  Image(int width, int height, Rgb fill = {0, 0, 0});

  int width() const { return width_; }
  int height() const { return height_; }
  bool empty() const { return pixels_.empty(); }

  Rgb at(int x, int y) const;
  void set(int x, int y, Rgb c);
  void fill_rect(const BBox& rect, Rgb c);
  // One-pixel-wide-or-more outline drawn inside `rect`.
  void draw_outline(const BBox& rect, Rgb c, int thickness = 2);

  // Pixel-exact copy of the half-open sub-rectangle.
  Image crop(const BBox& rect) const;

  const std::vector<std::uint8_t>& pixels() const { return pixels_; }
  bool operator==(const Image&) const = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> pixels_;
};

Image read_png(const std::filesystem::path& path);
void write_png(const std::filesystem::path& path, const Image& image);
std::string encode_png(const Image& image);

struct ImageSize {
  int width = 0;
  int height = 0;
};
// Reads only the header.
ImageSize read_png_size(const std::filesystem::path& path);

}  // namespace paiqa

#endif  // PAIQA_CORE_IMAGE_HPP_
