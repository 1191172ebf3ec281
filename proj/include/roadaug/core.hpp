// Copyright 2026 The roadaug Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace roadaug {

/// Interleaved 8-bit RGB image, row-major, origin top-left, x rightward,
/// y downward.
struct Image {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> data;  // width * height * 3

  Image() = default;
  Image(int w, int h, std::uint8_t fill = 0)
      : width(w), height(h),
        data(static_cast<std::size_t>(w) * static_cast<std::size_t>(h) * 3, fill) {}

  std::size_t offset(int x, int y, int c) const {
    return (static_cast<std::size_t>(y) * width + x) * 3 + c;
  }
  std::uint8_t& at(int x, int y, int c) { return data[offset(x, y, c)]; }
  std::uint8_t at(int x, int y, int c) const { return data[offset(x, y, c)]; }

  bool in_bounds(int x, int y) const {
    return x >= 0 && x < width && y >= 0 && y < height;
  }
  bool same_dims(const Image& other) const {
    return width == other.width && height == other.height;
  }
};

/// Single-channel 8-bit image.
struct GrayImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> data;  // width * height

  GrayImage() = default;
  GrayImage(int w, int h, std::uint8_t fill = 0)
      : width(w), height(h),
        data(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), fill) {}

  std::uint8_t& at(int x, int y) { return data[static_cast<std::size_t>(y) * width + x]; }
  std::uint8_t at(int x, int y) const { return data[static_cast<std::size_t>(y) * width + x]; }
};

/// Integer pixel rectangle [x, x+w) x [y, y+h).
struct RectI {
  int x = 0;
  int y = 0;
  int w = 0;
  int h = 0;

  bool empty() const { return w <= 0 || h <= 0; }
  bool contains(int px, int py) const {
    return px >= x && px < x + w && py >= y && py < y + h;
  }

  static RectI intersect(const RectI& a, const RectI& b) {
    const int x0 = std::max(a.x, b.x);
    const int y0 = std::max(a.y, b.y);
    const int x1 = std::min(a.x + a.w, b.x + b.w);
    const int y1 = std::min(a.y + a.h, b.y + b.h);
    return RectI{x0, y0, std::max(0, x1 - x0), std::max(0, y1 - y0)};
  }
};

inline int clamp_int(int v, int lo, int hi) { return std::min(hi, std::max(lo, v)); }

}  // namespace roadaug
