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

#include "roadaug/render.hpp"

#include <cmath>

namespace roadaug {

namespace {

void put(Image& image, int x, int y, const Rgb& color) {
  if (!image.in_bounds(x, y)) return;
  image.at(x, y, 0) = color[0];
  image.at(x, y, 1) = color[1];
  image.at(x, y, 2) = color[2];
}

}  // namespace

void draw_box(Image& image, const BoundingBox& box, const Rgb& color, int thickness) {
  const int x0 = static_cast<int>(std::floor(box.x_min));
  const int y0 = static_cast<int>(std::floor(box.y_min));
  const int x1 = static_cast<int>(std::ceil(box.x_max)) - 1;
  const int y1 = static_cast<int>(std::ceil(box.y_max)) - 1;
  for (int t = 0; t < thickness; ++t) {
    for (int x = x0; x <= x1; ++x) {
      put(image, x, y0 + t, color);
      put(image, x, y1 - t, color);
    }
    for (int y = y0; y <= y1; ++y) {
      put(image, x0 + t, y, color);
      put(image, x1 - t, y, color);
    }
  }
}

void draw_hline(Image& image, int y, const Rgb& color) {
  for (int x = 0; x < image.width; ++x) put(image, x, y, color);
}

void draw_cross(Image& image, int x, int y, const Rgb& color, int radius) {
  for (int d = -radius; d <= radius; ++d) {
    put(image, x + d, y, color);
    put(image, x, y + d, color);
  }
}

void draw_mask_contour(Image& image, const RoadMask& mask, const Rgb& color) {
  if (mask.width != image.width || mask.height != image.height) return;
  constexpr int dx[4] = {1, -1, 0, 0};
  constexpr int dy[4] = {0, 0, 1, -1};
  for (int y = 0; y < mask.height; ++y) {
    for (int x = 0; x < mask.width; ++x) {
      if (!mask.is_road(x, y)) continue;
      bool edge = false;
      for (int n = 0; n < 4 && !edge; ++n) {
        const int qx = x + dx[n];
        const int qy = y + dy[n];
        edge = qx < 0 || qx >= mask.width || qy < 0 || qy >= mask.height || !mask.is_road(qx, qy);
      }
      if (edge) put(image, x, y, color);
    }
  }
}

Image render_heatmap(const PlacementHeatmap& heatmap, int scale) {
  double max_v = 0.0;
  for (double v : heatmap.values) max_v = std::max(max_v, v);
  const int side = heatmap.grid * scale;
  Image out(side, side);
  for (int y = 0; y < side; ++y) {
    for (int x = 0; x < side; ++x) {
      const double v = heatmap.at(x / scale, y / scale);
      const double t = max_v > 0.0 ? v / max_v : 0.0;
      // dark blue -> red -> yellow ramp
      const double r = std::clamp(2.0 * t, 0.0, 1.0);
      const double g = std::clamp(2.0 * t - 1.0, 0.0, 1.0);
      const double b = std::clamp(0.35 * (1.0 - t), 0.0, 1.0);
      out.at(x, y, 0) = static_cast<std::uint8_t>(std::lround(255.0 * r));
      out.at(x, y, 1) = static_cast<std::uint8_t>(std::lround(255.0 * g));
      out.at(x, y, 2) = static_cast<std::uint8_t>(std::lround(255.0 * b));
    }
  }
  return out;
}

}  // namespace roadaug
