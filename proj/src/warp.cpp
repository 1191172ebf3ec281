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

#include "roadaug/warp.hpp"

#include <cmath>
#include <string>

#include "roadaug/errors.hpp"

namespace roadaug {

double Quad::area() const {
  double acc = 0.0;
  for (int i = 0; i < 4; ++i) {
    const auto& a = pts[i];
    const auto& b = pts[(i + 1) % 4];
    acc += a[0] * b[1] - b[0] * a[1];
  }
  return std::abs(acc) * 0.5;
}

Quad Quad::rect(double w, double h) {
  Quad q;
  q.pts = {{{0.0, h - 1.0}, {w - 1.0, h - 1.0}, {w - 1.0, 0.0}, {0.0, 0.0}}};
  return q;
}

std::array<double, 2> Homography::apply(double x, double y) const {
  const double w = m[6] * x + m[7] * y + m[8];
  return {(m[0] * x + m[1] * y + m[2]) / w, (m[3] * x + m[4] * y + m[5]) / w};
}

double Homography::det() const {
  return m[0] * (m[4] * m[8] - m[5] * m[7]) - m[1] * (m[3] * m[8] - m[5] * m[6]) +
         m[2] * (m[3] * m[7] - m[4] * m[6]);
}

Homography Homography::inverse() const {
  const double d = det();
  if (std::abs(d) < 1e-12) throw SingularSystem("homography is singular");
  Homography inv;
  inv.m[0] = (m[4] * m[8] - m[5] * m[7]) / d;
  inv.m[1] = (m[2] * m[7] - m[1] * m[8]) / d;
  inv.m[2] = (m[1] * m[5] - m[2] * m[4]) / d;
  inv.m[3] = (m[5] * m[6] - m[3] * m[8]) / d;
  inv.m[4] = (m[0] * m[8] - m[2] * m[6]) / d;
  inv.m[5] = (m[2] * m[3] - m[0] * m[5]) / d;
  inv.m[6] = (m[3] * m[7] - m[4] * m[6]) / d;
  inv.m[7] = (m[1] * m[6] - m[0] * m[7]) / d;
  inv.m[8] = (m[0] * m[4] - m[1] * m[3]) / d;
  return inv;
}

Quad target_quad(double anchor_x, double anchor_y, double patch_w, double patch_h, double s_src,
                 const PerspectiveMap& map, const ScaleBounds& bounds) {
  const double r_bottom = perspective_scale(map, anchor_y) / s_src;
  if (r_bottom < bounds.min_ratio || r_bottom > bounds.max_ratio) {
    throw ScaleOutOfRange("bottom scale ratio " + std::to_string(r_bottom) + " outside [" +
                          std::to_string(bounds.min_ratio) + ", " +
                          std::to_string(bounds.max_ratio) + "]");
  }
  const double w_bottom = patch_w * r_bottom;
  const double height = patch_h * r_bottom;
  const double y_top = anchor_y - height;
  const double r_top = perspective_scale(map, y_top) / s_src;
  const double w_top = patch_w * r_top;
  if (w_top <= 1.0 || height <= 1.0) {
    throw DegenerateQuad("target quad collapses: top width " + std::to_string(w_top) +
                         ", height " + std::to_string(height));
  }
  Quad q;
  q.pts = {{{anchor_x - w_bottom / 2.0, anchor_y},
            {anchor_x + w_bottom / 2.0, anchor_y},
            {anchor_x + w_top / 2.0, y_top},
            {anchor_x - w_top / 2.0, y_top}}};
  return q;
}

namespace {

/// Gaussian elimination with partial pivoting on the 8x8 DLT system.
std::array<double, 8> solve_8x8(std::array<std::array<double, 9>, 8>& a) {
  for (int col = 0; col < 8; ++col) {
    int pivot = col;
    for (int r = col + 1; r < 8; ++r) {
      if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
    }
    if (std::abs(a[pivot][col]) < 1e-12) {
      throw SingularSystem("DLT system is singular (collinear corners?)");
    }
    std::swap(a[col], a[pivot]);
    for (int r = col + 1; r < 8; ++r) {
      const double f = a[r][col] / a[col][col];
      for (int c = col; c < 9; ++c) a[r][c] -= f * a[col][c];
    }
  }
  std::array<double, 8> x{};
  for (int r = 7; r >= 0; --r) {
    double acc = a[r][8];
    for (int c = r + 1; c < 8; ++c) acc -= a[r][c] * x[c];
    x[r] = acc / a[r][r];
  }
  return x;
}

}  // namespace

Homography solve_homography(const Quad& src, const Quad& dst) {
  std::array<std::array<double, 9>, 8> a{};
  for (int i = 0; i < 4; ++i) {
    const double x = src.pts[i][0], y = src.pts[i][1];
    const double u = dst.pts[i][0], v = dst.pts[i][1];
    a[2 * i] = {x, y, 1, 0, 0, 0, -u * x, -u * y, u};
    a[2 * i + 1] = {0, 0, 0, x, y, 1, -v * x, -v * y, v};
  }
  const auto h = solve_8x8(a);
  Homography out;
  out.m = {h[0], h[1], h[2], h[3], h[4], h[5], h[6], h[7], 1.0};

  for (int i = 0; i < 4; ++i) {
    const auto mapped = out.apply(src.pts[i][0], src.pts[i][1]);
    const double err = std::hypot(mapped[0] - dst.pts[i][0], mapped[1] - dst.pts[i][1]);
    if (!(err < 1e-6)) {
      throw SingularSystem("DLT residual " + std::to_string(err) + " px at corner " +
                           std::to_string(i));
    }
  }
  return out;
}

std::size_t WarpedPatch::valid_count() const {
  std::size_t n = 0;
  for (auto v : valid) n += v != 0;
  return n;
}

WarpedPatch warp_patch(const Image& patch, const Homography& h, const RectI& dst_bounds) {
  const Homography hinv = h.inverse();

  // destination window: bbox of the mapped patch corners, clipped to bounds
  const Quad src = Quad::rect(patch.width, patch.height);
  double min_x = 1e30, min_y = 1e30, max_x = -1e30, max_y = -1e30;
  for (const auto& p : src.pts) {
    const auto q = h.apply(p[0], p[1]);
    min_x = std::min(min_x, q[0]);
    min_y = std::min(min_y, q[1]);
    max_x = std::max(max_x, q[0]);
    max_y = std::max(max_y, q[1]);
  }
  RectI window{static_cast<int>(std::floor(min_x)), static_cast<int>(std::floor(min_y)),
               static_cast<int>(std::ceil(max_x)) - static_cast<int>(std::floor(min_x)) + 1,
               static_cast<int>(std::ceil(max_y)) - static_cast<int>(std::floor(min_y)) + 1};
  window = RectI::intersect(window, dst_bounds);

  WarpedPatch out;
  out.window = window;
  if (window.empty()) {
    out.window = RectI{0, 0, 0, 0};
    return out;
  }
  out.pixels.assign(static_cast<std::size_t>(window.w) * window.h * 3, 0.0f);
  out.valid.assign(static_cast<std::size_t>(window.w) * window.h, 0);

  const double sx_max = patch.width - 1.0;
  const double sy_max = patch.height - 1.0;
  for (int wy = 0; wy < window.h; ++wy) {
    for (int wx = 0; wx < window.w; ++wx) {
      const auto s = hinv.apply(window.x + wx, window.y + wy);
      if (s[0] < 0.0 || s[0] > sx_max || s[1] < 0.0 || s[1] > sy_max) continue;
      const int x0 = std::min(static_cast<int>(s[0]), patch.width - 2 < 0 ? 0 : patch.width - 2);
      const int y0 = std::min(static_cast<int>(s[1]), patch.height - 2 < 0 ? 0 : patch.height - 2);
      const double fx = s[0] - x0;
      const double fy = s[1] - y0;
      const int x1 = std::min(x0 + 1, patch.width - 1);
      const int y1 = std::min(y0 + 1, patch.height - 1);
      const std::size_t base = (static_cast<std::size_t>(wy) * window.w + wx) * 3;
      for (int c = 0; c < 3; ++c) {
        const double v00 = patch.at(x0, y0, c);
        const double v10 = patch.at(x1, y0, c);
        const double v01 = patch.at(x0, y1, c);
        const double v11 = patch.at(x1, y1, c);
        const double top = v00 + fx * (v10 - v00);
        const double bot = v01 + fx * (v11 - v01);
        out.pixels[base + c] = static_cast<float>(top + fy * (bot - top));
      }
      out.valid[static_cast<std::size_t>(wy) * window.w + wx] = 1;
    }
  }
  return out;
}

WarpedPatch place_patch_unwarped(const Image& patch, int anchor_x, int anchor_y,
                                 const RectI& dst_bounds) {
  const int x0 = anchor_x - patch.width / 2;
  const int y0 = anchor_y - (patch.height - 1);
  RectI window{x0, y0, patch.width, patch.height};
  window = RectI::intersect(window, dst_bounds);

  WarpedPatch out;
  out.window = window;
  if (window.empty()) {
    out.window = RectI{0, 0, 0, 0};
    return out;
  }
  out.pixels.assign(static_cast<std::size_t>(window.w) * window.h * 3, 0.0f);
  out.valid.assign(static_cast<std::size_t>(window.w) * window.h, 0);
  for (int wy = 0; wy < window.h; ++wy) {
    const int py = window.y + wy - y0;
    for (int wx = 0; wx < window.w; ++wx) {
      const int px = window.x + wx - x0;
      const std::size_t base = (static_cast<std::size_t>(wy) * window.w + wx) * 3;
      for (int c = 0; c < 3; ++c) out.pixels[base + c] = patch.at(px, py, c);
      out.valid[static_cast<std::size_t>(wy) * window.w + wx] = 1;
    }
  }
  return out;
}

}  // namespace roadaug
