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

#include <array>
#include <vector>

#include "roadaug/core.hpp"
#include "roadaug/perspective.hpp"

namespace roadaug {

/// Four corners in pixel coordinates, ordered bottom-left, bottom-right,
/// top-right, top-left.
struct Quad {
  std::array<std::array<double, 2>, 4> pts{};

  double area() const;  // shoelace, absolute
  /// Axis-aligned rectangle [0,w-1] x [0,h-1] as a quad.
  static Quad rect(double w, double h);
};

/// 3x3 projective transform, row-major, normalized so m[8] == 1.
struct Homography {
  std::array<double, 9> m{1, 0, 0, 0, 1, 0, 0, 0, 1};

  std::array<double, 2> apply(double x, double y) const;
  double det() const;
  Homography inverse() const;  // throws SingularSystem near zero determinant
};

struct ScaleBounds {
  double min_ratio = 0.2;
  double max_ratio = 5.0;
};

/// Perspective-consistent destination trapezoid for a patch anchored at its
/// bottom-center. The bottom edge is scaled by P(anchor_y)/s_src, the top
/// edge by the scale at the resulting top row; symmetric about the anchor
/// column. Throws ScaleOutOfRange when the bottom ratio leaves the bounds
/// and DegenerateQuad when the quad collapses below one pixel.
Quad target_quad(double anchor_x, double anchor_y, double patch_w, double patch_h, double s_src,
                 const PerspectiveMap& map, const ScaleBounds& bounds = {});

/// Four-point direct linear transform with the normalization entry fixed
/// to 1 (8x8 solve, partial pivoting). The returned matrix maps every src
/// corner onto its dst corner within 1e-6 px; otherwise SingularSystem.
Homography solve_homography(const Quad& src, const Quad& dst);

/// Warped pixels within a destination window plus a validity bitmap.
struct WarpedPatch {
  RectI window;                 // destination window, image coordinates
  std::vector<float> pixels;    // window.w * window.h * 3
  std::vector<std::uint8_t> valid;  // 0/1 per window pixel

  float pixel(int wx, int wy, int c) const {
    return pixels[(static_cast<std::size_t>(wy) * window.w + wx) * 3 + c];
  }
  bool is_valid(int wx, int wy) const {
    return valid[static_cast<std::size_t>(wy) * window.w + wx] != 0;
  }
  std::size_t valid_count() const;
};

/// Inverse mapping: each destination pixel inside dst_bounds whose preimage
/// under H falls inside the patch gets the bilinear sample and a validity
/// mark. Empty validity is a legal result.
WarpedPatch warp_patch(const Image& patch, const Homography& h, const RectI& dst_bounds);

/// Unwarped placement (scale ratio 1) used by configurations without
/// perspective awareness: the patch copied verbatim, bottom-center anchored.
WarpedPatch place_patch_unwarped(const Image& patch, int anchor_x, int anchor_y,
                                 const RectI& dst_bounds);

}  // namespace roadaug
