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

#include "roadaug/placement.hpp"
#include "roadaug/types.hpp"

namespace roadaug {

using Rgb = std::array<std::uint8_t, 3>;

inline constexpr Rgb kMaskContourColor = {0, 220, 0};
inline constexpr Rgb kHorizonColor = {60, 120, 255};
inline constexpr Rgb kOriginalBoxColor = {250, 220, 40};
inline constexpr Rgb kInjectedBoxColor = {240, 40, 40};
inline constexpr Rgb kPlacementColor = {255, 0, 255};

void draw_box(Image& image, const BoundingBox& box, const Rgb& color, int thickness = 2);
void draw_hline(Image& image, int y, const Rgb& color);
void draw_cross(Image& image, int x, int y, const Rgb& color, int radius = 4);
/// Paints road pixels adjacent to non-road (the mask boundary).
void draw_mask_contour(Image& image, const RoadMask& mask, const Rgb& color);

/// Heatmap as a false-color image, nearest-neighbor upscaled.
Image render_heatmap(const PlacementHeatmap& heatmap, int scale = 8);

}  // namespace roadaug
