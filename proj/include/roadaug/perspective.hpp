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
#include <vector>

#include "roadaug/types.hpp"

namespace roadaug {

enum class FitConfidence { fitted, fallback };

const char* to_string(FitConfidence c);

/// Horizon row estimated from the road-boundary lines. May be negative when
/// the horizon lies above the frame.
struct VanishingEstimate {
  double y_v = 0.0;
  FitConfidence confidence = FitConfidence::fallback;
  int left_inliers = 0;
  int right_inliers = 0;
};

/// Ground-plane scale model of one image: apparent size of a road patch grows
/// linearly with the distance below the horizon row, normalized to 1 at the
/// reference (bottom) row.
struct PerspectiveMap {
  double y_v = 0.0;
  double y_ref = 0.0;  // H - 1
  int width = 0;
  int height = 0;

  /// Normalized horizon row, clamped to [0,1]; monotone proxy for camera pitch.
  double horizon_ratio() const {
    return std::clamp(y_v / static_cast<double>(height), 0.0, 1.0);
  }
};

struct PerspectiveOptions {
  int min_road_pixels = 500;
  int trim_rounds = 3;
  double trim_k = 2.5;              // drop residuals beyond trim_k * MAD
  double parallel_slope_eps = 1e-3; // dx/dy parameterization
  double fallback_margin = 0.05;    // fraction of H above the topmost road row
};

/// Fits a line to each road boundary (leftmost / rightmost road column per
/// row, x as a function of y, least squares with iterative MAD trimming) and
/// intersects them. Near-parallel boundaries or an intersection below the
/// topmost road row fall back to a fixed margin above the road.
/// Deterministic; throws NoRoad when the mask has too few road pixels.
VanishingEstimate estimate_vanishing_row(const RoadMask& mask,
                                         const PerspectiveOptions& opts = {});

PerspectiveMap make_perspective_map(const VanishingEstimate& estimate, int width, int height);

/// max(0, (y - y_v) / (y_ref - y_v)); 0 at and above the horizon, 1 at the
/// reference row. Total function.
double perspective_scale(const PerspectiveMap& map, double y);

/// Quantile buckets over the horizon ratio. edges holds the K-1 interior
/// edges; bin i = { h : e_i <= h < e_{i+1} } with the last bin closed above.
struct PitchBinning {
  int bin_count = 1;
  std::vector<double> edges;
};

/// Interior edges are empirical quantiles at i/K (linear interpolation
/// between order statistics). Throws TooFewImages when fewer ratios than K.
PitchBinning build_pitch_bins(std::vector<double> horizon_ratios, int bin_count);

/// Total function; h is clamped to [0,1] first. Lower-edge-inclusive.
int assign_bin(double h, const PitchBinning& binning);

}  // namespace roadaug
