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

#include <filesystem>
#include <string>
#include <unordered_map>
#include <vector>

#include "roadaug/rng.hpp"
#include "roadaug/types.hpp"

namespace roadaug {

/// Normalized 2D probability grid of damage ground-contact locations over
/// normalized image coordinates [0,1]^2. Sums to 1; uniform when built from
/// zero points.
struct PlacementHeatmap {
  int bin = 0;
  int grid = 64;
  double sigma = 2.0;  // smoothing bandwidth, in grid cells
  std::size_t sample_count = 0;
  std::vector<double> values;  // grid*grid, row-major (y major)

  double at(int gx, int gy) const { return values[static_cast<std::size_t>(gy) * grid + gx]; }
  double sum() const;

  static PlacementHeatmap uniform(int grid, int bin = 0, double sigma = 2.0);
};

struct HeatmapOptions {
  int grid = 64;
  double sigma = 2.0;
};

/// One heatmap per bin: bbox bottom-center points accumulated on the grid,
/// smoothed with a separable Gaussian (kernel truncated at 3*sigma,
/// reflect-padded), normalized to sum 1. Bins without points get the uniform
/// grid.
std::vector<PlacementHeatmap> build_heatmaps(
    const DatasetIndex& index, const std::unordered_map<std::string, int>& bin_by_image,
    int bin_count, const HeatmapOptions& opts = {});

enum class PlacementSource { heatmap, uniform_fallback };

const char* to_string(PlacementSource s);

struct PlacementSample {
  int x = 0;
  int y = 0;
  PlacementSource source = PlacementSource::heatmap;
};

/// Two-stage placement draw, precomputed once per (heatmap, mask) pair.
///
/// Content-aware: cell law proportional to H(cell) * road_fraction(cell),
/// then a road pixel uniform inside the cell; falls back to uniform over all
/// road pixels when the product law has no mass. Without content awareness
/// the law is proportional to H alone over the full frame. A mixture weight
/// lambda < 1 blends in the uniform law (on road pixels, or on the frame).
class PlacementSampler {
 public:
  /// mask == nullptr selects full-frame sampling. Throws EmptyRoadMask when
  /// content_aware is set and the mask has no road pixels.
  PlacementSampler(const PlacementHeatmap& heatmap, const RoadMask* mask, int image_width,
                   int image_height, bool content_aware, double lambda = 1.0);

  PlacementSample sample(Rng& rng) const;

  /// Normalized per-cell law actually sampled from (for verification).
  const std::vector<double>& cell_law() const { return cell_law_; }
  int grid() const { return grid_; }
  bool fallback_active() const { return fallback_; }

 private:
  int grid_ = 0;
  int width_ = 0;
  int height_ = 0;
  bool content_aware_ = false;
  bool fallback_ = false;
  std::vector<double> cell_law_;
  DiscreteSampler cell_sampler_;
  std::vector<std::vector<std::uint32_t>> road_pixels_;  // per cell, packed y*W+x
  std::vector<RectI> cell_rects_;                        // full-frame mode
};

/// Single draw convenience wrapper around PlacementSampler.
PlacementSample sample_placement(const PlacementHeatmap& heatmap, const RoadMask* mask,
                                 int image_width, int image_height, Rng& rng, bool content_aware,
                                 double lambda = 1.0);

/// Binary table holding all bins (magic "RAHM"); renders are produced by the
/// CLI on top of this.
void save_heatmaps(const std::vector<PlacementHeatmap>& heatmaps,
                   const std::filesystem::path& file);
std::vector<PlacementHeatmap> load_heatmaps(const std::filesystem::path& file);

}  // namespace roadaug
