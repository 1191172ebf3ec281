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

#include "roadaug/placement.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>

#include "roadaug/errors.hpp"

namespace fs = std::filesystem;

namespace roadaug {

const char* to_string(PlacementSource s) {
  return s == PlacementSource::heatmap ? "heatmap" : "uniform_fallback";
}

double PlacementHeatmap::sum() const {
  return std::accumulate(values.begin(), values.end(), 0.0);
}

PlacementHeatmap PlacementHeatmap::uniform(int grid, int bin, double sigma) {
  PlacementHeatmap h;
  h.bin = bin;
  h.grid = grid;
  h.sigma = sigma;
  h.sample_count = 0;
  h.values.assign(static_cast<std::size_t>(grid) * grid,
                  1.0 / (static_cast<double>(grid) * grid));
  return h;
}

namespace {

// symmetric reflection: ..., 1, 0 | 0, 1, ..., n-1 | n-1, n-2, ...
int reflect_index(int i, int n) {
  while (i < 0 || i >= n) {
    if (i < 0) i = -i - 1;
    if (i >= n) i = 2 * n - i - 1;
  }
  return i;
}

std::vector<double> gaussian_kernel(double sigma) {
  const int radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
  std::vector<double> k(2 * radius + 1);
  double total = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    const double v = std::exp(-0.5 * (i * i) / (sigma * sigma));
    k[i + radius] = v;
    total += v;
  }
  for (double& v : k) v /= total;
  return k;
}

void smooth_separable(std::vector<double>& grid_values, int grid, double sigma) {
  const std::vector<double> kernel = gaussian_kernel(sigma);
  const int radius = static_cast<int>(kernel.size() / 2);
  std::vector<double> tmp(grid_values.size());
  // horizontal
  for (int y = 0; y < grid; ++y) {
    for (int x = 0; x < grid; ++x) {
      double acc = 0.0;
      for (int k = -radius; k <= radius; ++k) {
        acc += kernel[k + radius] * grid_values[y * grid + reflect_index(x + k, grid)];
      }
      tmp[y * grid + x] = acc;
    }
  }
  // vertical
  for (int y = 0; y < grid; ++y) {
    for (int x = 0; x < grid; ++x) {
      double acc = 0.0;
      for (int k = -radius; k <= radius; ++k) {
        acc += kernel[k + radius] * tmp[reflect_index(y + k, grid) * grid + x];
      }
      grid_values[y * grid + x] = acc;
    }
  }
}

}  // namespace

std::vector<PlacementHeatmap> build_heatmaps(
    const DatasetIndex& index, const std::unordered_map<std::string, int>& bin_by_image,
    int bin_count, const HeatmapOptions& opts) {
  std::vector<PlacementHeatmap> heatmaps;
  heatmaps.reserve(bin_count);
  for (int b = 0; b < bin_count; ++b) {
    PlacementHeatmap h;
    h.bin = b;
    h.grid = opts.grid;
    h.sigma = opts.sigma;
    h.values.assign(static_cast<std::size_t>(opts.grid) * opts.grid, 0.0);
    heatmaps.push_back(std::move(h));
  }

  for (std::size_t r = 0; r < index.records.size(); ++r) {
    const ImageRecord& rec = index.records[r];
    const auto bin_it = bin_by_image.find(rec.image_id);
    if (bin_it == bin_by_image.end()) continue;
    const int bin = clamp_int(bin_it->second, 0, bin_count - 1);
    PlacementHeatmap& h = heatmaps[bin];
    for (const Annotation& ann : index.annotations[r]) {
      const double nx = ann.bbox.bottom_center_x() / rec.width();
      const double ny = ann.bbox.bottom_center_y() / rec.height();
      const int gx = clamp_int(static_cast<int>(std::floor(nx * opts.grid)), 0, opts.grid - 1);
      const int gy = clamp_int(static_cast<int>(std::floor(ny * opts.grid)), 0, opts.grid - 1);
      h.values[static_cast<std::size_t>(gy) * opts.grid + gx] += 1.0;
      ++h.sample_count;
    }
  }

  for (PlacementHeatmap& h : heatmaps) {
    if (h.sample_count == 0) {
      h = PlacementHeatmap::uniform(opts.grid, h.bin, opts.sigma);
      continue;
    }
    smooth_separable(h.values, h.grid, h.sigma);
    const double total = h.sum();
    for (double& v : h.values) v /= total;
  }
  return heatmaps;
}

PlacementSampler::PlacementSampler(const PlacementHeatmap& heatmap, const RoadMask* mask,
                                   int image_width, int image_height, bool content_aware,
                                   double lambda)
    : grid_(heatmap.grid), width_(image_width), height_(image_height),
      content_aware_(content_aware) {
  const int g = grid_;
  const std::size_t cells = static_cast<std::size_t>(g) * g;

  const auto cell_of = [&](int x, int y) {
    const int gx = std::min(g - 1, static_cast<int>((static_cast<std::int64_t>(x) * g) / width_));
    const int gy = std::min(g - 1, static_cast<int>((static_cast<std::int64_t>(y) * g) / height_));
    return static_cast<std::size_t>(gy) * g + gx;
  };

  if (content_aware_) {
    if (mask == nullptr || mask->road_pixel_count == 0) {
      throw EmptyRoadMask("content-aware placement requires a nonempty road mask");
    }
    road_pixels_.assign(cells, {});
    std::vector<double> cell_pixels(cells, 0.0);
    for (int y = 0; y < height_; ++y) {
      for (int x = 0; x < width_; ++x) {
        const std::size_t c = cell_of(x, y);
        cell_pixels[c] += 1.0;
        if (mask->is_road(x, y)) {
          road_pixels_[c].push_back(static_cast<std::uint32_t>(y) * width_ + x);
        }
      }
    }

    std::vector<double> product(cells, 0.0);
    double product_total = 0.0;
    for (std::size_t c = 0; c < cells; ++c) {
      const double road_fraction =
          cell_pixels[c] > 0.0 ? road_pixels_[c].size() / cell_pixels[c] : 0.0;
      product[c] = heatmap.values[c] * road_fraction;
      product_total += product[c];
    }

    cell_law_.assign(cells, 0.0);
    if (product_total == 0.0 && lambda >= 1.0) {
      // heatmap mass entirely off-road: uniform over road pixels
      fallback_ = true;
      for (std::size_t c = 0; c < cells; ++c) {
        cell_law_[c] = static_cast<double>(road_pixels_[c].size()) / mask->road_pixel_count;
      }
    } else {
      const double road_total = mask->road_pixel_count;
      for (std::size_t c = 0; c < cells; ++c) {
        const double biased = product_total > 0.0 ? product[c] / product_total : 0.0;
        const double uniform_road = road_pixels_[c].size() / road_total;
        cell_law_[c] = lambda * biased + (1.0 - lambda) * uniform_road;
      }
    }
  } else {
    cell_rects_.resize(cells);
    cell_law_.assign(cells, 0.0);
    const auto span = [](int gi, int n, int g2) {
      // pixel range of grid column/row gi: all p with p*g2/n == gi
      const auto ceil_div = [](std::int64_t a, std::int64_t b) { return (a + b - 1) / b; };
      const int lo = static_cast<int>(ceil_div(static_cast<std::int64_t>(gi) * n, g2));
      const int hi = static_cast<int>(ceil_div(static_cast<std::int64_t>(gi + 1) * n, g2));
      return std::pair<int, int>{lo, hi};
    };
    const double frame_pixels = static_cast<double>(width_) * height_;
    for (int gy = 0; gy < g; ++gy) {
      const auto [y0, y1] = span(gy, height_, g);
      for (int gx = 0; gx < g; ++gx) {
        const auto [x0, x1] = span(gx, width_, g);
        const std::size_t c = static_cast<std::size_t>(gy) * g + gx;
        cell_rects_[c] = RectI{x0, y0, x1 - x0, y1 - y0};
        const double area = static_cast<double>(std::max(0, x1 - x0)) * std::max(0, y1 - y0);
        // cells without pixels (grid finer than the image) cannot be drawn
        cell_law_[c] =
            area > 0.0 ? lambda * heatmap.values[c] + (1.0 - lambda) * area / frame_pixels : 0.0;
      }
    }
  }

  double law_total = std::accumulate(cell_law_.begin(), cell_law_.end(), 0.0);
  if (law_total <= 0.0) {
    // degenerate input (e.g. an unnormalized all-zero heatmap)
    fallback_ = true;
    if (content_aware_) {
      for (std::size_t c = 0; c < cell_law_.size(); ++c) {
        cell_law_[c] = static_cast<double>(road_pixels_[c].size()) / mask->road_pixel_count;
      }
    } else {
      const double frame_pixels = static_cast<double>(width_) * height_;
      for (std::size_t c = 0; c < cell_law_.size(); ++c) {
        cell_law_[c] =
            static_cast<double>(cell_rects_[c].w) * cell_rects_[c].h / frame_pixels;
      }
    }
    law_total = 1.0;
  }
  for (double& v : cell_law_) v /= law_total;
  cell_sampler_ = DiscreteSampler(cell_law_);
}

PlacementSample PlacementSampler::sample(Rng& rng) const {
  const std::size_t c = cell_sampler_.sample(rng);
  PlacementSample s;
  s.source = fallback_ ? PlacementSource::uniform_fallback : PlacementSource::heatmap;
  if (content_aware_) {
    const auto& pixels = road_pixels_[c];
    const std::uint32_t packed = pixels[rng.uniform_index(pixels.size())];
    s.x = static_cast<int>(packed % width_);
    s.y = static_cast<int>(packed / width_);
  } else {
    const RectI& r = cell_rects_[c];
    s.x = r.x + static_cast<int>(rng.uniform_index(static_cast<std::size_t>(r.w)));
    s.y = r.y + static_cast<int>(rng.uniform_index(static_cast<std::size_t>(r.h)));
  }
  return s;
}

PlacementSample sample_placement(const PlacementHeatmap& heatmap, const RoadMask* mask,
                                 int image_width, int image_height, Rng& rng, bool content_aware,
                                 double lambda) {
  PlacementSampler sampler(heatmap, mask, image_width, image_height, content_aware, lambda);
  return sampler.sample(rng);
}

void save_heatmaps(const std::vector<PlacementHeatmap>& heatmaps, const fs::path& file) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw WriteError("cannot write " + file.string());
  const char magic[4] = {'R', 'A', 'H', 'M'};
  out.write(magic, 4);
  const std::uint32_t version = 1;
  const std::uint32_t count = static_cast<std::uint32_t>(heatmaps.size());
  out.write(reinterpret_cast<const char*>(&version), 4);
  out.write(reinterpret_cast<const char*>(&count), 4);
  for (const auto& h : heatmaps) {
    const std::uint32_t bin = static_cast<std::uint32_t>(h.bin);
    const std::uint32_t grid = static_cast<std::uint32_t>(h.grid);
    const std::uint64_t samples = h.sample_count;
    out.write(reinterpret_cast<const char*>(&bin), 4);
    out.write(reinterpret_cast<const char*>(&grid), 4);
    out.write(reinterpret_cast<const char*>(&h.sigma), 8);
    out.write(reinterpret_cast<const char*>(&samples), 8);
    out.write(reinterpret_cast<const char*>(h.values.data()),
              static_cast<std::streamsize>(h.values.size() * sizeof(double)));
  }
  if (!out) throw WriteError("write failed: " + file.string());
}

std::vector<PlacementHeatmap> load_heatmaps(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw ManifestError("cannot open heatmap table: " + file.string());
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, "RAHM", 4) != 0) {
    throw ManifestError("not a heatmap table: " + file.string());
  }
  std::uint32_t version = 0, count = 0;
  in.read(reinterpret_cast<char*>(&version), 4);
  in.read(reinterpret_cast<char*>(&count), 4);
  if (version != 1) throw ManifestError("unsupported heatmap table version");
  std::vector<PlacementHeatmap> heatmaps(count);
  for (auto& h : heatmaps) {
    std::uint32_t bin = 0, grid = 0;
    std::uint64_t samples = 0;
    in.read(reinterpret_cast<char*>(&bin), 4);
    in.read(reinterpret_cast<char*>(&grid), 4);
    in.read(reinterpret_cast<char*>(&h.sigma), 8);
    in.read(reinterpret_cast<char*>(&samples), 8);
    h.bin = static_cast<int>(bin);
    h.grid = static_cast<int>(grid);
    h.sample_count = samples;
    h.values.resize(static_cast<std::size_t>(grid) * grid);
    in.read(reinterpret_cast<char*>(h.values.data()),
            static_cast<std::streamsize>(h.values.size() * sizeof(double)));
    if (!in) throw ManifestError("truncated heatmap table: " + file.string());
  }
  return heatmaps;
}

}  // namespace roadaug
