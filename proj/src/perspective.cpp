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

#include "roadaug/perspective.hpp"

#include <cmath>
#include <cstddef>
#include <string>

#include "roadaug/errors.hpp"

namespace roadaug {

const char* to_string(FitConfidence c) {
  return c == FitConfidence::fitted ? "fitted" : "fallback";
}

namespace {

struct LineFit {
  double intercept = 0.0;  // x = intercept + slope * y
  double slope = 0.0;
  bool ok = false;
  int points = 0;
};

struct BoundaryPoint {
  double y;
  double x;
};

LineFit least_squares(const std::vector<BoundaryPoint>& pts) {
  LineFit fit;
  fit.points = static_cast<int>(pts.size());
  if (pts.size() < 2) return fit;
  double sy = 0.0, sx = 0.0;
  for (const auto& p : pts) {
    sy += p.y;
    sx += p.x;
  }
  const double my = sy / pts.size();
  const double mx = sx / pts.size();
  double syy = 0.0, sxy = 0.0;
  for (const auto& p : pts) {
    syy += (p.y - my) * (p.y - my);
    sxy += (p.y - my) * (p.x - mx);
  }
  if (syy <= 0.0) return fit;  // all points on one row
  fit.slope = sxy / syy;
  fit.intercept = mx - fit.slope * my;
  fit.ok = true;
  return fit;
}

double median(std::vector<double> v) {
  const std::size_t n = v.size();
  std::nth_element(v.begin(), v.begin() + n / 2, v.end());
  double hi = v[n / 2];
  if (n % 2 == 1) return hi;
  std::nth_element(v.begin(), v.begin() + n / 2 - 1, v.end());
  return 0.5 * (v[n / 2 - 1] + hi);
}

/// Least squares with trim_rounds rounds of MAD-based outlier rejection.
LineFit trimmed_fit(std::vector<BoundaryPoint> pts, const PerspectiveOptions& opts) {
  LineFit fit = least_squares(pts);
  if (!fit.ok) return fit;
  for (int round = 0; round < opts.trim_rounds; ++round) {
    std::vector<double> residuals(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
      residuals[i] = pts[i].x - (fit.intercept + fit.slope * pts[i].y);
    }
    const double med = median(residuals);
    std::vector<double> devs(residuals.size());
    for (std::size_t i = 0; i < residuals.size(); ++i) devs[i] = std::abs(residuals[i] - med);
    const double mad = median(devs);
    if (mad <= 1e-12) break;  // already tight
    std::vector<BoundaryPoint> kept;
    kept.reserve(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (std::abs(residuals[i] - med) <= opts.trim_k * mad) kept.push_back(pts[i]);
    }
    if (kept.size() == pts.size() || kept.size() < 2) break;
    pts = std::move(kept);
    LineFit refit = least_squares(pts);
    if (!refit.ok) break;
    fit = refit;
  }
  fit.points = static_cast<int>(pts.size());
  return fit;
}

}  // namespace

VanishingEstimate estimate_vanishing_row(const RoadMask& mask, const PerspectiveOptions& opts) {
  if (mask.road_pixel_count < opts.min_road_pixels) {
    throw NoRoad("road pixel count " + std::to_string(mask.road_pixel_count) +
                 " below minimum " + std::to_string(opts.min_road_pixels));
  }

  std::vector<BoundaryPoint> left, right;
  left.reserve(mask.height);
  right.reserve(mask.height);
  int top_row = mask.height;
  for (int y = 0; y < mask.height; ++y) {
    int xl = -1, xr = -1;
    for (int x = 0; x < mask.width; ++x) {
      if (mask.is_road(x, y)) {
        xl = x;
        break;
      }
    }
    if (xl < 0) continue;
    for (int x = mask.width - 1; x >= 0; --x) {
      if (mask.is_road(x, y)) {
        xr = x;
        break;
      }
    }
    top_row = std::min(top_row, y);
    // a boundary clamped to the frame edge is unobserved, not a road edge;
    // half-pixel shift puts the estimate on the road/non-road border
    if (xl > 0) left.push_back({static_cast<double>(y), xl - 0.5});
    if (xr < mask.width - 1) right.push_back({static_cast<double>(y), xr + 0.5});
  }

  VanishingEstimate est;
  const auto fallback = [&]() {
    est.y_v = static_cast<double>(top_row) - opts.fallback_margin * mask.height;
    est.confidence = FitConfidence::fallback;
    return est;
  };

  const LineFit lf = trimmed_fit(left, opts);
  const LineFit rf = trimmed_fit(right, opts);
  est.left_inliers = lf.points;
  est.right_inliers = rf.points;
  if (!lf.ok || !rf.ok) return fallback();
  if (std::abs(lf.slope - rf.slope) < opts.parallel_slope_eps) return fallback();

  const double y_v = (rf.intercept - lf.intercept) / (lf.slope - rf.slope);
  if (!(std::isfinite(y_v)) || y_v > static_cast<double>(top_row)) return fallback();

  est.y_v = y_v;
  est.confidence = FitConfidence::fitted;
  return est;
}

PerspectiveMap make_perspective_map(const VanishingEstimate& estimate, int width, int height) {
  return PerspectiveMap{estimate.y_v, static_cast<double>(height - 1), width, height};
}

double perspective_scale(const PerspectiveMap& map, double y) {
  const double denom = map.y_ref - map.y_v;
  const double s = (y - map.y_v) / denom;
  return std::max(0.0, s);
}

PitchBinning build_pitch_bins(std::vector<double> horizon_ratios, int bin_count) {
  if (bin_count < 1) throw ConfigError("bin count must be >= 1");
  if (horizon_ratios.size() < static_cast<std::size_t>(bin_count)) {
    throw TooFewImages("need at least " + std::to_string(bin_count) +
                       " horizon estimates, have " + std::to_string(horizon_ratios.size()));
  }
  for (double& h : horizon_ratios) h = std::clamp(h, 0.0, 1.0);
  std::sort(horizon_ratios.begin(), horizon_ratios.end());

  PitchBinning binning;
  binning.bin_count = bin_count;
  const std::size_t n = horizon_ratios.size();
  for (int i = 1; i < bin_count; ++i) {
    // quantile at i/K, linear interpolation between order statistics
    const double pos = (static_cast<double>(i) / bin_count) * (n - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    const double frac = pos - static_cast<double>(lo);
    double edge = horizon_ratios[lo];
    if (lo + 1 < n) edge += frac * (horizon_ratios[lo + 1] - horizon_ratios[lo]);
    binning.edges.push_back(edge);
  }
  return binning;
}

int assign_bin(double h, const PitchBinning& binning) {
  h = std::clamp(h, 0.0, 1.0);
  // count of interior edges <= h; equality goes to the upper bin
  const auto it = std::upper_bound(binning.edges.begin(), binning.edges.end(), h);
  const int idx = static_cast<int>(it - binning.edges.begin());
  return std::min(idx, binning.bin_count - 1);
}

}  // namespace roadaug
