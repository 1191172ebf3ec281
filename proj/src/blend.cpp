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

#include "roadaug/blend.hpp"

#include <cmath>
#include <string>

#include "roadaug/errors.hpp"

namespace roadaug {

namespace {

constexpr int kDx[4] = {1, -1, 0, 0};
constexpr int kDy[4] = {0, 0, 1, -1};

}  // namespace

const char* to_string(BlendMode m) {
  switch (m) {
    case BlendMode::poisson_import: return "poisson_import";
    case BlendMode::poisson_mixed: return "poisson_mixed";
    case BlendMode::alpha: return "alpha";
  }
  return "?";
}

std::optional<BlendMode> blend_mode_from_string(std::string_view name) {
  if (name == "poisson_import") return BlendMode::poisson_import;
  if (name == "poisson_mixed") return BlendMode::poisson_mixed;
  if (name == "alpha") return BlendMode::alpha;
  return std::nullopt;
}

std::vector<std::pair<int, int>> BlendRegion::boundary() const {
  std::vector<std::pair<int, int>> out;
  for (int wy = 0; wy < window.h; ++wy) {
    for (int wx = 0; wx < window.w; ++wx) {
      if (!omega[static_cast<std::size_t>(wy) * window.w + wx]) continue;
      for (int n = 0; n < 4; ++n) {
        const int qx = window.x + wx + kDx[n];
        const int qy = window.y + wy + kDy[n];
        if (!in_omega(qx, qy)) out.emplace_back(qx, qy);
      }
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

BoundingBox BlendRegion::tight_bounds() const {
  int min_x = window.x + window.w, min_y = window.y + window.h;
  int max_x = window.x - 1, max_y = window.y - 1;
  for (int wy = 0; wy < window.h; ++wy) {
    for (int wx = 0; wx < window.w; ++wx) {
      if (!omega[static_cast<std::size_t>(wy) * window.w + wx]) continue;
      min_x = std::min(min_x, window.x + wx);
      min_y = std::min(min_y, window.y + wy);
      max_x = std::max(max_x, window.x + wx);
      max_y = std::max(max_y, window.y + wy);
    }
  }
  return BoundingBox{static_cast<double>(min_x), static_cast<double>(min_y),
                     static_cast<double>(max_x + 1), static_cast<double>(max_y + 1)};
}

BlendRegion clip_region(const WarpedPatch& patch, int image_width, int image_height,
                        const RoadMask* road) {
  BlendRegion region;
  region.window = patch.window;
  region.omega.assign(static_cast<std::size_t>(patch.window.w) * patch.window.h, 0);
  for (int wy = 0; wy < patch.window.h; ++wy) {
    const int iy = patch.window.y + wy;
    for (int wx = 0; wx < patch.window.w; ++wx) {
      const int ix = patch.window.x + wx;
      if (!patch.is_valid(wx, wy)) continue;
      if (ix < 1 || ix >= image_width - 1 || iy < 1 || iy >= image_height - 1) continue;
      if (road != nullptr && !road->is_road(ix, iy)) continue;
      region.omega[static_cast<std::size_t>(wy) * patch.window.w + wx] = 1;
      ++region.count;
    }
  }
  if (region.count == 0) {
    throw NothingOnRoad(road != nullptr ? "no warped pixel lies on the road"
                                        : "no warped pixel lies inside the frame interior");
  }
  return region;
}

namespace {

/// Composite source field: warped source where valid, target elsewhere.
struct CompositeField {
  const Image& target;
  const WarpedPatch& source;

  double value(int ix, int iy, int c) const {
    if (source.window.contains(ix, iy)) {
      const int wx = ix - source.window.x;
      const int wy = iy - source.window.y;
      if (source.is_valid(wx, wy)) return source.pixel(wx, wy, c);
    }
    return target.at(ix, iy, c);
  }
};

}  // namespace

GuidanceFn make_guidance(const Image& target, const WarpedPatch& source, const BlendRegion& region,
                         BlendMode mode) {
  (void)region;
  CompositeField field{target, source};
  if (mode == BlendMode::poisson_import) {
    return [field](int px, int py, int qx, int qy) -> std::array<double, 3> {
      return {field.value(px, py, 0) - field.value(qx, qy, 0),
              field.value(px, py, 1) - field.value(qx, qy, 1),
              field.value(px, py, 2) - field.value(qx, qy, 2)};
    };
  }
  const Image* tgt = &target;
  return [field, tgt](int px, int py, int qx, int qy) -> std::array<double, 3> {
    std::array<double, 3> out{};
    for (int c = 0; c < 3; ++c) {
      const double vs = field.value(px, py, c) - field.value(qx, qy, c);
      const double vt = static_cast<double>(tgt->at(px, py, c)) - tgt->at(qx, qy, c);
      out[c] = std::abs(vt) > std::abs(vs) ? vt : vs;
    }
    return out;
  };
}

std::array<std::vector<double>, 3> poisson_solve(const Image& target, const BlendRegion& region,
                                                 const GuidanceFn& guidance, SolveStats* stats,
                                                 const PoissonOptions& opts,
                                                 const IterateHook& hook) {
  if (region.count == 0) throw EmptyRegion("empty blend region");
  const std::size_t n = region.count;

  // unknown ordering: window scan order
  std::vector<int> px(n), py(n);
  std::vector<std::int32_t> index_of(
      static_cast<std::size_t>(region.window.w) * region.window.h, -1);
  {
    std::size_t k = 0;
    for (int wy = 0; wy < region.window.h; ++wy) {
      for (int wx = 0; wx < region.window.w; ++wx) {
        if (!region.omega[static_cast<std::size_t>(wy) * region.window.w + wx]) continue;
        index_of[static_cast<std::size_t>(wy) * region.window.w + wx] =
            static_cast<std::int32_t>(k);
        px[k] = region.window.x + wx;
        py[k] = region.window.y + wy;
        ++k;
      }
    }
  }
  // neighbor indices inside omega (-1 means boundary)
  std::vector<std::array<std::int32_t, 4>> nbr(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (int d = 0; d < 4; ++d) {
      const int qx = px[i] + kDx[d];
      const int qy = py[i] + kDy[d];
      std::int32_t j = -1;
      if (region.window.contains(qx, qy)) {
        j = index_of[static_cast<std::size_t>(qy - region.window.y) * region.window.w +
                     (qx - region.window.x)];
      }
      nbr[i][d] = j;
    }
  }

  const auto apply_laplacian = [&](const std::vector<double>& x, std::vector<double>& out) {
    for (std::size_t i = 0; i < n; ++i) {
      double acc = 4.0 * x[i];
      for (int d = 0; d < 4; ++d) {
        const std::int32_t j = nbr[i][d];
        if (j >= 0) acc -= x[j];
      }
      out[i] = acc;
    }
  };

  std::array<std::vector<double>, 3> solution;
  std::vector<double> b(n), x(n), r(n), z(n), p(n), ap(n);
  const int max_iter = opts.max_iter_factor * static_cast<int>(n);

  for (int c = 0; c < 3; ++c) {
    // right-hand side: Dirichlet boundary values plus guidance divergence
    for (std::size_t i = 0; i < n; ++i) {
      double acc = 0.0;
      for (int d = 0; d < 4; ++d) {
        const int qx = px[i] + kDx[d];
        const int qy = py[i] + kDy[d];
        if (nbr[i][d] < 0) acc += target.at(qx, qy, c);
        acc += guidance(px[i], py[i], qx, qy)[c];
      }
      b[i] = acc;
    }
    double b_norm = 0.0;
    for (double v : b) b_norm += v * v;
    b_norm = std::sqrt(b_norm);
    if (b_norm == 0.0) {
      solution[c].assign(n, 0.0);
      if (stats && c == 0) *stats = SolveStats{0, 0.0};
      continue;
    }

    // warm start from the target; exact when guidance reproduces it
    for (std::size_t i = 0; i < n; ++i) x[i] = target.at(px[i], py[i], c);

    apply_laplacian(x, ap);
    for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - ap[i];
    for (std::size_t i = 0; i < n; ++i) z[i] = r[i] * 0.25;  // Jacobi: diag = 4
    p = z;
    double rz = 0.0;
    for (std::size_t i = 0; i < n; ++i) rz += r[i] * z[i];

    int iter = 0;
    double rel = 0.0;
    for (;; ++iter) {
      double r_norm = 0.0;
      for (double v : r) r_norm += v * v;
      rel = std::sqrt(r_norm) / b_norm;
      if (c == 0 && hook) hook(x);
      if (rel <= opts.rel_tol) break;
      if (iter >= max_iter) {
        throw SolverDiverged("conjugate gradient reached max iterations (" +
                                 std::to_string(max_iter) + "), relative residual " +
                                 std::to_string(rel),
                             rel);
      }
      apply_laplacian(p, ap);
      double p_ap = 0.0;
      for (std::size_t i = 0; i < n; ++i) p_ap += p[i] * ap[i];
      const double alpha = rz / p_ap;
      for (std::size_t i = 0; i < n; ++i) x[i] += alpha * p[i];
      for (std::size_t i = 0; i < n; ++i) r[i] -= alpha * ap[i];
      for (std::size_t i = 0; i < n; ++i) z[i] = r[i] * 0.25;
      double rz_next = 0.0;
      for (std::size_t i = 0; i < n; ++i) rz_next += r[i] * z[i];
      const double beta = rz_next / rz;
      rz = rz_next;
      for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    }
    if (stats && c == 0) *stats = SolveStats{iter, rel};
    solution[c] = x;
  }
  return solution;
}

void poisson_blend(Image& target, const WarpedPatch& source, const BlendRegion& region,
                   BlendMode mode, SolveStats* stats, const PoissonOptions& opts) {
  if (region.count == 0) throw EmptyRegion("empty blend region");
  const GuidanceFn guidance = make_guidance(target, source, region, mode);
  const auto channels = poisson_solve(target, region, guidance, stats, opts);

  std::size_t k = 0;
  for (int wy = 0; wy < region.window.h; ++wy) {
    for (int wx = 0; wx < region.window.w; ++wx) {
      if (!region.omega[static_cast<std::size_t>(wy) * region.window.w + wx]) continue;
      const int ix = region.window.x + wx;
      const int iy = region.window.y + wy;
      for (int c = 0; c < 3; ++c) {
        const double v = std::round(channels[c][k]);
        target.at(ix, iy, c) = static_cast<std::uint8_t>(std::clamp(v, 0.0, 255.0));
      }
      ++k;
    }
  }
}

void alpha_paste(Image& target, const WarpedPatch& source, const BlendRegion& region) {
  if (region.count == 0) throw EmptyRegion("empty blend region");
  for (int wy = 0; wy < region.window.h; ++wy) {
    for (int wx = 0; wx < region.window.w; ++wx) {
      if (!region.omega[static_cast<std::size_t>(wy) * region.window.w + wx]) continue;
      const int ix = region.window.x + wx;
      const int iy = region.window.y + wy;
      const int sx = ix - source.window.x;
      const int sy = iy - source.window.y;
      for (int c = 0; c < 3; ++c) {
        const double v = std::round(static_cast<double>(source.pixel(sx, sy, c)));
        target.at(ix, iy, c) = static_cast<std::uint8_t>(std::clamp(v, 0.0, 255.0));
      }
    }
  }
}

}  // namespace roadaug
