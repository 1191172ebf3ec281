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
#include <functional>
#include <vector>

#include "roadaug/types.hpp"
#include "roadaug/warp.hpp"

namespace roadaug {

/// Destination pixel set receiving composited content. Kept one pixel away
/// from the frame edge so the 4-neighbor boundary always exists and carries
/// target values.
struct BlendRegion {
  RectI window;                     // image coordinates
  std::vector<std::uint8_t> omega;  // 0/1 per window pixel
  std::size_t count = 0;

  bool in_window(int ix, int iy) const { return window.contains(ix, iy); }
  bool in_omega(int ix, int iy) const {
    return in_window(ix, iy) &&
           omega[static_cast<std::size_t>(iy - window.y) * window.w + (ix - window.x)] != 0;
  }
  /// Pixels 4-adjacent to omega but not inside it.
  std::vector<std::pair<int, int>> boundary() const;
  /// Tight pixel-extent bounds (max edges exclusive). count must be > 0.
  BoundingBox tight_bounds() const;
};

/// Omega = validity AND road (when given) AND the frame interior eroded by
/// one pixel. Throws NothingOnRoad when nothing remains.
BlendRegion clip_region(const WarpedPatch& patch, int image_width, int image_height,
                        const RoadMask* road);

enum class BlendMode { poisson_import, poisson_mixed, alpha };

const char* to_string(BlendMode m);
std::optional<BlendMode> blend_mode_from_string(std::string_view name);

struct PoissonOptions {
  double rel_tol = 1e-12;     // relative residual stopping threshold
  int max_iter_factor = 10;   // max iterations = factor * |omega|
};

struct SolveStats {
  int iterations = 0;
  double relative_residual = 0.0;
};

/// Per-channel guidance value v_pq on the directed edge p->q.
using GuidanceFn =
    std::function<std::array<double, 3>(int px, int py, int qx, int qy)>;

/// Test hook observing CG iterates of the first channel solved.
using IterateHook = std::function<void(const std::vector<double>&)>;

/// Solves |N_p| f_p - sum_{q in N_p ∩ omega} f_q =
///        sum_{q in N_p ∩ boundary} target_q + sum_{q in N_p} v_pq
/// per channel with conjugate gradient (Jacobi preconditioned) on the SPD
/// Laplacian. Returns the pre-rounding solutions in omega scan order.
std::array<std::vector<double>, 3> poisson_solve(const Image& target, const BlendRegion& region,
                                                 const GuidanceFn& guidance,
                                                 SolveStats* stats = nullptr,
                                                 const PoissonOptions& opts = {},
                                                 const IterateHook& hook = {});

/// Guidance for the two Poisson modes, built from the composite source field
/// (warped source where valid, target elsewhere): import uses the source
/// gradient, mixed the pointwise larger-magnitude of source and target
/// gradients (source wins ties).
GuidanceFn make_guidance(const Image& target, const WarpedPatch& source, const BlendRegion& region,
                         BlendMode mode);

/// Full composite: solve, round once, clamp to [0,255], write omega pixels.
/// Pixels outside omega are untouched.
void poisson_blend(Image& target, const WarpedPatch& source, const BlendRegion& region,
                   BlendMode mode, SolveStats* stats = nullptr, const PoissonOptions& opts = {});

/// Source values copied verbatim over omega.
void alpha_paste(Image& target, const WarpedPatch& source, const BlendRegion& region);

}  // namespace roadaug
