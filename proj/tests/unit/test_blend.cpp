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

#include <doctest.h>

#include <cmath>

#include "roadaug/blend.hpp"
#include "roadaug/errors.hpp"
#include "roadaug/rng.hpp"
#include "support/oracles.hpp"

using namespace roadaug;
using namespace roadaug::testing;

namespace {

const GuidanceFn kZeroGuidance = [](int, int, int, int) -> std::array<double, 3> {
  return {0.0, 0.0, 0.0};
};

Image random_image(Rng& rng, int w, int h) {
  Image img(w, h);
  for (auto& v : img.data) v = static_cast<std::uint8_t>(rng.uniform_index(256));
  return img;
}

/// Region with the given omega bitmap placed at (x0, y0).
BlendRegion make_region(int x0, int y0, int w, int h, const std::vector<std::uint8_t>& omega) {
  BlendRegion r;
  r.window = RectI{x0, y0, w, h};
  r.omega = omega;
  r.count = 0;
  for (auto v : omega) r.count += v != 0;
  return r;
}

/// WarpedPatch copying target values over the window (all valid).
WarpedPatch target_copy_patch(const Image& target, const RectI& window) {
  WarpedPatch p;
  p.window = window;
  p.pixels.resize(static_cast<std::size_t>(window.w) * window.h * 3);
  p.valid.assign(static_cast<std::size_t>(window.w) * window.h, 1);
  for (int wy = 0; wy < window.h; ++wy) {
    for (int wx = 0; wx < window.w; ++wx) {
      for (int c = 0; c < 3; ++c) {
        p.pixels[(static_cast<std::size_t>(wy) * window.w + wx) * 3 + c] =
            target.at(window.x + wx, window.y + wy, c);
      }
    }
  }
  return p;
}

WarpedPatch random_patch(Rng& rng, const RectI& window) {
  WarpedPatch p;
  p.window = window;
  p.pixels.resize(static_cast<std::size_t>(window.w) * window.h * 3);
  p.valid.assign(static_cast<std::size_t>(window.w) * window.h, 1);
  for (auto& v : p.pixels) v = static_cast<float>(rng.uniform_index(256));
  return p;
}

}  // namespace

TEST_CASE("single interior pixel solves to the neighbor average") {
  Image target(5, 5, 0);
  // neighbors of (2,2): right, left, down, up = 10, 20, 30, 40
  target.at(3, 2, 0) = 10;
  target.at(1, 2, 0) = 20;
  target.at(2, 3, 0) = 30;
  target.at(2, 1, 0) = 40;

  const BlendRegion region = make_region(2, 2, 1, 1, {1});
  const auto solution = poisson_solve(target, region, kZeroGuidance);
  CHECK(solution[0][0] == doctest::Approx(25.0).epsilon(1e-10));
}

TEST_CASE("guidance equal to target gradients reproduces the target") {
  Rng rng(21);
  for (int trial = 0; trial < 5; ++trial) {
    const Image target = random_image(rng, 16, 12);
    const RectI window{3, 2, 9, 8};
    std::vector<std::uint8_t> omega(9 * 8, 0);
    for (int wy = 1; wy < 7; ++wy) {
      for (int wx = 1; wx < 8; ++wx) {
        if (rng.uniform_real() < 0.8) omega[wy * 9 + wx] = 1;
      }
    }
    BlendRegion region = make_region(3, 2, 9, 8, omega);
    if (region.count == 0) continue;

    const WarpedPatch source = target_copy_patch(target, window);
    const GuidanceFn guidance = make_guidance(target, source, region, BlendMode::poisson_import);
    const auto solution = poisson_solve(target, region, guidance);

    std::size_t k = 0;
    for (int wy = 0; wy < 8; ++wy) {
      for (int wx = 0; wx < 9; ++wx) {
        if (!omega[wy * 9 + wx]) continue;
        const double expected = target.at(3 + wx, 2 + wy, 0);
        CHECK(std::abs(solution[0][k] - expected) < 1e-6);
        ++k;
      }
    }
  }
}

TEST_CASE("CG matches the dense direct solve on a 4x4 interior") {
  Rng rng(77);
  const Image target = random_image(rng, 10, 10);
  // omega = interior 4x4 of a 6x6 window
  std::vector<std::uint8_t> omega(36, 0);
  for (int wy = 1; wy <= 4; ++wy) {
    for (int wx = 1; wx <= 4; ++wx) omega[wy * 6 + wx] = 1;
  }
  const BlendRegion region = make_region(2, 2, 6, 6, omega);
  const WarpedPatch source = random_patch(rng, region.window);

  const GuidanceFn guidance = make_guidance(target, source, region, BlendMode::poisson_import);
  const GuidanceFn oracle_guidance = oracle_import_guidance(target, source);
  SolveStats stats;
  const auto cg = poisson_solve(target, region, guidance, &stats);
  CHECK(stats.relative_residual <= PoissonOptions{}.rel_tol);
  CHECK(stats.iterations <= 10 * static_cast<int>(region.count));
  for (int c = 0; c < 3; ++c) {
    const auto dense = dense_poisson_oracle(target, region, oracle_guidance, c);
    REQUIRE(dense.size() == cg[c].size());
    for (std::size_t i = 0; i < dense.size(); ++i) {
      CHECK(std::abs(cg[c][i] - dense[i]) < 1e-6);
    }
  }
}

TEST_CASE("zero guidance obeys the discrete maximum principle") {
  Rng rng(31);
  for (int trial = 0; trial < 10; ++trial) {
    const Image target = random_image(rng, 14, 14);
    std::vector<std::uint8_t> omega(6 * 6, 0);
    for (int i = 0; i < 36; ++i) omega[i] = rng.uniform_real() < 0.7 ? 1 : 0;
    BlendRegion region = make_region(4, 4, 6, 6, omega);
    if (region.count == 0) continue;

    const auto solution = poisson_solve(target, region, kZeroGuidance);
    double bmin = 255.0, bmax = 0.0;
    for (const auto& [bx, by] : region.boundary()) {
      bmin = std::min(bmin, static_cast<double>(target.at(bx, by, 0)));
      bmax = std::max(bmax, static_cast<double>(target.at(bx, by, 0)));
    }
    for (double v : solution[0]) {
      CHECK(v >= bmin - 1e-9);
      CHECK(v <= bmax + 1e-9);
    }
  }
}

TEST_CASE("CG error decreases monotonically in the energy norm") {
  Rng rng(55);
  const Image target = random_image(rng, 12, 12);
  std::vector<std::uint8_t> omega(5 * 5, 1);
  const BlendRegion region = make_region(3, 3, 5, 5, omega);
  const WarpedPatch source = random_patch(rng, region.window);
  const GuidanceFn guidance = make_guidance(target, source, region, BlendMode::poisson_import);

  const auto exact = dense_poisson_oracle(target, region, oracle_import_guidance(target, source), 0);

  // energy norm of the error, via the same 5-point stencil the system defines
  std::vector<std::pair<int, int>> cells;
  for (int wy = 0; wy < 5; ++wy) {
    for (int wx = 0; wx < 5; ++wx) cells.emplace_back(3 + wx, 3 + wy);
  }
  const auto energy = [&](const std::vector<double>& x) {
    double acc = 0.0;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      double row = 4.0 * (x[i] - exact[i]);
      for (std::size_t j = 0; j < cells.size(); ++j) {
        const int dx = std::abs(cells[i].first - cells[j].first);
        const int dy = std::abs(cells[i].second - cells[j].second);
        if (dx + dy == 1) row -= (x[j] - exact[j]);
      }
      acc += (x[i] - exact[i]) * row;
    }
    return acc;
  };

  std::vector<double> energies;
  poisson_solve(target, region, guidance, nullptr, PoissonOptions{},
                [&](const std::vector<double>& x) { energies.push_back(energy(x)); });
  REQUIRE(energies.size() > 2);
  for (std::size_t i = 1; i < energies.size(); ++i) {
    CHECK(energies[i] <= energies[i - 1] * (1.0 + 1e-9) + 1e-9);
  }
  CHECK(energies.back() < 1e-9);
}

TEST_CASE("poisson blend only touches omega") {
  Rng rng(88);
  Image target = random_image(rng, 20, 20);
  const Image before = target;
  std::vector<std::uint8_t> omega(8 * 8, 0);
  for (int wy = 2; wy < 6; ++wy) {
    for (int wx = 2; wx < 6; ++wx) omega[wy * 8 + wx] = 1;
  }
  const BlendRegion region = make_region(5, 5, 8, 8, omega);
  const WarpedPatch source = random_patch(rng, region.window);

  poisson_blend(target, source, region, BlendMode::poisson_import);
  for (int y = 0; y < 20; ++y) {
    for (int x = 0; x < 20; ++x) {
      if (region.in_omega(x, y)) continue;
      for (int c = 0; c < 3; ++c) CHECK(target.at(x, y, c) == before.at(x, y, c));
    }
  }
}

TEST_CASE("full blend path reproduces the target from its own content") {
  Rng rng(91);
  Image target = random_image(rng, 16, 16);
  const Image before = target;
  std::vector<std::uint8_t> omega(6 * 6, 1);
  const BlendRegion region = make_region(4, 4, 6, 6, omega);
  const WarpedPatch source = target_copy_patch(target, region.window);

  poisson_blend(target, source, region, BlendMode::poisson_import);
  for (std::size_t i = 0; i < target.data.size(); ++i) CHECK(target.data[i] == before.data[i]);
}

TEST_CASE("mixed mode keeps the larger-magnitude gradient") {
  Image target(6, 6, 0);
  target.at(3, 2, 0) = 200;  // strong target edge between (2,2) and (3,2)
  WarpedPatch source;
  source.window = RectI{1, 1, 4, 4};
  source.pixels.assign(4 * 4 * 3, 50.0f);  // flat source: zero gradients
  source.valid.assign(4 * 4, 1);
  const BlendRegion region = make_region(2, 2, 2, 2, {1, 1, 1, 1});

  const GuidanceFn mixed = make_guidance(target, source, region, BlendMode::poisson_mixed);
  const auto v = mixed(2, 2, 3, 2);
  CHECK(v[0] == doctest::Approx(0.0 - 200.0));  // target gradient wins
  const GuidanceFn import = make_guidance(target, source, region, BlendMode::poisson_import);
  CHECK(import(2, 2, 3, 2)[0] == doctest::Approx(0.0));
}

TEST_CASE("alpha paste copies omega verbatim and leaves the rest") {
  Rng rng(13);
  Image target = random_image(rng, 12, 12);
  const Image before = target;
  // left half of a 4x4 window
  std::vector<std::uint8_t> omega(16, 0);
  for (int wy = 0; wy < 4; ++wy) {
    for (int wx = 0; wx < 2; ++wx) omega[wy * 4 + wx] = 1;
  }
  const BlendRegion region = make_region(4, 4, 4, 4, omega);
  const WarpedPatch source = random_patch(rng, region.window);

  alpha_paste(target, source, region);
  for (int y = 0; y < 12; ++y) {
    for (int x = 0; x < 12; ++x) {
      for (int c = 0; c < 3; ++c) {
        if (region.in_omega(x, y)) {
          const float sv = source.pixel(x - 4, y - 4, c);
          CHECK(target.at(x, y, c) == static_cast<std::uint8_t>(std::lround(sv)));
        } else {
          CHECK(target.at(x, y, c) == before.at(x, y, c));
        }
      }
    }
  }
}

TEST_CASE("empty region raises EmptyRegion") {
  Image target(8, 8, 0);
  const BlendRegion region = make_region(2, 2, 2, 2, {0, 0, 0, 0});
  WarpedPatch source;
  source.window = RectI{2, 2, 2, 2};
  source.pixels.assign(2 * 2 * 3, 0.0f);
  source.valid.assign(4, 1);
  CHECK_THROWS_AS(alpha_paste(target, source, region), EmptyRegion);
  CHECK_THROWS_AS(poisson_blend(target, source, region, BlendMode::poisson_import), EmptyRegion);
}

TEST_CASE("clip keeps validity on road and inside the eroded frame") {
  RoadMask road;
  road.width = 16;
  road.height = 16;
  road.road.assign(256, 1);
  road.road_pixel_count = 256;

  WarpedPatch patch;
  patch.window = RectI{0, 0, 6, 6};  // touches the frame edge
  patch.pixels.assign(6 * 6 * 3, 0.0f);
  patch.valid.assign(36, 1);

  const BlendRegion region = clip_region(patch, 16, 16, &road);
  // rows/cols 0 are eroded away
  CHECK(region.count == 25);
  CHECK_FALSE(region.in_omega(0, 3));
  CHECK(region.in_omega(1, 1));
}

TEST_CASE("clip against a half road mask matches the set-intersection oracle") {
  RoadMask road;
  road.width = 20;
  road.height = 20;
  road.road.assign(400, 0);
  int road_count = 0;
  for (int y = 10; y < 20; ++y) {
    for (int x = 0; x < 20; ++x) {
      road.set_road(x, y, true);
      ++road_count;
    }
  }
  road.road_pixel_count = road_count;

  WarpedPatch patch;
  patch.window = RectI{4, 6, 8, 8};  // straddles the road edge at y = 10
  patch.pixels.assign(8 * 8 * 3, 0.0f);
  patch.valid.assign(64, 1);

  const BlendRegion region = clip_region(patch, 20, 20, &road);
  // oracle: count the intersection directly
  std::size_t expected = 0;
  int min_y = 20;
  for (int y = 6; y < 14; ++y) {
    for (int x = 4; x < 12; ++x) {
      if (y >= 10 && x >= 1 && x <= 18 && y <= 18) {
        ++expected;
        min_y = std::min(min_y, y);
      }
    }
  }
  CHECK(region.count == expected);
  CHECK(region.count == 32);  // half of the 64 validity pixels
  CHECK(region.tight_bounds().y_min == doctest::Approx(min_y));
}

TEST_CASE("validity entirely off-road raises NothingOnRoad") {
  RoadMask road;
  road.width = 16;
  road.height = 16;
  road.road.assign(256, 0);
  for (int x = 0; x < 16; ++x) road.set_road(x, 15, true);
  road.road_pixel_count = 16;

  WarpedPatch patch;
  patch.window = RectI{2, 2, 4, 4};
  patch.pixels.assign(48, 0.0f);
  patch.valid.assign(16, 1);
  CHECK_THROWS_AS(clip_region(patch, 16, 16, &road), NothingOnRoad);
}
