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

#include "roadaug/errors.hpp"
#include "roadaug/rng.hpp"
#include "roadaug/warp.hpp"

using namespace roadaug;

namespace {

/// Random convex quad: jittered rectangle, resampled until well-conditioned.
Quad random_quad(Rng& rng, double scale) {
  for (;;) {
    const double cx = rng.uniform_in(0.2 * scale, 0.8 * scale);
    const double cy = rng.uniform_in(0.2 * scale, 0.8 * scale);
    const double w = rng.uniform_in(0.15 * scale, 0.5 * scale);
    const double h = rng.uniform_in(0.15 * scale, 0.5 * scale);
    Quad q;
    q.pts = {{{cx - w / 2, cy + h / 2},
              {cx + w / 2, cy + h / 2},
              {cx + w / 2, cy - h / 2},
              {cx - w / 2, cy - h / 2}}};
    for (auto& p : q.pts) {
      p[0] += rng.uniform_in(-0.2, 0.2) * w;
      p[1] += rng.uniform_in(-0.2, 0.2) * h;
    }
    // convexity: consistent cross-product sign with margin
    bool convex = true;
    double min_cross = 1e30;
    for (int i = 0; i < 4 && convex; ++i) {
      const auto& a = q.pts[i];
      const auto& b = q.pts[(i + 1) % 4];
      const auto& c = q.pts[(i + 2) % 4];
      const double cross =
          (b[0] - a[0]) * (c[1] - b[1]) - (b[1] - a[1]) * (c[0] - b[0]);
      min_cross = std::min(min_cross, std::abs(cross));
      convex = cross < 0.0;  // corner order is counterclockwise in image coords
    }
    if (convex && min_cross > 1e-3 * scale * scale && q.area() > 0.01 * scale * scale) return q;
  }
}

}  // namespace

TEST_CASE("target quad reduces to the patch rectangle under uniform perspective") {
  // a horizon infinitely far above the frame makes P effectively constant
  PerspectiveMap map{-1e9, 500.0, 640, 640};
  const double anchor_y = 400.0;
  const double s_src = perspective_scale(map, anchor_y);
  const Quad q = target_quad(320.0, anchor_y, 40.0, 20.0, s_src, map);
  CHECK(q.pts[1][0] - q.pts[0][0] == doctest::Approx(40.0));
  CHECK(q.pts[0][1] - q.pts[3][1] == doctest::Approx(20.0));
  CHECK(q.pts[2][0] - q.pts[3][0] == doctest::Approx(40.0).epsilon(1e-6));
  CHECK(q.pts[0][0] == doctest::Approx(300.0).epsilon(1e-6));
}

TEST_CASE("target quad matches the hand-evaluated recipe") {
  PerspectiveMap map{100.0, 500.0, 640, 640};
  const Quad q = target_quad(320.0, 400.0, 40.0, 20.0, 1.0, map);
  // r_b = 0.75 -> w_b = 30, h' = 15, y_t = 385, r_t = 0.7125 -> w_t = 28.5
  CHECK(q.pts[0][0] == doctest::Approx(320.0 - 15.0));
  CHECK(q.pts[1][0] == doctest::Approx(320.0 + 15.0));
  CHECK(q.pts[0][1] == doctest::Approx(400.0));
  CHECK(q.pts[2][1] == doctest::Approx(385.0));
  CHECK(q.pts[2][0] - q.pts[3][0] == doctest::Approx(28.5));
}

TEST_CASE("extreme scale ratios are rejected") {
  PerspectiveMap map{100.0, 500.0, 640, 640};
  // P(140) = 0.1 against s_src = 1 -> ratio below the 0.2 floor
  CHECK_THROWS_AS(target_quad(320.0, 140.0, 40.0, 20.0, 1.0, map), ScaleOutOfRange);
  // ratio above the ceiling
  CHECK_THROWS_AS(target_quad(320.0, 500.0, 40.0, 20.0, 0.1, map), ScaleOutOfRange);
}

TEST_CASE("monotone foreshortening: top never wider than bottom") {
  Rng rng(77);
  PerspectiveMap map{50.0, 639.0, 640, 640};
  for (int i = 0; i < 200; ++i) {
    const double y = rng.uniform_in(200.0, 639.0);
    const double s_src = rng.uniform_in(0.3, 1.0);
    try {
      const Quad q = target_quad(rng.uniform_in(0, 640), y, rng.uniform_in(10, 120),
                                 rng.uniform_in(8, 60), s_src, map);
      const double w_b = q.pts[1][0] - q.pts[0][0];
      const double w_t = q.pts[2][0] - q.pts[3][0];
      CHECK(w_t <= w_b + 1e-9);
      CHECK(q.area() > 0.0);
    } catch (const ScaleOutOfRange&) {
    } catch (const DegenerateQuad&) {
    }
  }
}

TEST_CASE("identity and scaling homographies") {
  const Quad unit = Quad::rect(2.0, 2.0);  // unit square [0,1]^2
  const Homography id = solve_homography(unit, unit);
  for (int i = 0; i < 9; ++i) {
    CHECK(id.m[i] == doctest::Approx(i % 4 == 0 ? 1.0 : 0.0).epsilon(1e-9));
  }

  Quad doubled = unit;
  for (auto& p : doubled.pts) {
    p[0] *= 2.0;
    p[1] *= 2.0;
  }
  const Homography s = solve_homography(unit, doubled);
  CHECK(s.m[0] == doctest::Approx(2.0));
  CHECK(s.m[4] == doctest::Approx(2.0));
  CHECK(s.m[8] == doctest::Approx(1.0));
  CHECK(s.m[1] == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(s.m[6] == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("unit square to trapezoid maps corners exactly") {
  Quad square;
  square.pts = {{{0, 1}, {1, 1}, {1, 0}, {0, 0}}};
  Quad trapezoid;
  trapezoid.pts = {{{0, 0}, {4, 0}, {3, 2}, {1, 2}}};
  const Homography h = solve_homography(square, trapezoid);
  for (int i = 0; i < 4; ++i) {
    const auto mapped = h.apply(square.pts[i][0], square.pts[i][1]);
    CHECK(std::hypot(mapped[0] - trapezoid.pts[i][0], mapped[1] - trapezoid.pts[i][1]) < 1e-6);
  }
}

TEST_CASE("collinear corners make the system singular") {
  Quad degenerate;
  degenerate.pts = {{{0, 0}, {1, 1}, {2, 2}, {3, 3}}};
  const Quad unit = Quad::rect(2.0, 2.0);
  CHECK_THROWS_AS(solve_homography(unit, degenerate), SingularSystem);
}

TEST_CASE("random quad pairs: corner residual and inverse consistency") {
  Rng rng(4242);
  for (int i = 0; i < 100; ++i) {
    const Quad src = random_quad(rng, 1000.0);
    const Quad dst = random_quad(rng, 1000.0);
    const Homography fwd = solve_homography(src, dst);
    const Homography bwd = solve_homography(dst, src);
    for (int k = 0; k < 4; ++k) {
      const auto m = fwd.apply(src.pts[k][0], src.pts[k][1]);
      CHECK(std::hypot(m[0] - dst.pts[k][0], m[1] - dst.pts[k][1]) < 1e-6);
      const auto back = bwd.apply(m[0], m[1]);
      CHECK(std::hypot(back[0] - src.pts[k][0], back[1] - src.pts[k][1]) < 1e-5);
    }
  }
}

TEST_CASE("identity warp reproduces the patch") {
  Image patch(7, 5);
  Rng rng(1);
  for (auto& v : patch.data) v = static_cast<std::uint8_t>(rng.uniform_index(256));

  const WarpedPatch w = warp_patch(patch, Homography{}, RectI{-10, -10, 100, 100});
  REQUIRE(w.window.w >= patch.width);
  REQUIRE(w.window.h >= patch.height);
  std::size_t valid = 0;
  for (int y = 0; y < patch.height; ++y) {
    for (int x = 0; x < patch.width; ++x) {
      const int wx = x - w.window.x;
      const int wy = y - w.window.y;
      REQUIRE(w.is_valid(wx, wy));
      for (int c = 0; c < 3; ++c) {
        CHECK(w.pixel(wx, wy, c) == doctest::Approx(patch.at(x, y, c)).epsilon(1e-9));
      }
      ++valid;
    }
  }
  CHECK(w.valid_count() == valid);
}

TEST_CASE("constant patch stays constant under any valid warp") {
  Image patch(9, 6);
  for (auto& v : patch.data) v = 137;
  Quad dst;
  dst.pts = {{{2.0, 30.0}, {28.0, 31.0}, {24.0, 8.0}, {5.0, 9.0}}};
  const Homography h = solve_homography(Quad::rect(9, 6), dst);
  const WarpedPatch w = warp_patch(patch, h, RectI{0, 0, 64, 64});
  REQUIRE(w.valid_count() > 0);
  for (int wy = 0; wy < w.window.h; ++wy) {
    for (int wx = 0; wx < w.window.w; ++wx) {
      if (!w.is_valid(wx, wy)) continue;
      for (int c = 0; c < 3; ++c) CHECK(w.pixel(wx, wy, c) == doctest::Approx(137.0));
    }
  }
}

TEST_CASE("2x upscale halves a linear ramp's slope") {
  // f(x) = 16 x over an 8x8 patch; the closed form under scaling is the oracle
  Image patch(8, 8);
  for (int y = 0; y < 8; ++y) {
    for (int x = 0; x < 8; ++x) {
      for (int c = 0; c < 3; ++c) patch.at(x, y, c) = static_cast<std::uint8_t>(16 * x);
    }
  }
  Homography h;
  h.m = {2, 0, 0, 0, 2, 0, 0, 0, 1};
  const WarpedPatch w = warp_patch(patch, h, RectI{0, 0, 32, 32});
  REQUIRE(w.valid_count() > 0);
  for (int wy = 0; wy < w.window.h; ++wy) {
    for (int wx = 0; wx < w.window.w; ++wx) {
      if (!w.is_valid(wx, wy)) continue;
      const double expected = 16.0 * (w.window.x + wx) / 2.0;
      CHECK(std::abs(w.pixel(wx, wy, 0) - expected) < 1e-6 * 255.0);
    }
  }
}

TEST_CASE("warped values stay within the source range") {
  Rng rng(31);
  Image patch(12, 9);
  std::uint8_t lo = 255, hi = 0;
  for (auto& v : patch.data) {
    v = static_cast<std::uint8_t>(40 + rng.uniform_index(150));
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  Quad dst;
  dst.pts = {{{10.0, 55.0}, {50.0, 52.0}, {44.0, 20.0}, {14.0, 24.0}}};
  const Homography h = solve_homography(Quad::rect(12, 9), dst);
  const WarpedPatch w = warp_patch(patch, h, RectI{0, 0, 64, 64});
  REQUIRE(w.valid_count() > 0);
  for (int wy = 0; wy < w.window.h; ++wy) {
    for (int wx = 0; wx < w.window.w; ++wx) {
      if (!w.is_valid(wx, wy)) continue;
      for (int c = 0; c < 3; ++c) {
        CHECK(w.pixel(wx, wy, c) >= static_cast<float>(lo) - 1e-4f);
        CHECK(w.pixel(wx, wy, c) <= static_cast<float>(hi) + 1e-4f);
      }
    }
  }
}

TEST_CASE("unwarped placement anchors the patch bottom-center") {
  Image patch(10, 6);
  for (auto& v : patch.data) v = 99;
  const WarpedPatch w = place_patch_unwarped(patch, 32, 40, RectI{0, 0, 64, 64});
  CHECK(w.window.w == 10);
  CHECK(w.window.h == 6);
  CHECK(w.window.y + w.window.h - 1 == 40);  // bottom row at the anchor
  CHECK(w.window.x == 32 - 5);
  CHECK(w.valid_count() == 60);
}
