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
#include <vector>

#include "roadaug/rng.hpp"
#include "roadaug/types.hpp"

namespace roadaug::testing {

/// Ground truth for a trapezoidal road: both boundary lines pass through the
/// vanishing point (vx, vy).
struct TrapezoidGeometry {
  double vx = 0.0;
  double vy = 0.0;
  double bottom_left = 0.0;   // left boundary x at the bottom row
  double bottom_right = 0.0;  // right boundary x at the bottom row
  double top_margin = 0.03;   // road starts this fraction of H below vy
};

TrapezoidGeometry random_geometry(Rng& rng, int width, int height);

/// Road pixels strictly between both boundary lines, rows below
/// vy + top_margin * H. The construction is the oracle: fitted boundary
/// lines must intersect near (vx, vy).
RoadMask rasterize_trapezoid(const TrapezoidGeometry& geom, int width, int height);

GrayImage mask_to_gray(const RoadMask& mask);

/// Streetish texture: sky gradient above, asphalt noise on road pixels.
Image make_street_image(Rng& rng, int width, int height, const RoadMask& mask);

/// Paints a dark crack/pothole texture into the box; the painted area is the
/// synthetic damage annotated by the fixture.
void paint_damage(Image& image, const BoundingBox& box, DamageClass cls, Rng& rng);

struct FixtureSpec {
  int width = 640;
  int height = 640;
  int images = 10;
  int boxes_per_image = 2;
  std::uint64_t seed = 1234;
  bool vary_geometry = true;  // distinct vanishing rows across images
};

struct BuiltFixture {
  std::filesystem::path root;
  std::vector<std::string> image_ids;
  std::vector<TrapezoidGeometry> geometries;  // parallel to image_ids
};

/// Writes images/, masks/ and annotations/ (VOC XML per image) under root.
BuiltFixture build_fixture_dataset(const std::filesystem::path& root, const FixtureSpec& spec);

std::filesystem::path write_voc_xml(const std::filesystem::path& dir, const std::string& stem,
                                    int width, int height,
                                    const std::vector<std::pair<std::string, BoundingBox>>& objects);

/// Fresh scratch directory under the system temp root.
std::filesystem::path make_temp_dir(const std::string& tag);

}  // namespace roadaug::testing
