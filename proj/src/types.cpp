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

#include "roadaug/types.hpp"

#include <algorithm>

namespace roadaug {

const char* to_string(DamageClass c) {
  switch (c) {
    case DamageClass::D00: return "D00";
    case DamageClass::D10: return "D10";
    case DamageClass::D20: return "D20";
    case DamageClass::D40: return "D40";
  }
  return "?";
}

std::optional<DamageClass> damage_class_from_string(std::string_view name) {
  if (name == "D00") return DamageClass::D00;
  if (name == "D10") return DamageClass::D10;
  if (name == "D20") return DamageClass::D20;
  if (name == "D40") return DamageClass::D40;
  return std::nullopt;
}

double iou(const BoundingBox& a, const BoundingBox& b) {
  const double ix = std::max(0.0, std::min(a.x_max, b.x_max) - std::max(a.x_min, b.x_min));
  const double iy = std::max(0.0, std::min(a.y_max, b.y_max) - std::max(a.y_min, b.y_min));
  const double inter = ix * iy;
  if (inter <= 0.0) return 0.0;
  const double uni = a.area() + b.area() - inter;
  return uni > 0.0 ? inter / uni : 0.0;
}

std::optional<BoundingBox> clip_box(const BoundingBox& box, int width, int height) {
  BoundingBox c{std::max(box.x_min, 0.0), std::max(box.y_min, 0.0),
                std::min(box.x_max, static_cast<double>(width)),
                std::min(box.y_max, static_cast<double>(height))};
  if (!c.valid()) return std::nullopt;
  return c;
}

RoadMask RoadMask::from_gray(const GrayImage& gray, int threshold) {
  RoadMask mask;
  mask.width = gray.width;
  mask.height = gray.height;
  mask.road.resize(gray.data.size());
  int count = 0;
  for (std::size_t i = 0; i < gray.data.size(); ++i) {
    const bool road = gray.data[i] > threshold;
    mask.road[i] = road ? 1 : 0;
    count += road ? 1 : 0;
  }
  mask.road_pixel_count = count;
  return mask;
}

}  // namespace roadaug
