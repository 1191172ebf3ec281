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
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "roadaug/core.hpp"

namespace roadaug {

/// The four road-damage classes: longitudinal crack, transverse crack,
/// alligator crack, pothole.
enum class DamageClass : int { D00 = 0, D10 = 1, D20 = 2, D40 = 3 };

inline constexpr std::array<DamageClass, 4> kAllClasses = {
    DamageClass::D00, DamageClass::D10, DamageClass::D20, DamageClass::D40};

const char* to_string(DamageClass c);
std::optional<DamageClass> damage_class_from_string(std::string_view name);

enum class Provenance { original, injected };

/// Axis-aligned box in continuous pixel coordinates, origin top-left.
struct BoundingBox {
  double x_min = 0.0;
  double y_min = 0.0;
  double x_max = 0.0;
  double y_max = 0.0;

  double width() const { return x_max - x_min; }
  double height() const { return y_max - y_min; }
  double area() const { return width() * height(); }
  bool valid() const { return x_min < x_max && y_min < y_max; }

  double center_x() const { return 0.5 * (x_min + x_max); }
  /// Ground-contact point: bottom edge midpoint.
  double bottom_center_x() const { return center_x(); }
  double bottom_center_y() const { return y_max; }
};

double iou(const BoundingBox& a, const BoundingBox& b);

/// Clips to [0,W]x[0,H]. Empty result when nothing remains inside.
std::optional<BoundingBox> clip_box(const BoundingBox& box, int width, int height);

struct Annotation {
  std::string image_id;
  DamageClass class_id = DamageClass::D00;
  BoundingBox bbox;
  Provenance provenance = Provenance::original;
};

/// Binary per-pixel road map; true = drivable road surface.
struct RoadMask {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> road;  // 0/1 per pixel
  int road_pixel_count = 0;

  bool is_road(int x, int y) const {
    return road[static_cast<std::size_t>(y) * width + x] != 0;
  }
  void set_road(int x, int y, bool v) {
    road[static_cast<std::size_t>(y) * width + x] = v ? 1 : 0;
  }

  /// Threshold rule: value > threshold means road.
  static RoadMask from_gray(const GrayImage& gray, int threshold = 127);
};

struct ImageRecord {
  std::string image_id;  // file stem; unique per dataset
  Image pixels;
  std::filesystem::path source_path;
  std::optional<std::filesystem::path> mask_path;

  int width() const { return pixels.width; }
  int height() const { return pixels.height; }
};

/// Validated, immutable view of a detection dataset. Records are sorted by
/// image_id; annotations[i] belongs to records[i].
struct DatasetIndex {
  std::vector<ImageRecord> records;
  std::vector<std::vector<Annotation>> annotations;
  std::unordered_map<std::string, std::size_t> record_index;

  const ImageRecord* find(const std::string& image_id) const {
    auto it = record_index.find(image_id);
    return it == record_index.end() ? nullptr : &records[it->second];
  }
  const std::vector<Annotation>* annotations_of(const std::string& image_id) const {
    auto it = record_index.find(image_id);
    return it == record_index.end() ? nullptr : &annotations[it->second];
  }
  std::size_t annotation_count() const {
    std::size_t n = 0;
    for (const auto& v : annotations) n += v.size();
    return n;
  }
  void rebuild_lookup() {
    record_index.clear();
    for (std::size_t i = 0; i < records.size(); ++i) record_index[records[i].image_id] = i;
  }
};

}  // namespace roadaug
