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

#include "support/fixtures.hpp"

#include <atomic>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <unistd.h>

#include "roadaug/image_io.hpp"

namespace fs = std::filesystem;

namespace roadaug::testing {

TrapezoidGeometry random_geometry(Rng& rng, int width, int height) {
  TrapezoidGeometry g;
  g.vx = rng.uniform_in(0.25 * width, 0.75 * width);
  g.vy = rng.uniform_in(0.05 * height, 0.45 * height);
  g.bottom_left = rng.uniform_in(-0.20 * width, 0.25 * width);
  g.bottom_right = rng.uniform_in(0.75 * width, 1.20 * width);
  return g;
}

RoadMask rasterize_trapezoid(const TrapezoidGeometry& geom, int width, int height) {
  RoadMask mask;
  mask.width = width;
  mask.height = height;
  mask.road.assign(static_cast<std::size_t>(width) * height, 0);

  const double y_bottom = height - 1.0;
  const double y_start = geom.vy + geom.top_margin * height;
  // boundary x at row y, both lines through the vanishing point
  const auto left_x = [&](double y) {
    return geom.vx + (geom.bottom_left - geom.vx) * (y - geom.vy) / (y_bottom - geom.vy);
  };
  const auto right_x = [&](double y) {
    return geom.vx + (geom.bottom_right - geom.vx) * (y - geom.vy) / (y_bottom - geom.vy);
  };

  int count = 0;
  for (int y = 0; y < height; ++y) {
    if (y < y_start) continue;
    const int x0 = std::max(0, static_cast<int>(std::ceil(left_x(y))));
    const int x1 = std::min(width - 1, static_cast<int>(std::floor(right_x(y))));
    for (int x = x0; x <= x1; ++x) {
      mask.set_road(x, y, true);
      ++count;
    }
  }
  mask.road_pixel_count = count;
  return mask;
}

GrayImage mask_to_gray(const RoadMask& mask) {
  GrayImage gray(mask.width, mask.height, 0);
  for (int y = 0; y < mask.height; ++y) {
    for (int x = 0; x < mask.width; ++x) {
      if (mask.is_road(x, y)) gray.at(x, y) = 255;
    }
  }
  return gray;
}

Image make_street_image(Rng& rng, int width, int height, const RoadMask& mask) {
  Image image(width, height);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      if (mask.width == width && mask.height == height && mask.is_road(x, y)) {
        // asphalt: mid-gray with speckle
        const int base = 95 + static_cast<int>(rng.uniform_index(30));
        image.at(x, y, 0) = static_cast<std::uint8_t>(base);
        image.at(x, y, 1) = static_cast<std::uint8_t>(base + 2);
        image.at(x, y, 2) = static_cast<std::uint8_t>(base + 5);
      } else {
        // sky-to-verge gradient with mild noise
        const int g = 210 - (150 * y) / height + static_cast<int>(rng.uniform_index(12));
        image.at(x, y, 0) = static_cast<std::uint8_t>(clamp_int(g - 40, 0, 255));
        image.at(x, y, 1) = static_cast<std::uint8_t>(clamp_int(g, 0, 255));
        image.at(x, y, 2) = static_cast<std::uint8_t>(clamp_int(g - 70, 0, 255));
      }
    }
  }
  return image;
}

void paint_damage(Image& image, const BoundingBox& box, DamageClass cls, Rng& rng) {
  const int x0 = clamp_int(static_cast<int>(box.x_min), 0, image.width - 1);
  const int y0 = clamp_int(static_cast<int>(box.y_min), 0, image.height - 1);
  const int x1 = clamp_int(static_cast<int>(box.x_max) - 1, 0, image.width - 1);
  const int y1 = clamp_int(static_cast<int>(box.y_max) - 1, 0, image.height - 1);
  const int w = x1 - x0 + 1;
  const int h = y1 - y0 + 1;
  if (w <= 0 || h <= 0) return;

  const auto darken = [&](int x, int y, int amount) {
    if (!image.in_bounds(x, y)) return;
    for (int c = 0; c < 3; ++c) {
      image.at(x, y, c) =
          static_cast<std::uint8_t>(clamp_int(image.at(x, y, c) - amount, 0, 255));
    }
  };

  switch (cls) {
    case DamageClass::D00:  // longitudinal: dark wavy vertical band
      for (int y = y0; y <= y1; ++y) {
        const int cx = x0 + w / 2 +
                       static_cast<int>(std::lround(0.25 * w * std::sin(0.2 * (y - y0))));
        for (int dx = -w / 6 - 1; dx <= w / 6 + 1; ++dx) {
          darken(cx + dx, y, 70 + static_cast<int>(rng.uniform_index(25)));
        }
      }
      break;
    case DamageClass::D10:  // transverse: dark wavy horizontal band
      for (int x = x0; x <= x1; ++x) {
        const int cy = y0 + h / 2 +
                       static_cast<int>(std::lround(0.25 * h * std::sin(0.2 * (x - x0))));
        for (int dy = -h / 6 - 1; dy <= h / 6 + 1; ++dy) {
          darken(x, cy + dy, 70 + static_cast<int>(rng.uniform_index(25)));
        }
      }
      break;
    case DamageClass::D20:  // alligator: speckled dark cells
      for (int y = y0; y <= y1; ++y) {
        for (int x = x0; x <= x1; ++x) {
          if ((x + 2 * y) % 5 != 0 && rng.uniform_real() < 0.55) {
            darken(x, y, 50 + static_cast<int>(rng.uniform_index(40)));
          }
        }
      }
      break;
    case DamageClass::D40:  // pothole: dark ellipse
      for (int y = y0; y <= y1; ++y) {
        for (int x = x0; x <= x1; ++x) {
          const double nx = (x - (x0 + w / 2.0)) / (0.5 * w);
          const double ny = (y - (y0 + h / 2.0)) / (0.5 * h);
          if (nx * nx + ny * ny <= 1.0) {
            darken(x, y, 85 + static_cast<int>(rng.uniform_index(20)));
          }
        }
      }
      break;
  }
}

std::filesystem::path write_voc_xml(
    const fs::path& dir, const std::string& stem, int width, int height,
    const std::vector<std::pair<std::string, BoundingBox>>& objects) {
  fs::create_directories(dir);
  const fs::path path = dir / (stem + ".xml");
  std::ofstream out(path);
  out << "<annotation>\n"
      << "  <filename>" << stem << ".png</filename>\n"
      << "  <size><width>" << width << "</width><height>" << height
      << "</height><depth>3</depth></size>\n";
  out.precision(10);
  for (const auto& [name, box] : objects) {
    out << "  <object>\n"
        << "    <name>" << name << "</name>\n"
        << "    <bndbox><xmin>" << box.x_min << "</xmin><ymin>" << box.y_min << "</ymin><xmax>"
        << box.x_max << "</xmax><ymax>" << box.y_max << "</ymax></bndbox>\n"
        << "  </object>\n";
  }
  out << "</annotation>\n";
  return path;
}

BuiltFixture build_fixture_dataset(const fs::path& root, const FixtureSpec& spec) {
  BuiltFixture built;
  built.root = root;
  const fs::path images_dir = root / "images";
  const fs::path masks_dir = root / "masks";
  const fs::path ann_dir = root / "annotations";
  fs::create_directories(images_dir);
  fs::create_directories(masks_dir);
  fs::create_directories(ann_dir);

  const char* class_names[4] = {"D00", "D10", "D20", "D40"};

  for (int i = 0; i < spec.images; ++i) {
    std::ostringstream name;
    name << "img_" << std::setw(3) << std::setfill('0') << i;
    const std::string id = name.str();
    Rng rng(stream_seed(spec.seed, id));

    TrapezoidGeometry geom = random_geometry(rng, spec.width, spec.height);
    if (spec.vary_geometry) {
      // spread vanishing rows so quantile bins stay distinct
      geom.vy = (0.08 + 0.35 * i / std::max(1, spec.images - 1)) * spec.height;
    }
    const RoadMask mask = rasterize_trapezoid(geom, spec.width, spec.height);
    Image image = make_street_image(rng, spec.width, spec.height, mask);

    std::vector<std::pair<std::string, BoundingBox>> objects;
    for (int b = 0; b < spec.boxes_per_image; ++b) {
      // a box on the road, lower half of the frame
      const double y_max = rng.uniform_in(0.65 * spec.height, 0.96 * spec.height);
      const double h = rng.uniform_in(24.0, 60.0);
      const double w = rng.uniform_in(32.0, 90.0);
      const double cx = rng.uniform_in(0.30 * spec.width, 0.70 * spec.width);
      BoundingBox box{cx - w / 2, y_max - h, cx + w / 2, y_max};
      const DamageClass cls = static_cast<DamageClass>(rng.uniform_index(4));
      paint_damage(image, box, cls, rng);
      objects.emplace_back(class_names[static_cast<int>(cls)], box);
    }

    save_png(images_dir / (id + ".png"), image);
    save_gray_png(masks_dir / (id + ".png"), mask_to_gray(mask));
    write_voc_xml(ann_dir, id, spec.width, spec.height, objects);
    built.image_ids.push_back(id);
    built.geometries.push_back(geom);
  }
  return built;
}

fs::path make_temp_dir(const std::string& tag) {
  static std::atomic<std::uint64_t> counter{0};
  const fs::path base = fs::temp_directory_path() / "roadaug_tests";
  fs::path dir = base / (tag + "_" + std::to_string(counter.fetch_add(1)) + "_" +
                         std::to_string(static_cast<unsigned long long>(::getpid())));
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace roadaug::testing
