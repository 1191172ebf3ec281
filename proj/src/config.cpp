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

#include "roadaug/config.hpp"

#include <fstream>
#include <sstream>

#include "roadaug/errors.hpp"

namespace roadaug {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
  if (value == "false" || value == "0" || value == "no" || value == "off") return false;
  throw ConfigError("invalid boolean for " + key + ": '" + value + "'");
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("invalid number for " + key + ": '" + value + "'");
  }
}

long long parse_int(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("invalid integer for " + key + ": '" + value + "'");
  }
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("invalid unsigned integer for " + key + ": '" + value + "'");
  }
}

}  // namespace

std::map<std::string, std::string> parse_ini_text(const std::string& text,
                                                  const std::string& origin) {
  std::map<std::string, std::string> out;
  std::istringstream in(text);
  std::string line, section;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto comment = line.find_first_of("#;");
    if (comment != std::string::npos) line = line.substr(0, comment);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ConfigError(origin + ":" + std::to_string(line_no) + ": unterminated section");
      }
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty()) {
        throw ConfigError(origin + ":" + std::to_string(line_no) + ": empty section name");
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(origin + ":" + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) {
      throw ConfigError(origin + ":" + std::to_string(line_no) + ": empty key");
    }
    const std::string full = section.empty() ? key : section + "." + key;
    if (out.count(full)) {
      throw ConfigError(origin + ":" + std::to_string(line_no) + ": duplicate key " + full);
    }
    out[full] = value;
  }
  return out;
}

std::map<std::string, std::string> parse_ini_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_ini_text(buf.str(), path.string());
}

void apply_config(AugmentationConfig& config, LoadOptions& load_options,
                  const std::map<std::string, std::string>& values) {
  for (const auto& [key, value] : values) {
    if (key == "pipeline.seed") {
      config.seed = parse_u64(key, value);
    } else if (key == "pipeline.inject") {
      config.inject = parse_bool(key, value);
    } else if (key == "pipeline.content_aware") {
      config.content_aware = parse_bool(key, value);
    } else if (key == "pipeline.perspective_aware") {
      config.perspective_aware = parse_bool(key, value);
    } else if (key == "pipeline.injections_per_image") {
      config.injections_per_image = static_cast<int>(parse_int(key, value));
    } else if (key == "pipeline.max_attempts_per_injection") {
      config.max_attempts_per_injection = static_cast<int>(parse_int(key, value));
    } else if (key == "pipeline.blend_mode") {
      const auto mode = blend_mode_from_string(value);
      if (!mode) throw ConfigError("invalid blend_mode: '" + value + "'");
      config.blend_mode = *mode;
    } else if (key == "pipeline.overlap_iou_max") {
      config.overlap_iou_max = parse_double(key, value);
    } else if (key == "pipeline.min_injected_area_px") {
      config.min_injected_area_px = parse_double(key, value);
    } else if (key == "pipeline.scale_min") {
      config.scale_bounds.min_ratio = parse_double(key, value);
    } else if (key == "pipeline.scale_max") {
      config.scale_bounds.max_ratio = parse_double(key, value);
    } else if (key == "pipeline.heatmap_lambda") {
      config.heatmap_lambda = parse_double(key, value);
    } else if (key == "pipeline.class_filter") {
      if (value == "none" || value.empty()) {
        config.class_filter.reset();
      } else {
        const auto cls = damage_class_from_string(value);
        if (!cls) throw ConfigError("invalid class_filter: '" + value + "'");
        config.class_filter = *cls;
      }
    } else if (key == "perspective.bins") {
      config.pitch_bins = static_cast<int>(parse_int(key, value));
    } else if (key == "perspective.min_road_pixels") {
      config.min_road_pixels = static_cast<int>(parse_int(key, value));
    } else if (key == "perspective.bank_min_scale") {
      config.bank_min_scale = parse_double(key, value);
    } else if (key == "placement.grid") {
      config.heatmap_grid = static_cast<int>(parse_int(key, value));
    } else if (key == "placement.sigma") {
      config.heatmap_sigma = parse_double(key, value);
    } else if (key == "dataset.allow_unknown_classes") {
      load_options.allow_unknown_classes = parse_bool(key, value);
    } else {
      throw ConfigError("unknown config key: " + key);
    }
  }
}

}  // namespace roadaug
