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
#include <unordered_map>
#include <vector>

#include "roadaug/perspective.hpp"
#include "roadaug/rng.hpp"
#include "roadaug/types.hpp"

namespace roadaug {

/// A damage patch cut from a source image: the raw bbox crop (the dataset has
/// boxes only, no instance masks) plus the perspective scale at its
/// ground-contact row.
struct DamageInstance {
  std::string instance_id;  // "<source_image_id>#<ordinal>"
  DamageClass class_id = DamageClass::D00;
  std::string source_image_id;
  BoundingBox source_bbox;
  Image patch;
  double s_src = 1.0;
  int bin = 0;
};

struct BankOptions {
  double min_scale = 0.05;  // instances nearer the horizon carry no usable texture
  int min_patch_px = 2;     // per side
};

struct BankBuildReport {
  std::size_t extracted = 0;
  std::size_t skipped_too_small = 0;
  std::size_t skipped_near_horizon = 0;
  std::size_t skipped_no_map = 0;
};

/// Damage patches grouped by (pitch bin, class). Immutable once built.
struct DamageBank {
  int bin_count = 1;
  std::vector<DamageInstance> instances;
  std::vector<std::vector<std::size_t>> by_bin;
  std::vector<std::array<std::vector<std::size_t>, 4>> by_bin_class;
  // creation snapshot
  std::vector<double> bin_edges;
  double min_scale = 0.05;

  std::size_t size() const { return instances.size(); }
  bool empty() const { return instances.empty(); }
  std::size_t group_count(int bin) const { return by_bin[bin].size(); }
  void rebuild_groups();
};

/// One instance per annotation whose patch is at least min_patch_px per side
/// and whose source perspective scale exceeds min_scale. Annotations on
/// images without a map are skipped and counted.
DamageBank extract_bank(const DatasetIndex& index,
                        const std::unordered_map<std::string, PerspectiveMap>& maps,
                        const PitchBinning& binning, const BankOptions& opts = {},
                        BankBuildReport* report = nullptr);

/// Single-bin variant for configurations without perspective awareness: no
/// maps required, s_src fixed to 1, only the patch-size filter applies.
DamageBank extract_bank_pooled(const DatasetIndex& index, const BankOptions& opts = {},
                               BankBuildReport* report = nullptr);

struct InstanceDraw {
  const DamageInstance* instance = nullptr;
  int bin_used = 0;
  bool bin_fallback = false;  // requested bin was empty; nearest nonempty used
};

/// Uniform draw over the requested bin (optionally restricted to one class).
/// An empty target group falls back to the nearest nonempty bin by absolute
/// distance, ties toward the smaller index. Throws EmptyBank when no group
/// anywhere can serve the request.
InstanceDraw sample_instance(const DamageBank& bank, int bin, Rng& rng,
                             std::optional<DamageClass> class_filter = std::nullopt);

/// Uniform draw pooled over all bins.
InstanceDraw sample_instance_pooled(const DamageBank& bank, Rng& rng,
                                    std::optional<DamageClass> class_filter = std::nullopt);

/// Bank directory layout: manifest.tsv + patches/<instance_id>.png.
void save_bank(const DamageBank& bank, const std::filesystem::path& dir);
DamageBank load_bank(const std::filesystem::path& dir);

}  // namespace roadaug
