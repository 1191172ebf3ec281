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
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "roadaug/blend.hpp"
#include "roadaug/damage_bank.hpp"
#include "roadaug/dataset_io.hpp"
#include "roadaug/placement.hpp"
#include "roadaug/rng.hpp"

namespace roadaug {

/// Toggles and thresholds of one augmentation run. The three ablation axes
/// (inject / content / perspective) form a monotone chain: perspective
/// awareness implies content awareness implies injection.
struct AugmentationConfig {
  std::uint64_t seed = 0;
  bool inject = true;
  bool content_aware = true;
  bool perspective_aware = true;
  int injections_per_image = 1;
  int max_attempts_per_injection = 10;
  BlendMode blend_mode = BlendMode::poisson_import;
  double overlap_iou_max = 0.3;
  double min_injected_area_px = 64.0;
  ScaleBounds scale_bounds;
  double heatmap_lambda = 1.0;  // heatmap vs uniform mixture weight
  int pitch_bins = 4;           // K
  double heatmap_sigma = 2.0;   // cells
  int heatmap_grid = 64;        // G
  int min_road_pixels = 500;
  double bank_min_scale = 0.05;
  std::optional<DamageClass> class_filter;

  void validate() const;  // throws ConfigError

  /// The four ablation rows: baseline, paste, content, ours.
  static AugmentationConfig ablation_preset(std::string_view name);

  /// Deterministic echo, one "key = value" line per field.
  std::string to_text() const;
};

enum class RejectReason {
  nothing_on_road,
  degenerate_quad,
  scale_out_of_range,
  overlap,
  min_area,
  solver_diverged,
};

const char* to_string(RejectReason r);

struct InjectionRecord {
  std::string instance_id;
  DamageClass class_id = DamageClass::D00;
  int target_bin = 0;
  int source_bin = 0;
  bool bin_fallback = false;
  int x = 0;
  int y = 0;
  PlacementSource placement_source = PlacementSource::heatmap;
  bool warped = false;
  double scale_ratio = 1.0;
  BoundingBox bbox;
  std::size_t omega_count = 0;
};

struct ImageOutcome {
  std::string image_id;
  bool passthrough = false;
  std::string passthrough_reason;
  int attempts = 0;
  int accepted = 0;
  std::map<RejectReason, int> rejections;
  std::vector<InjectionRecord> injections;
};

struct AugmentationReport {
  std::vector<ImageOutcome> per_image;  // image_id order

  std::size_t images() const { return per_image.size(); }
  int total_attempts() const;
  int total_accepted() const;
  int total_rejected() const;
  std::map<RejectReason, int> rejection_totals() const;
  std::map<DamageClass, int> class_totals() const;
  std::map<int, int> bin_totals() const;
  int bin_fallbacks() const;
  int placement_fallbacks() const;
  std::size_t passthrough_count() const;

  std::string to_text(const AugmentationConfig& config) const;
};

/// Supplies road masks on demand. Only invoked when content awareness is on;
/// tests wrap it to verify that.
class MaskProvider {
 public:
  virtual ~MaskProvider() = default;
  virtual RoadMask load(const ImageRecord& record) = 0;
};

/// <dir>/<image_id>.png, validated against the record dims.
class DirectoryMaskProvider : public MaskProvider {
 public:
  explicit DirectoryMaskProvider(std::filesystem::path dir) : dir_(std::move(dir)) {}
  RoadMask load(const ImageRecord& record) override;

 private:
  std::filesystem::path dir_;
};

/// Per-image row of the index table written by the `index` stage.
struct IndexRow {
  std::string image_id;
  bool no_road = false;
  double y_v = 0.0;
  FitConfidence confidence = FitConfidence::fallback;
  double horizon_ratio = 0.0;
  int bin = -1;
};

void save_index_table(const std::vector<IndexRow>& rows, const std::filesystem::path& file);
std::vector<IndexRow> load_index_table(const std::filesystem::path& file);

/// Everything augment_image consumes, shared read-only across workers.
struct PipelineArtifacts {
  PitchBinning binning;  // bin_count == 1 without perspective awareness
  std::unordered_map<std::string, PerspectiveMap> maps;
  std::unordered_map<std::string, int> bin_by_image;
  std::unordered_map<std::string, RoadMask> masks;  // content-aware runs only
  std::unordered_map<std::string, std::string> image_errors;
  std::vector<IndexRow> rows;
  DamageBank bank;
  std::vector<PlacementHeatmap> heatmaps;
  BankBuildReport bank_report;
};

/// Optional stage outputs reused instead of being rebuilt.
struct PrebuiltArtifacts {
  std::optional<DamageBank> bank;
  std::optional<std::vector<PlacementHeatmap>> heatmaps;
  std::optional<std::vector<IndexRow>> index_rows;
};

/// Geometry stage only: masks, vanishing estimates, horizon bins. Used by the
/// `index` stage, which has no use for the bank or heatmaps.
void build_geometry(const DatasetIndex& index, MaskProvider* masks,
                    const AugmentationConfig& config, PipelineArtifacts& art,
                    const PrebuiltArtifacts* prebuilt = nullptr);

/// Builds masks, maps, bins, bank and heatmaps as the configuration demands.
/// masks may be null when content awareness is off (it is then never used).
PipelineArtifacts build_artifacts(const DatasetIndex& index, MaskProvider* masks,
                                  const AugmentationConfig& config,
                                  const PrebuiltArtifacts* prebuilt = nullptr);

/// Applies the configured ablation row to one image. existing annotations
/// pass through unmodified; accepted injections append annotations with the
/// tight bounds of their clipped region. rng must be the image's private
/// stream.
ImageOutcome augment_image(const ImageRecord& record, const std::vector<Annotation>& existing,
                           const RoadMask* mask, const PerspectiveMap* map, int image_bin,
                           const DamageBank& bank, const PlacementHeatmap& heatmap,
                           const AugmentationConfig& config, Rng& rng, Image& out_pixels,
                           std::vector<Annotation>& out_annotations);

/// End-to-end run: every image processed exactly once with its own random
/// stream derived from (seed, image_id), outputs written under out_dir
/// (images/, annotations.json, placements.tsv, report.txt). Outputs are
/// independent of the worker count.
AugmentationReport augment_dataset(const DatasetIndex& index, MaskProvider* masks,
                                   const AugmentationConfig& config,
                                   const std::filesystem::path& out_dir, int jobs = 1,
                                   const PrebuiltArtifacts* prebuilt = nullptr);

}  // namespace roadaug
