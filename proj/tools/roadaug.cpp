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

#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include "roadaug/config.hpp"
#include "roadaug/dataset_io.hpp"
#include "roadaug/errors.hpp"
#include "roadaug/image_io.hpp"
#include "roadaug/pipeline.hpp"
#include "roadaug/render.hpp"

namespace fs = std::filesystem;
using namespace roadaug;

namespace {

enum class LogLevel { quiet = 0, info = 1, debug = 2 };

LogLevel g_log_level = LogLevel::info;

void init_log_level() {
  const char* env = std::getenv("ROADAUG_LOG");
  if (env == nullptr) return;
  const std::string v(env);
  if (v == "quiet") g_log_level = LogLevel::quiet;
  else if (v == "debug") g_log_level = LogLevel::debug;
  else g_log_level = LogLevel::info;
}

void log_info(const std::string& msg) {
  if (g_log_level >= LogLevel::info) std::cerr << "[roadaug] " << msg << '\n';
}

void log_warn(const std::string& msg) { std::cerr << "[roadaug] warning: " << msg << '\n'; }

struct CommonArgs {
  std::string data;
  std::string out;
  std::string config_file;
  std::string masks_override;
  int jobs = 1;
};

struct AugmentFlags {
  std::string ablation;
  std::optional<std::uint64_t> seed;
  std::optional<int> bins;
  std::optional<double> sigma;
  std::optional<int> grid;
  std::optional<std::string> blend_mode;
  std::optional<int> injections;
  std::optional<int> max_attempts;
  std::optional<double> lambda;
  std::optional<double> overlap_iou;
  std::optional<double> min_area;
  std::optional<std::string> class_filter;
  std::optional<int> min_road_pixels;
  bool allow_unknown_classes = false;
};

/// defaults < config file < --ablation preset < individual flags
AugmentationConfig resolve_config(const CommonArgs& common, const AugmentFlags& flags,
                                  LoadOptions& load_options) {
  AugmentationConfig config;
  if (!common.config_file.empty()) {
    apply_config(config, load_options, parse_ini_file(common.config_file));
  }
  if (!flags.ablation.empty()) {
    const AugmentationConfig preset = AugmentationConfig::ablation_preset(flags.ablation);
    config.inject = preset.inject;
    config.content_aware = preset.content_aware;
    config.perspective_aware = preset.perspective_aware;
    config.blend_mode = preset.blend_mode;
  }
  if (flags.seed) config.seed = *flags.seed;
  if (flags.bins) config.pitch_bins = *flags.bins;
  if (flags.sigma) config.heatmap_sigma = *flags.sigma;
  if (flags.grid) config.heatmap_grid = *flags.grid;
  if (flags.blend_mode) {
    const auto mode = blend_mode_from_string(*flags.blend_mode);
    if (!mode) throw ConfigError("invalid --blend-mode: '" + *flags.blend_mode + "'");
    config.blend_mode = *mode;
  }
  if (flags.injections) config.injections_per_image = *flags.injections;
  if (flags.max_attempts) config.max_attempts_per_injection = *flags.max_attempts;
  if (flags.lambda) config.heatmap_lambda = *flags.lambda;
  if (flags.overlap_iou) config.overlap_iou_max = *flags.overlap_iou;
  if (flags.min_area) config.min_injected_area_px = *flags.min_area;
  if (flags.min_road_pixels) config.min_road_pixels = *flags.min_road_pixels;
  if (flags.class_filter) {
    const auto cls = damage_class_from_string(*flags.class_filter);
    if (!cls) throw ConfigError("invalid --class-filter: '" + *flags.class_filter + "'");
    config.class_filter = *cls;
  }
  if (flags.allow_unknown_classes) load_options.allow_unknown_classes = true;
  config.validate();
  return config;
}

std::optional<fs::path> resolve_masks_dir(const CommonArgs& common) {
  if (!common.masks_override.empty()) return fs::path(common.masks_override);
  const Manifest manifest = resolve_manifest(common.data);
  return manifest.masks_dir;
}

int run_index(const CommonArgs& common, int bins, int min_road_pixels) {
  LoadOptions load_options;
  load_options.jobs = common.jobs;
  LoadReport load_report;
  const DatasetIndex index = load_dataset(common.data, &load_report, load_options);
  log_info("loaded " + std::to_string(index.records.size()) + " images, " +
           std::to_string(index.annotation_count()) + " annotations");

  const auto masks_dir = resolve_masks_dir(common);
  if (!masks_dir) throw ConfigError("index requires a masks directory");
  DirectoryMaskProvider provider(*masks_dir);

  AugmentationConfig config;  // full pipeline toggles; only geometry knobs matter here
  config.pitch_bins = bins;
  config.min_road_pixels = min_road_pixels;
  PipelineArtifacts art;
  art.binning.bin_count = 1;
  build_geometry(index, &provider, config, art);

  fs::create_directories(common.out);
  const fs::path table = fs::path(common.out) / "index.tsv";
  save_index_table(art.rows, table);
  log_info("wrote " + table.string());

  std::ofstream rep(fs::path(common.out) / "load_report.txt");
  rep << load_report.to_text();
  return 0;
}

int run_bank_extract(const CommonArgs& common, const std::string& index_table, bool pooled,
                     int bins, double min_scale) {
  LoadOptions load_options;
  load_options.jobs = common.jobs;
  const DatasetIndex index = load_dataset(common.data, nullptr, load_options);

  BankOptions bopts;
  bopts.min_scale = min_scale;
  BankBuildReport report;
  DamageBank bank;
  if (pooled) {
    bank = extract_bank_pooled(index, bopts, &report);
  } else {
    std::vector<IndexRow> rows;
    if (!index_table.empty()) {
      rows = load_index_table(index_table);
    } else {
      const auto masks_dir = resolve_masks_dir(common);
      if (!masks_dir) throw ConfigError("bank-extract needs --index-table, --pooled or masks");
      DirectoryMaskProvider provider(*masks_dir);
      AugmentationConfig config;
      config.pitch_bins = bins;
      PipelineArtifacts art;
      build_geometry(index, &provider, config, art);
      rows = std::move(art.rows);
    }
    std::unordered_map<std::string, PerspectiveMap> maps;
    std::vector<double> ratios;
    for (const IndexRow& row : rows) {
      if (row.no_road) continue;
      const ImageRecord* rec = index.find(row.image_id);
      if (rec == nullptr) continue;
      maps.emplace(row.image_id,
                   make_perspective_map(VanishingEstimate{row.y_v, row.confidence, 0, 0},
                                        rec->width(), rec->height()));
      ratios.push_back(maps.at(row.image_id).horizon_ratio());
    }
    const PitchBinning binning = build_pitch_bins(ratios, bins);
    bank = extract_bank(index, maps, binning, bopts, &report);
  }

  save_bank(bank, common.out);
  log_info("extracted " + std::to_string(report.extracted) + " instances (too_small " +
           std::to_string(report.skipped_too_small) + ", near_horizon " +
           std::to_string(report.skipped_near_horizon) + ", no_map " +
           std::to_string(report.skipped_no_map) + ")");
  return 0;
}

int run_heatmap_build(const CommonArgs& common, const std::string& index_table, int grid,
                      double sigma) {
  LoadOptions load_options;
  load_options.jobs = common.jobs;
  const DatasetIndex index = load_dataset(common.data, nullptr, load_options);

  std::unordered_map<std::string, int> bin_by_image;
  int bin_count = 1;
  if (!index_table.empty()) {
    for (const IndexRow& row : load_index_table(index_table)) {
      if (row.no_road) continue;
      bin_by_image[row.image_id] = row.bin;
      bin_count = std::max(bin_count, row.bin + 1);
    }
  } else {
    for (const ImageRecord& rec : index.records) bin_by_image[rec.image_id] = 0;
  }

  HeatmapOptions hopts;
  hopts.grid = grid;
  hopts.sigma = sigma;
  const auto heatmaps = build_heatmaps(index, bin_by_image, bin_count, hopts);

  fs::create_directories(common.out);
  save_heatmaps(heatmaps, fs::path(common.out) / "heatmaps.bin");
  for (const auto& h : heatmaps) {
    save_png(fs::path(common.out) / ("heatmap_bin" + std::to_string(h.bin) + ".png"),
             render_heatmap(h));
  }
  log_info("wrote " + std::to_string(heatmaps.size()) + " heatmaps to " + common.out);
  return 0;
}

int run_augment(const CommonArgs& common, const AugmentFlags& flags,
                const std::string& bank_dir, const std::string& heatmaps_file,
                const std::string& index_table) {
  LoadOptions load_options;
  load_options.jobs = common.jobs;
  const AugmentationConfig config = resolve_config(common, flags, load_options);

  LoadReport load_report;
  const DatasetIndex index = load_dataset(common.data, &load_report, load_options);
  log_info("loaded " + std::to_string(index.records.size()) + " images, " +
           std::to_string(index.annotation_count()) + " annotations");

  std::optional<DirectoryMaskProvider> provider;
  if (config.content_aware) {
    const auto masks_dir = resolve_masks_dir(common);
    if (!masks_dir) {
      throw ConfigError(
          "content-aware augmentation requires masks (masks/ under the data root or --masks)");
    }
    provider.emplace(*masks_dir);
  }

  PrebuiltArtifacts prebuilt;
  const PrebuiltArtifacts* prebuilt_ptr = nullptr;
  if (!bank_dir.empty()) {
    prebuilt.bank = load_bank(bank_dir);
    prebuilt_ptr = &prebuilt;
  }
  if (!heatmaps_file.empty()) {
    prebuilt.heatmaps = load_heatmaps(heatmaps_file);
    prebuilt_ptr = &prebuilt;
  }
  if (!index_table.empty()) {
    prebuilt.index_rows = load_index_table(index_table);
    prebuilt_ptr = &prebuilt;
  }

  const AugmentationReport report =
      augment_dataset(index, provider ? &*provider : nullptr, config, common.out, common.jobs,
                      prebuilt_ptr);
  {
    std::ofstream rep(fs::path(common.out) / "load_report.txt");
    rep << load_report.to_text();
  }
  log_info("accepted " + std::to_string(report.total_accepted()) + "/" +
           std::to_string(report.total_attempts()) + " attempts over " +
           std::to_string(report.images()) + " images");
  return 0;
}

int run_stats(const CommonArgs& common, const std::string& index_table) {
  LoadOptions load_options;
  load_options.jobs = common.jobs;
  load_options.allow_unknown_classes = true;
  LoadReport report;
  const DatasetIndex index = load_dataset(common.data, &report, load_options);

  std::map<DamageClass, int> per_class;
  std::map<DamageClass, double> area_sum;
  std::size_t injected = 0;
  for (const auto& anns : index.annotations) {
    for (const auto& a : anns) {
      per_class[a.class_id] += 1;
      area_sum[a.class_id] += a.bbox.area();
      injected += a.provenance == Provenance::injected ? 1 : 0;
    }
  }

  std::cout << "images: " << index.records.size() << '\n'
            << "annotations: " << index.annotation_count() << '\n'
            << "injected: " << injected << '\n';
  for (const auto& [cls, n] : per_class) {
    std::cout << to_string(cls) << ": " << n << " boxes, mean area "
              << (n > 0 ? area_sum[cls] / n : 0.0) << " px^2\n";
  }
  std::cout << "clipped: " << report.clipped << ", dropped_outside: " << report.dropped_outside
            << ", dangling: " << report.dangling.size()
            << ", unknown_class_dropped: " << report.unknown_class_dropped << '\n';

  if (!index_table.empty()) {
    std::map<int, int> per_bin;
    int fitted = 0, fallback = 0, noroad = 0;
    for (const IndexRow& row : load_index_table(index_table)) {
      if (row.no_road) {
        ++noroad;
        continue;
      }
      per_bin[row.bin] += 1;
      (row.confidence == FitConfidence::fitted ? fitted : fallback) += 1;
    }
    std::cout << "horizon fits: " << fitted << " fitted, " << fallback << " fallback, " << noroad
              << " no-road\n";
    for (const auto& [bin, n] : per_bin) std::cout << "bin " << bin << ": " << n << " images\n";
  }
  return 0;
}

int run_inspect(const CommonArgs& common, const std::string& augmented_dir,
                const std::string& heatmaps_file, const std::string& index_table,
                const std::string& only_images) {
  LoadOptions load_options;
  load_options.jobs = common.jobs;
  const DatasetIndex index = load_dataset(common.data, nullptr, load_options);
  fs::create_directories(common.out);

  std::size_t rendered = 0;

  // optional artifacts
  std::optional<DatasetIndex> augmented;
  if (!augmented_dir.empty()) {
    try {
      augmented = load_dataset(augmented_dir);
    } catch (const Error& e) {
      log_warn(std::string("cannot load augmented outputs: ") + e.what());
    }
  }
  std::unordered_map<std::string, IndexRow> rows;
  if (!index_table.empty()) {
    try {
      for (auto& row : load_index_table(index_table)) rows.emplace(row.image_id, row);
    } catch (const Error& e) {
      log_warn(std::string("cannot load index table: ") + e.what());
    }
  }
  std::unordered_map<std::string, std::vector<std::pair<int, int>>> placements;
  if (!augmented_dir.empty()) {
    const fs::path pl = fs::path(augmented_dir) / "placements.tsv";
    std::ifstream in(pl);
    if (in) {
      std::string line;
      std::getline(in, line);
      while (std::getline(in, line)) {
        std::istringstream row(line);
        std::string id;
        int x = 0, y = 0;
        if (row >> id >> x >> y) placements[id].emplace_back(x, y);
      }
    } else {
      log_warn("no placements.tsv under " + augmented_dir);
    }
  }

  std::optional<std::set<std::string>> filter;
  if (!only_images.empty()) {
    filter.emplace();
    std::istringstream ss(only_images);
    std::string id;
    while (std::getline(ss, id, ',')) {
      if (!id.empty()) filter->insert(id);
    }
    for (const auto& id : *filter) {
      if (index.find(id) == nullptr) log_warn("unknown image_id requested: " + id);
    }
  }

  const auto masks_dir = resolve_masks_dir(common);
  for (const ImageRecord& rec : index.records) {
    if (filter && !filter->count(rec.image_id)) continue;

    Image canvas = rec.pixels;
    if (augmented) {
      const ImageRecord* aug = augmented->find(rec.image_id);
      if (aug != nullptr) canvas = aug->pixels;
    }
    if (masks_dir) {
      try {
        const RoadMask mask =
            load_mask(*masks_dir / (rec.image_id + ".png"), rec.width(), rec.height());
        draw_mask_contour(canvas, mask, kMaskContourColor);
      } catch (const Error& e) {
        log_warn(rec.image_id + ": " + e.what());
      }
    }
    const auto row_it = rows.find(rec.image_id);
    if (row_it != rows.end() && !row_it->second.no_road) {
      draw_hline(canvas, static_cast<int>(std::lround(row_it->second.y_v)), kHorizonColor);
    }
    const std::vector<Annotation>* anns = nullptr;
    if (augmented) anns = augmented->annotations_of(rec.image_id);
    if (anns == nullptr) anns = &index.annotations[index.record_index.at(rec.image_id)];
    for (const Annotation& a : *anns) {
      draw_box(canvas, a.bbox,
               a.provenance == Provenance::injected ? kInjectedBoxColor : kOriginalBoxColor);
    }
    const auto pl_it = placements.find(rec.image_id);
    if (pl_it != placements.end()) {
      for (const auto& [x, y] : pl_it->second) draw_cross(canvas, x, y, kPlacementColor);
    }
    save_png(fs::path(common.out) / ("overlay_" + rec.image_id + ".png"), canvas);
    ++rendered;
  }

  if (!heatmaps_file.empty()) {
    try {
      for (const auto& h : load_heatmaps(heatmaps_file)) {
        save_png(fs::path(common.out) / ("heatmap_bin" + std::to_string(h.bin) + ".png"),
                 render_heatmap(h));
        ++rendered;
      }
    } catch (const Error& e) {
      log_warn(std::string("cannot render heatmaps: ") + e.what());
    }
  }

  if (rendered == 0) {
    log_warn("nothing rendered");
    return 1;
  }
  log_info("rendered " + std::to_string(rendered) + " files to " + common.out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  init_log_level();

  CLI::App app{"Content- and perspective-aware road damage augmentation"};
  app.require_subcommand(1);

  CommonArgs common;
  AugmentFlags flags;
  int index_bins = 4;
  int index_min_road = 500;
  std::string index_table, bank_dir, heatmaps_file, only_images, augmented_dir;
  bool pooled = false;
  double bank_min_scale = 0.05;
  int hm_grid = 64;
  double hm_sigma = 2.0;

  const auto add_common = [&](CLI::App* cmd, bool needs_out) {
    cmd->add_option("--data", common.data, "dataset root or manifest file")->required();
    if (needs_out) cmd->add_option("--out", common.out, "output directory")->required();
    cmd->add_option("--config", common.config_file, "config file (key = value with sections)");
    cmd->add_option("--masks", common.masks_override, "mask directory override");
    cmd->add_option("--jobs", common.jobs, "worker threads")->check(CLI::PositiveNumber);
  };

  CLI::App* cmd_index = app.add_subcommand("index", "estimate per-image perspective and bins");
  add_common(cmd_index, true);
  cmd_index->add_option("--bins", index_bins, "number of pitch bins");
  cmd_index->add_option("--min-road-pixels", index_min_road, "estimation threshold");

  CLI::App* cmd_bank = app.add_subcommand("bank-extract", "cut damage patches into a bank");
  add_common(cmd_bank, true);
  cmd_bank->add_option("--index-table", index_table, "index.tsv from the index stage");
  cmd_bank->add_flag("--pooled", pooled, "single-bin bank without perspective data");
  cmd_bank->add_option("--bins", index_bins, "number of pitch bins");
  cmd_bank->add_option("--min-scale", bank_min_scale, "minimum source perspective scale");

  CLI::App* cmd_heat = app.add_subcommand("heatmap-build", "build placement heatmaps");
  add_common(cmd_heat, true);
  cmd_heat->add_option("--index-table", index_table, "index.tsv for per-bin heatmaps");
  cmd_heat->add_option("--grid", hm_grid, "heatmap grid resolution");
  cmd_heat->add_option("--sigma", hm_sigma, "Gaussian bandwidth in cells");

  CLI::App* cmd_aug = app.add_subcommand("augment", "run the augmentation pipeline");
  add_common(cmd_aug, true);
  auto opt_seed = cmd_aug->add_option("--seed", "run seed");
  auto opt_bins = cmd_aug->add_option("--bins", "number of pitch bins");
  auto opt_sigma = cmd_aug->add_option("--sigma", "heatmap bandwidth in cells");
  auto opt_grid = cmd_aug->add_option("--grid", "heatmap grid resolution");
  auto opt_blend = cmd_aug->add_option("--blend-mode", "poisson_import | poisson_mixed | alpha");
  auto opt_abl = cmd_aug->add_option("--ablation", flags.ablation,
                                     "preset: baseline | paste | content | ours");
  auto opt_inj = cmd_aug->add_option("--injections", "injections per image");
  auto opt_att = cmd_aug->add_option("--max-attempts", "attempts per injection");
  auto opt_lam = cmd_aug->add_option("--lambda", "heatmap mixture weight");
  auto opt_iou = cmd_aug->add_option("--overlap-iou", "max IoU against existing boxes");
  auto opt_area = cmd_aug->add_option("--min-area", "minimum injected bbox area, px");
  auto opt_cls = cmd_aug->add_option("--class-filter", "restrict injected class");
  auto opt_mrp = cmd_aug->add_option("--min-road-pixels", "estimation threshold");
  cmd_aug->add_flag("--allow-unknown-classes", flags.allow_unknown_classes,
                    "drop unknown class labels instead of failing");
  cmd_aug->add_option("--bank-dir", bank_dir, "reuse a persisted damage bank");
  cmd_aug->add_option("--heatmaps", heatmaps_file, "reuse persisted heatmaps.bin");
  cmd_aug->add_option("--index-table", index_table, "reuse a persisted index.tsv");

  CLI::App* cmd_inspect = app.add_subcommand("inspect", "render overlays and heatmaps");
  add_common(cmd_inspect, true);
  cmd_inspect->add_option("--augmented", augmented_dir, "augment output directory");
  cmd_inspect->add_option("--heatmaps", heatmaps_file, "heatmaps.bin to render");
  cmd_inspect->add_option("--index-table", index_table, "index.tsv for horizon overlays");
  cmd_inspect->add_option("--images", only_images, "comma-separated image ids");

  CLI::App* cmd_stats = app.add_subcommand("stats", "print dataset statistics");
  add_common(cmd_stats, false);
  cmd_stats->add_option("--index-table", index_table, "index.tsv for bin occupancy");

  // unknown flags outrank missing-required errors in the diagnostics
  {
    std::set<std::string> known{"--help", "-h"};
    const auto collect = [&known](const CLI::App* a) {
      for (const CLI::Option* opt : a->get_options()) {
        for (const auto& n : opt->get_lnames()) known.insert("--" + n);
        for (const auto& n : opt->get_snames()) known.insert("-" + n);
      }
    };
    collect(&app);
    for (const CLI::App* sub : app.get_subcommands(nullptr)) collect(sub);
    for (int i = 1; i < argc; ++i) {
      std::string tok = argv[i];
      tok = tok.substr(0, tok.find('='));
      if (tok.rfind("--", 0) == 0 && !known.count(tok)) {
        std::cerr << "The following argument was not expected: " << tok << "\n"
                  << "Run with --help for more information.\n";
        return 2;
      }
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);  // 0
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*cmd_aug) {
      if (opt_seed->count()) flags.seed = opt_seed->as<std::uint64_t>();
      if (opt_bins->count()) flags.bins = opt_bins->as<int>();
      if (opt_sigma->count()) flags.sigma = opt_sigma->as<double>();
      if (opt_grid->count()) flags.grid = opt_grid->as<int>();
      if (opt_blend->count()) flags.blend_mode = opt_blend->as<std::string>();
      if (opt_inj->count()) flags.injections = opt_inj->as<int>();
      if (opt_att->count()) flags.max_attempts = opt_att->as<int>();
      if (opt_lam->count()) flags.lambda = opt_lam->as<double>();
      if (opt_iou->count()) flags.overlap_iou = opt_iou->as<double>();
      if (opt_area->count()) flags.min_area = opt_area->as<double>();
      if (opt_cls->count()) flags.class_filter = opt_cls->as<std::string>();
      if (opt_mrp->count()) flags.min_road_pixels = opt_mrp->as<int>();
      (void)opt_abl;
      return run_augment(common, flags, bank_dir, heatmaps_file, index_table);
    }
    if (*cmd_index) return run_index(common, index_bins, index_min_road);
    if (*cmd_bank) return run_bank_extract(common, index_table, pooled, index_bins, bank_min_scale);
    if (*cmd_heat) return run_heatmap_build(common, index_table, hm_grid, hm_sigma);
    if (*cmd_inspect) {
      return run_inspect(common, augmented_dir, heatmaps_file, index_table, only_images);
    }
    if (*cmd_stats) return run_stats(common, index_table);
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
