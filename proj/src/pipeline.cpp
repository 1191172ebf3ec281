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

#include "roadaug/pipeline.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "roadaug/errors.hpp"
#include "roadaug/parallel.hpp"

namespace fs = std::filesystem;

namespace roadaug {

const char* to_string(RejectReason r) {
  switch (r) {
    case RejectReason::nothing_on_road: return "nothing_on_road";
    case RejectReason::degenerate_quad: return "degenerate_quad";
    case RejectReason::scale_out_of_range: return "scale_out_of_range";
    case RejectReason::overlap: return "overlap";
    case RejectReason::min_area: return "min_area";
    case RejectReason::solver_diverged: return "solver_diverged";
  }
  return "?";
}

void AugmentationConfig::validate() const {
  if (content_aware && !inject) {
    throw ConfigError("content_aware requires inject");
  }
  if (perspective_aware && !inject) {
    throw ConfigError("perspective_aware requires inject");
  }
  if (perspective_aware && !content_aware) {
    throw ConfigError("perspective_aware requires content_aware (ablation rows are monotone)");
  }
  if (injections_per_image < 0) throw ConfigError("injections_per_image must be >= 0");
  if (max_attempts_per_injection < 1) throw ConfigError("max_attempts must be >= 1");
  if (overlap_iou_max < 0.0 || overlap_iou_max > 1.0) {
    throw ConfigError("overlap_iou_max must lie in [0,1]");
  }
  if (min_injected_area_px < 0.0) throw ConfigError("min_injected_area_px must be >= 0");
  if (!(scale_bounds.min_ratio > 0.0) || !(scale_bounds.max_ratio > scale_bounds.min_ratio)) {
    throw ConfigError("scale bounds must satisfy 0 < min < max");
  }
  if (heatmap_lambda < 0.0 || heatmap_lambda > 1.0) {
    throw ConfigError("heatmap lambda must lie in [0,1]");
  }
  if (pitch_bins < 1) throw ConfigError("pitch_bins must be >= 1");
  if (heatmap_grid < 1) throw ConfigError("heatmap_grid must be >= 1");
  if (!(heatmap_sigma > 0.0)) throw ConfigError("heatmap_sigma must be > 0");
  if (min_road_pixels < 0) throw ConfigError("min_road_pixels must be >= 0");
  if (bank_min_scale < 0.0) throw ConfigError("bank_min_scale must be >= 0");
}

AugmentationConfig AugmentationConfig::ablation_preset(std::string_view name) {
  AugmentationConfig c;
  if (name == "baseline") {
    c.inject = false;
    c.content_aware = false;
    c.perspective_aware = false;
  } else if (name == "paste") {
    c.inject = true;
    c.content_aware = false;
    c.perspective_aware = false;
    c.blend_mode = BlendMode::alpha;
  } else if (name == "content") {
    c.inject = true;
    c.content_aware = true;
    c.perspective_aware = false;
    c.blend_mode = BlendMode::alpha;
  } else if (name == "ours") {
    c.inject = true;
    c.content_aware = true;
    c.perspective_aware = true;
    c.blend_mode = BlendMode::poisson_import;
  } else {
    throw ConfigError("unknown ablation preset: " + std::string(name));
  }
  return c;
}

std::string AugmentationConfig::to_text() const {
  std::ostringstream os;
  os.precision(17);
  os << "seed = " << seed << '\n'
     << "inject = " << (inject ? "true" : "false") << '\n'
     << "content_aware = " << (content_aware ? "true" : "false") << '\n'
     << "perspective_aware = " << (perspective_aware ? "true" : "false") << '\n'
     << "injections_per_image = " << injections_per_image << '\n'
     << "max_attempts_per_injection = " << max_attempts_per_injection << '\n'
     << "blend_mode = " << to_string(blend_mode) << '\n'
     << "overlap_iou_max = " << overlap_iou_max << '\n'
     << "min_injected_area_px = " << min_injected_area_px << '\n'
     << "scale_min = " << scale_bounds.min_ratio << '\n'
     << "scale_max = " << scale_bounds.max_ratio << '\n'
     << "heatmap_lambda = " << heatmap_lambda << '\n'
     << "pitch_bins = " << pitch_bins << '\n'
     << "heatmap_sigma = " << heatmap_sigma << '\n'
     << "heatmap_grid = " << heatmap_grid << '\n'
     << "min_road_pixels = " << min_road_pixels << '\n'
     << "bank_min_scale = " << bank_min_scale << '\n'
     << "class_filter = " << (class_filter ? to_string(*class_filter) : "none") << '\n';
  return os.str();
}

RoadMask DirectoryMaskProvider::load(const ImageRecord& record) {
  const fs::path path = dir_ / (record.image_id + ".png");
  return load_mask(path, record.width(), record.height());
}

void save_index_table(const std::vector<IndexRow>& rows, const fs::path& file) {
  std::ofstream out(file);
  if (!out) throw WriteError("cannot write " + file.string());
  out.precision(17);
  out << "image_id\ty_v\tconfidence\th\tbin\n";
  for (const auto& r : rows) {
    if (r.no_road) {
      out << r.image_id << "\tnan\tnoroad\tnan\t-1\n";
    } else {
      out << r.image_id << '\t' << r.y_v << '\t' << to_string(r.confidence) << '\t'
          << r.horizon_ratio << '\t' << r.bin << '\n';
    }
  }
  if (!out) throw WriteError("write failed: " + file.string());
}

std::vector<IndexRow> load_index_table(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw ManifestError("cannot open index table: " + file.string());
  std::string line;
  std::getline(in, line);  // header
  std::vector<IndexRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    IndexRow r;
    std::string y_v, conf, h;
    row >> r.image_id >> y_v >> conf >> h >> r.bin;
    if (!row) throw ManifestError("malformed index table line: " + line);
    if (conf == "noroad") {
      r.no_road = true;
    } else {
      r.y_v = std::stod(y_v);
      r.horizon_ratio = std::stod(h);
      r.confidence = conf == "fitted" ? FitConfidence::fitted : FitConfidence::fallback;
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

void build_geometry(const DatasetIndex& index, MaskProvider* masks,
                    const AugmentationConfig& config, PipelineArtifacts& art,
                    const PrebuiltArtifacts* prebuilt) {
  if (config.content_aware) {
    if (masks == nullptr) {
      throw ConfigError("content-aware augmentation requires a mask provider");
    }
    for (const ImageRecord& rec : index.records) {
      try {
        art.masks.emplace(rec.image_id, masks->load(rec));
      } catch (const Error& e) {
        art.image_errors.emplace(rec.image_id, e.what());
      }
    }
  }

  if (config.perspective_aware) {
    PerspectiveOptions popts;
    popts.min_road_pixels = config.min_road_pixels;

    if (prebuilt && prebuilt->index_rows) {
      art.rows = *prebuilt->index_rows;
      for (const IndexRow& row : art.rows) {
        if (row.no_road) {
          art.image_errors.emplace(row.image_id, "NoRoad");
          continue;
        }
        const ImageRecord* rec = index.find(row.image_id);
        if (rec == nullptr) continue;
        VanishingEstimate est{row.y_v, row.confidence, 0, 0};
        art.maps.emplace(row.image_id, make_perspective_map(est, rec->width(), rec->height()));
      }
    } else {
      for (const ImageRecord& rec : index.records) {
        const auto mask_it = art.masks.find(rec.image_id);
        IndexRow row;
        row.image_id = rec.image_id;
        if (mask_it == art.masks.end()) {
          row.no_road = true;
          art.rows.push_back(row);
          continue;
        }
        try {
          const VanishingEstimate est = estimate_vanishing_row(mask_it->second, popts);
          const PerspectiveMap map = make_perspective_map(est, rec.width(), rec.height());
          row.y_v = est.y_v;
          row.confidence = est.confidence;
          row.horizon_ratio = map.horizon_ratio();
          art.maps.emplace(rec.image_id, map);
        } catch (const NoRoad& e) {
          row.no_road = true;
          art.image_errors.emplace(rec.image_id, e.what());
        }
        art.rows.push_back(row);
      }
    }

    std::vector<double> ratios;
    ratios.reserve(art.maps.size());
    for (const ImageRecord& rec : index.records) {
      const auto it = art.maps.find(rec.image_id);
      if (it != art.maps.end()) ratios.push_back(it->second.horizon_ratio());
    }
    art.binning = build_pitch_bins(ratios, config.pitch_bins);
    for (IndexRow& row : art.rows) {
      if (row.no_road) continue;
      row.bin = assign_bin(row.horizon_ratio, art.binning);
      art.bin_by_image[row.image_id] = row.bin;
    }
  }
}

PipelineArtifacts build_artifacts(const DatasetIndex& index, MaskProvider* masks,
                                  const AugmentationConfig& config,
                                  const PrebuiltArtifacts* prebuilt) {
  config.validate();
  PipelineArtifacts art;
  art.binning.bin_count = 1;
  if (!config.inject) return art;

  build_geometry(index, masks, config, art, prebuilt);

  BankOptions bopts;
  bopts.min_scale = config.bank_min_scale;
  if (prebuilt && prebuilt->bank) {
    art.bank = *prebuilt->bank;
  } else if (config.perspective_aware) {
    art.bank = extract_bank(index, art.maps, art.binning, bopts, &art.bank_report);
  } else {
    art.bank = extract_bank_pooled(index, bopts, &art.bank_report);
  }

  HeatmapOptions hopts;
  hopts.grid = config.heatmap_grid;
  hopts.sigma = config.heatmap_sigma;
  if (prebuilt && prebuilt->heatmaps) {
    art.heatmaps = *prebuilt->heatmaps;
    if (config.perspective_aware &&
        static_cast<int>(art.heatmaps.size()) < art.binning.bin_count) {
      throw ConfigError("heatmap table has " + std::to_string(art.heatmaps.size()) +
                        " bins, binning needs " + std::to_string(art.binning.bin_count));
    }
  } else if (config.perspective_aware) {
    art.heatmaps = build_heatmaps(index, art.bin_by_image, art.binning.bin_count, hopts);
  } else if (config.content_aware) {
    // pooled location statistics, one heatmap
    std::unordered_map<std::string, int> all_zero;
    for (const ImageRecord& rec : index.records) all_zero.emplace(rec.image_id, 0);
    art.heatmaps = build_heatmaps(index, all_zero, 1, hopts);
  } else {
    // plain cut-and-paste places uniformly over the frame
    art.heatmaps = {PlacementHeatmap::uniform(hopts.grid, 0, hopts.sigma)};
  }
  return art;
}

ImageOutcome augment_image(const ImageRecord& record, const std::vector<Annotation>& existing,
                           const RoadMask* mask, const PerspectiveMap* map, int image_bin,
                           const DamageBank& bank, const PlacementHeatmap& heatmap,
                           const AugmentationConfig& config, Rng& rng, Image& out_pixels,
                           std::vector<Annotation>& out_annotations) {
  out_pixels = record.pixels;
  out_annotations = existing;

  ImageOutcome outcome;
  outcome.image_id = record.image_id;
  if (!config.inject || config.injections_per_image == 0) return outcome;

  if (config.content_aware && (mask == nullptr || mask->road_pixel_count == 0)) {
    outcome.passthrough = true;
    outcome.passthrough_reason = "EmptyRoadMask";
    return outcome;
  }
  if (config.perspective_aware && map == nullptr) {
    outcome.passthrough = true;
    outcome.passthrough_reason = "NoRoad";
    return outcome;
  }

  const RoadMask* clip_mask = config.content_aware ? mask : nullptr;
  PlacementSampler sampler(heatmap, clip_mask, record.width(), record.height(),
                           config.content_aware, config.heatmap_lambda);
  const RectI frame{0, 0, record.width(), record.height()};

  for (int k = 0; k < config.injections_per_image; ++k) {
    for (int attempt = 0; attempt < config.max_attempts_per_injection; ++attempt) {
      ++outcome.attempts;
      const InstanceDraw draw =
          config.perspective_aware
              ? sample_instance(bank, image_bin, rng, config.class_filter)
              : sample_instance_pooled(bank, rng, config.class_filter);
      const DamageInstance& inst = *draw.instance;
      const PlacementSample place = sampler.sample(rng);

      InjectionRecord rec;
      rec.instance_id = inst.instance_id;
      rec.class_id = inst.class_id;
      rec.target_bin = image_bin;
      rec.source_bin = draw.bin_used;
      rec.bin_fallback = draw.bin_fallback;
      rec.x = place.x;
      rec.y = place.y;
      rec.placement_source = place.source;

      try {
        WarpedPatch wp;
        if (config.perspective_aware) {
          const Quad dst = target_quad(place.x, place.y, inst.patch.width, inst.patch.height,
                                       inst.s_src, *map, config.scale_bounds);
          const Quad src = Quad::rect(inst.patch.width, inst.patch.height);
          const Homography h = solve_homography(src, dst);
          wp = warp_patch(inst.patch, h, frame);
          rec.warped = true;
          rec.scale_ratio = perspective_scale(*map, place.y) / inst.s_src;
        } else {
          wp = place_patch_unwarped(inst.patch, place.x, place.y, frame);
        }

        const BlendRegion region =
            clip_region(wp, record.width(), record.height(), clip_mask);
        const BoundingBox bbox = region.tight_bounds();
        if (bbox.area() < config.min_injected_area_px) {
          ++outcome.rejections[RejectReason::min_area];
          continue;
        }
        bool overlaps = false;
        for (const Annotation& a : out_annotations) {
          if (iou(bbox, a.bbox) > config.overlap_iou_max) {
            overlaps = true;
            break;
          }
        }
        if (overlaps) {
          ++outcome.rejections[RejectReason::overlap];
          continue;
        }

        if (config.blend_mode == BlendMode::alpha) {
          alpha_paste(out_pixels, wp, region);
        } else {
          poisson_blend(out_pixels, wp, region, config.blend_mode);
        }

        rec.bbox = bbox;
        rec.omega_count = region.count;
        outcome.injections.push_back(rec);
        ++outcome.accepted;
        out_annotations.push_back(
            Annotation{record.image_id, inst.class_id, bbox, Provenance::injected});
        break;
      } catch (const DegenerateQuad&) {
        ++outcome.rejections[RejectReason::degenerate_quad];
      } catch (const ScaleOutOfRange&) {
        ++outcome.rejections[RejectReason::scale_out_of_range];
      } catch (const NothingOnRoad&) {
        ++outcome.rejections[RejectReason::nothing_on_road];
      } catch (const SolverDiverged&) {
        ++outcome.rejections[RejectReason::solver_diverged];
      }
      // EmptyBank propagates: nothing to retry with
    }
  }
  return outcome;
}

namespace {

void write_placements(const AugmentationReport& report, const fs::path& file) {
  std::ofstream out(file);
  if (!out) throw WriteError("cannot write " + file.string());
  out << "image_id\tx\ty\tsource\tclass\tbin_used\n";
  for (const auto& img : report.per_image) {
    for (const auto& inj : img.injections) {
      out << img.image_id << '\t' << inj.x << '\t' << inj.y << '\t'
          << to_string(inj.placement_source) << '\t' << to_string(inj.class_id) << '\t'
          << inj.source_bin << '\n';
    }
  }
}

}  // namespace

int AugmentationReport::total_attempts() const {
  int n = 0;
  for (const auto& o : per_image) n += o.attempts;
  return n;
}

int AugmentationReport::total_accepted() const {
  int n = 0;
  for (const auto& o : per_image) n += o.accepted;
  return n;
}

int AugmentationReport::total_rejected() const { return total_attempts() - total_accepted(); }

std::map<RejectReason, int> AugmentationReport::rejection_totals() const {
  std::map<RejectReason, int> totals;
  for (const auto& o : per_image) {
    for (const auto& [reason, n] : o.rejections) totals[reason] += n;
  }
  return totals;
}

std::map<DamageClass, int> AugmentationReport::class_totals() const {
  std::map<DamageClass, int> totals;
  for (const auto& o : per_image) {
    for (const auto& inj : o.injections) totals[inj.class_id] += 1;
  }
  return totals;
}

std::map<int, int> AugmentationReport::bin_totals() const {
  std::map<int, int> totals;
  for (const auto& o : per_image) {
    for (const auto& inj : o.injections) totals[inj.source_bin] += 1;
  }
  return totals;
}

int AugmentationReport::bin_fallbacks() const {
  int n = 0;
  for (const auto& o : per_image) {
    for (const auto& inj : o.injections) n += inj.bin_fallback ? 1 : 0;
  }
  return n;
}

int AugmentationReport::placement_fallbacks() const {
  int n = 0;
  for (const auto& o : per_image) {
    for (const auto& inj : o.injections) {
      n += inj.placement_source == PlacementSource::uniform_fallback ? 1 : 0;
    }
  }
  return n;
}

std::size_t AugmentationReport::passthrough_count() const {
  std::size_t n = 0;
  for (const auto& o : per_image) n += o.passthrough ? 1 : 0;
  return n;
}

std::string AugmentationReport::to_text(const AugmentationConfig& config) const {
  std::ostringstream os;
  os << "[config]\n" << config.to_text();
  os << "[totals]\n";
  os << "images = " << images() << '\n';
  os << "passthrough = " << passthrough_count() << '\n';
  os << "attempted = " << total_attempts() << '\n';
  os << "accepted = " << total_accepted() << '\n';
  os << "rejected = " << total_rejected() << '\n';
  os << "bin_fallbacks = " << bin_fallbacks() << '\n';
  os << "placement_fallbacks = " << placement_fallbacks() << '\n';
  os << "[rejections]\n";
  for (const auto& [reason, n] : rejection_totals()) {
    os << to_string(reason) << " = " << n << '\n';
  }
  os << "[injections_by_class]\n";
  for (const auto& [cls, n] : class_totals()) os << to_string(cls) << " = " << n << '\n';
  os << "[injections_by_bin]\n";
  for (const auto& [bin, n] : bin_totals()) os << bin << " = " << n << '\n';
  os << "[images]\n";
  for (const auto& o : per_image) {
    os << o.image_id << ": accepted " << o.accepted << "/" << o.attempts << " attempts";
    if (o.passthrough) os << " (passthrough: " << o.passthrough_reason << ")";
    os << '\n';
  }
  return os.str();
}

AugmentationReport augment_dataset(const DatasetIndex& index, MaskProvider* masks,
                                   const AugmentationConfig& config, const fs::path& out_dir,
                                   int jobs, const PrebuiltArtifacts* prebuilt) {
  config.validate();
  const PipelineArtifacts art = build_artifacts(index, masks, config, prebuilt);

  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw WriteError("cannot create " + out_dir.string() + ": " + ec.message());

  const std::size_t n = index.records.size();
  std::vector<WrittenImage> written(n);
  std::vector<ImageOutcome> outcomes(n);
  const PlacementHeatmap uniform_heatmap = PlacementHeatmap::uniform(config.heatmap_grid);

  parallel_for(n, jobs, [&](std::size_t i) {
    const ImageRecord& rec = index.records[i];
    Rng rng(stream_seed(config.seed, rec.image_id));

    const auto mask_it = art.masks.find(rec.image_id);
    const RoadMask* mask = mask_it != art.masks.end() ? &mask_it->second : nullptr;
    const auto map_it = art.maps.find(rec.image_id);
    const PerspectiveMap* map = map_it != art.maps.end() ? &map_it->second : nullptr;
    const auto bin_it = art.bin_by_image.find(rec.image_id);
    const int bin = bin_it != art.bin_by_image.end() ? bin_it->second : 0;
    const PlacementHeatmap& heatmap =
        art.heatmaps.empty()
            ? uniform_heatmap
            : art.heatmaps[clamp_int(bin, 0, static_cast<int>(art.heatmaps.size()) - 1)];

    Image out_pixels;
    std::vector<Annotation> out_annotations;
    ImageOutcome outcome = augment_image(rec, index.annotations[i], mask, map, bin, art.bank,
                                         heatmap, config, rng, out_pixels, out_annotations);
    if (config.inject && config.content_aware) {
      const auto err_it = art.image_errors.find(rec.image_id);
      if (err_it != art.image_errors.end()) {
        outcome.passthrough = true;
        outcome.passthrough_reason = err_it->second;
      }
    }

    ImageRecord out_rec;
    out_rec.image_id = rec.image_id;
    out_rec.pixels = std::move(out_pixels);
    written[i] = write_augmented(out_rec, std::move(out_annotations), out_dir);
    outcomes[i] = std::move(outcome);
  });

  write_annotation_document(written, out_dir);

  AugmentationReport report;
  report.per_image = std::move(outcomes);
  write_placements(report, out_dir / "placements.tsv");
  {
    const fs::path report_path = out_dir / "report.txt";
    std::ofstream out(report_path);
    if (!out) throw WriteError("cannot write " + report_path.string());
    out << report.to_text(config);
  }
  if (!art.rows.empty()) save_index_table(art.rows, out_dir / "index.tsv");
  return report;
}

}  // namespace roadaug
