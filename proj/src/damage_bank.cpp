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

#include "roadaug/damage_bank.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "roadaug/errors.hpp"
#include "roadaug/image_io.hpp"

namespace fs = std::filesystem;

namespace roadaug {

namespace {

/// Integer crop window of a continuous box, clamped to the image.
RectI crop_window(const BoundingBox& box, int width, int height) {
  const int x0 = clamp_int(static_cast<int>(std::floor(box.x_min)), 0, width);
  const int y0 = clamp_int(static_cast<int>(std::floor(box.y_min)), 0, height);
  const int x1 = clamp_int(static_cast<int>(std::ceil(box.x_max)), 0, width);
  const int y1 = clamp_int(static_cast<int>(std::ceil(box.y_max)), 0, height);
  return RectI{x0, y0, x1 - x0, y1 - y0};
}

Image crop(const Image& src, const RectI& r) {
  Image out(r.w, r.h);
  for (int y = 0; y < r.h; ++y) {
    for (int x = 0; x < r.w; ++x) {
      for (int c = 0; c < 3; ++c) out.at(x, y, c) = src.at(r.x + x, r.y + y, c);
    }
  }
  return out;
}

void append_instance(DamageBank& bank, const ImageRecord& rec, const Annotation& ann,
                     std::size_t ordinal, double s_src, int bin) {
  DamageInstance inst;
  inst.instance_id = rec.image_id + "#" + std::to_string(ordinal);
  inst.class_id = ann.class_id;
  inst.source_image_id = rec.image_id;
  inst.source_bbox = ann.bbox;
  inst.patch = crop(rec.pixels, crop_window(ann.bbox, rec.width(), rec.height()));
  inst.s_src = s_src;
  inst.bin = bin;
  bank.instances.push_back(std::move(inst));
}

}  // namespace

void DamageBank::rebuild_groups() {
  by_bin.assign(bin_count, {});
  by_bin_class.assign(bin_count, {});
  for (std::size_t i = 0; i < instances.size(); ++i) {
    const int b = clamp_int(instances[i].bin, 0, bin_count - 1);
    by_bin[b].push_back(i);
    by_bin_class[b][static_cast<int>(instances[i].class_id)].push_back(i);
  }
}

DamageBank extract_bank(const DatasetIndex& index,
                        const std::unordered_map<std::string, PerspectiveMap>& maps,
                        const PitchBinning& binning, const BankOptions& opts,
                        BankBuildReport* report) {
  BankBuildReport local;
  BankBuildReport& rep = report ? *report : local;

  DamageBank bank;
  bank.bin_count = binning.bin_count;
  bank.bin_edges = binning.edges;
  bank.min_scale = opts.min_scale;
  for (std::size_t r = 0; r < index.records.size(); ++r) {
    const ImageRecord& rec = index.records[r];
    const auto map_it = maps.find(rec.image_id);
    for (std::size_t k = 0; k < index.annotations[r].size(); ++k) {
      const Annotation& ann = index.annotations[r][k];
      if (map_it == maps.end()) {
        ++rep.skipped_no_map;
        continue;
      }
      const RectI w = crop_window(ann.bbox, rec.width(), rec.height());
      if (w.w < opts.min_patch_px || w.h < opts.min_patch_px) {
        ++rep.skipped_too_small;
        continue;
      }
      const double s_src = perspective_scale(map_it->second, ann.bbox.bottom_center_y());
      if (s_src <= opts.min_scale) {
        ++rep.skipped_near_horizon;
        continue;
      }
      const int bin = assign_bin(map_it->second.horizon_ratio(), binning);
      append_instance(bank, rec, ann, k, s_src, bin);
      ++rep.extracted;
    }
  }
  bank.rebuild_groups();
  return bank;
}

DamageBank extract_bank_pooled(const DatasetIndex& index, const BankOptions& opts,
                               BankBuildReport* report) {
  BankBuildReport local;
  BankBuildReport& rep = report ? *report : local;

  DamageBank bank;
  bank.bin_count = 1;
  bank.min_scale = opts.min_scale;
  for (std::size_t r = 0; r < index.records.size(); ++r) {
    const ImageRecord& rec = index.records[r];
    for (std::size_t k = 0; k < index.annotations[r].size(); ++k) {
      const Annotation& ann = index.annotations[r][k];
      const RectI w = crop_window(ann.bbox, rec.width(), rec.height());
      if (w.w < opts.min_patch_px || w.h < opts.min_patch_px) {
        ++rep.skipped_too_small;
        continue;
      }
      append_instance(bank, rec, ann, k, 1.0, 0);
      ++rep.extracted;
    }
  }
  bank.rebuild_groups();
  return bank;
}

namespace {

const std::vector<std::size_t>& group_of(const DamageBank& bank, int bin,
                                         std::optional<DamageClass> class_filter) {
  if (class_filter) return bank.by_bin_class[bin][static_cast<int>(*class_filter)];
  return bank.by_bin[bin];
}

}  // namespace

InstanceDraw sample_instance(const DamageBank& bank, int bin, Rng& rng,
                             std::optional<DamageClass> class_filter) {
  if (bank.empty()) throw EmptyBank("damage bank is empty");
  bin = clamp_int(bin, 0, bank.bin_count - 1);

  int chosen = -1;
  // nearest nonempty bin by |distance|, ties toward the smaller index
  for (int d = 0; d < bank.bin_count && chosen < 0; ++d) {
    for (const int cand : {bin - d, bin + d}) {
      if (cand < 0 || cand >= bank.bin_count) continue;
      if (!group_of(bank, cand, class_filter).empty()) {
        chosen = cand;
        break;
      }
    }
  }
  if (chosen < 0) {
    throw EmptyBank(class_filter
                        ? std::string("no instances of class ") + to_string(*class_filter)
                        : std::string("no instances in any bin"));
  }

  const auto& group = group_of(bank, chosen, class_filter);
  const std::size_t pick = group[rng.uniform_index(group.size())];
  return InstanceDraw{&bank.instances[pick], chosen, chosen != bin};
}

InstanceDraw sample_instance_pooled(const DamageBank& bank, Rng& rng,
                                    std::optional<DamageClass> class_filter) {
  if (bank.empty()) throw EmptyBank("damage bank is empty");
  std::vector<std::size_t> pool;
  if (class_filter) {
    for (int b = 0; b < bank.bin_count; ++b) {
      const auto& g = bank.by_bin_class[b][static_cast<int>(*class_filter)];
      pool.insert(pool.end(), g.begin(), g.end());
    }
    if (pool.empty()) {
      throw EmptyBank(std::string("no instances of class ") + to_string(*class_filter));
    }
    const std::size_t pick = pool[rng.uniform_index(pool.size())];
    return InstanceDraw{&bank.instances[pick], bank.instances[pick].bin, false};
  }
  const std::size_t pick = rng.uniform_index(bank.instances.size());
  return InstanceDraw{&bank.instances[pick], bank.instances[pick].bin, false};
}

void save_bank(const DamageBank& bank, const fs::path& dir) {
  const fs::path patches = dir / "patches";
  std::error_code ec;
  fs::create_directories(patches, ec);
  if (ec) throw WriteError("cannot create " + patches.string() + ": " + ec.message());

  const fs::path manifest_path = dir / "manifest.tsv";
  std::ofstream out(manifest_path);
  if (!out) throw WriteError("cannot write " + manifest_path.string());
  out << "instance_id\tclass\tbin\ts_src\tsource_image\tx_min\ty_min\tx_max\ty_max\n";
  out.precision(17);
  for (const auto& inst : bank.instances) {
    const fs::path patch_path = patches / (inst.instance_id + ".png");
    save_png(patch_path, inst.patch);
    out << inst.instance_id << '\t' << to_string(inst.class_id) << '\t' << inst.bin << '\t'
        << inst.s_src << '\t' << inst.source_image_id << '\t' << inst.source_bbox.x_min << '\t'
        << inst.source_bbox.y_min << '\t' << inst.source_bbox.x_max << '\t'
        << inst.source_bbox.y_max << '\n';
  }
  if (!out) throw WriteError("write failed: " + manifest_path.string());

  std::ofstream meta(dir / "bank.meta");
  meta.precision(17);
  meta << "bin_count = " << bank.bin_count << '\n';
  meta << "min_scale = " << bank.min_scale << '\n';
  meta << "bin_edges =";
  for (double e : bank.bin_edges) meta << ' ' << e;
  meta << '\n';
}

DamageBank load_bank(const fs::path& dir) {
  DamageBank bank;
  {
    std::ifstream meta(dir / "bank.meta");
    if (!meta) throw ManifestError("missing bank.meta under " + dir.string());
    std::string line;
    while (std::getline(meta, line)) {
      const auto eq = line.find('=');
      if (eq == std::string::npos) continue;
      std::istringstream val(line.substr(eq + 1));
      std::string key = line.substr(0, eq);
      key.erase(key.find_last_not_of(" \t") + 1);
      if (key == "bin_count") {
        val >> bank.bin_count;
      } else if (key == "min_scale") {
        val >> bank.min_scale;
      } else if (key == "bin_edges") {
        double e;
        while (val >> e) bank.bin_edges.push_back(e);
      }
    }
  }
  std::ifstream in(dir / "manifest.tsv");
  if (!in) throw ManifestError("missing manifest.tsv under " + dir.string());
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    DamageInstance inst;
    std::string cls;
    row >> inst.instance_id >> cls >> inst.bin >> inst.s_src >> inst.source_image_id >>
        inst.source_bbox.x_min >> inst.source_bbox.y_min >> inst.source_bbox.x_max >>
        inst.source_bbox.y_max;
    if (!row) throw ManifestError("malformed bank manifest line: " + line);
    const auto parsed = damage_class_from_string(cls);
    if (!parsed) throw UnknownClass("unknown class in bank manifest: " + cls);
    inst.class_id = *parsed;
    inst.patch = load_rgb(dir / "patches" / (inst.instance_id + ".png"));
    bank.instances.push_back(std::move(inst));
  }
  bank.bin_count = std::max(bank.bin_count, 1);
  bank.rebuild_groups();
  return bank;
}

}  // namespace roadaug
