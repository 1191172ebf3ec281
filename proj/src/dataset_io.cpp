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

#include "roadaug/dataset_io.hpp"

#include <algorithm>
#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>
#include <fstream>
#include <map>
#include <nlohmann/json.hpp>
#include <sstream>

#include "roadaug/errors.hpp"
#include "roadaug/image_io.hpp"
#include "roadaug/parallel.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace roadaug {

namespace {

bool has_image_extension(const fs::path& p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext == ".png" || ext == ".jpg" || ext == ".jpeg";
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

// Raw annotation before validation against its image.
struct RawAnnotation {
  std::string image_id;
  std::string class_name;
  BoundingBox bbox;
  Provenance provenance = Provenance::original;
  std::string origin;  // file it came from, for diagnostics
};

std::vector<RawAnnotation> read_voc_dir(const fs::path& dir) {
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".xml") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());

  std::vector<RawAnnotation> raw;
  for (const auto& file : files) {
    boost::property_tree::ptree pt;
    try {
      boost::property_tree::read_xml(file.string(), pt);
    } catch (const std::exception& e) {
      throw ManifestError("malformed VOC XML " + file.string() + ": " + e.what());
    }
    const auto ann = pt.get_child_optional("annotation");
    if (!ann) throw ManifestError("missing <annotation> root in " + file.string());
    const std::string image_id = file.stem().string();
    for (const auto& [key, node] : *ann) {
      if (key != "object") continue;
      RawAnnotation a;
      a.image_id = image_id;
      a.origin = file.filename().string();
      try {
        a.class_name = trim(node.get<std::string>("name"));
        const auto& bb = node.get_child("bndbox");
        a.bbox = BoundingBox{bb.get<double>("xmin"), bb.get<double>("ymin"),
                             bb.get<double>("xmax"), bb.get<double>("ymax")};
      } catch (const std::exception& e) {
        throw ManifestError("malformed object in " + file.string() + ": " + e.what());
      }
      raw.push_back(std::move(a));
    }
  }
  return raw;
}

std::vector<RawAnnotation> read_coco_file(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw ManifestError("cannot open annotation document: " + file.string());
  json doc;
  try {
    in >> doc;
  } catch (const std::exception& e) {
    throw ManifestError("malformed COCO document " + file.string() + ": " + e.what());
  }

  std::map<std::int64_t, std::string> categories;
  for (const auto& c : doc.value("categories", json::array())) {
    categories[c.at("id").get<std::int64_t>()] = c.at("name").get<std::string>();
  }
  std::map<std::int64_t, std::string> image_stems;
  for (const auto& im : doc.value("images", json::array())) {
    const std::string file_name = im.at("file_name").get<std::string>();
    image_stems[im.at("id").get<std::int64_t>()] = fs::path(file_name).stem().string();
  }

  std::vector<RawAnnotation> raw;
  for (const auto& a : doc.value("annotations", json::array())) {
    RawAnnotation r;
    r.origin = file.filename().string();
    const auto image_it = image_stems.find(a.at("image_id").get<std::int64_t>());
    r.image_id = image_it == image_stems.end() ? std::string("#" + a.at("image_id").dump())
                                               : image_it->second;
    const auto cat_it = categories.find(a.at("category_id").get<std::int64_t>());
    r.class_name = cat_it == categories.end() ? "?" : cat_it->second;
    const auto& bb = a.at("bbox");
    const double x = bb.at(0).get<double>();
    const double y = bb.at(1).get<double>();
    r.bbox = BoundingBox{x, y, x + bb.at(2).get<double>(), y + bb.at(3).get<double>()};
    if (a.contains("provenance") && a["provenance"] == "injected") {
      r.provenance = Provenance::injected;
    }
    raw.push_back(std::move(r));
  }
  return raw;
}

}  // namespace

Manifest resolve_manifest(const fs::path& manifest_path) {
  std::error_code ec;
  if (!fs::exists(manifest_path, ec)) {
    throw ManifestError("manifest not found: " + manifest_path.string());
  }

  Manifest m;
  if (fs::is_directory(manifest_path)) {
    m.images_dir = manifest_path / "images";
    const fs::path voc = manifest_path / "annotations";
    const fs::path coco = manifest_path / "annotations.json";
    if (fs::is_directory(voc)) {
      m.annotations = voc;
    } else if (fs::is_regular_file(coco)) {
      m.annotations = coco;
    } else {
      throw ManifestError("no annotation source (annotations/ or annotations.json) under " +
                          manifest_path.string());
    }
    const fs::path masks = manifest_path / "masks";
    if (fs::is_directory(masks)) m.masks_dir = masks;
  } else {
    // key-value manifest file; keys may carry a "dataset." section prefix
    std::ifstream in(manifest_path);
    if (!in) throw ManifestError("cannot open manifest: " + manifest_path.string());
    const fs::path base = manifest_path.parent_path();
    std::string line;
    while (std::getline(in, line)) {
      line = trim(line);
      if (line.empty() || line[0] == '#' || line[0] == ';' || line[0] == '[') continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos) {
        throw ManifestError("manifest line without '=': " + line);
      }
      std::string key = trim(line.substr(0, eq));
      const std::string value = trim(line.substr(eq + 1));
      if (key.rfind("dataset.", 0) == 0) key = key.substr(8);
      const fs::path p = fs::path(value).is_absolute() ? fs::path(value) : base / value;
      if (key == "images") {
        m.images_dir = p;
      } else if (key == "annotations") {
        m.annotations = p;
      } else if (key == "masks") {
        m.masks_dir = p;
      } else {
        throw ManifestError("unknown manifest key: " + key);
      }
    }
    if (m.images_dir.empty() || m.annotations.empty()) {
      throw ManifestError("manifest must name 'images' and 'annotations': " +
                          manifest_path.string());
    }
  }

  if (!fs::is_directory(m.images_dir)) {
    throw ManifestError("image directory missing: " + m.images_dir.string());
  }
  return m;
}

DatasetIndex load_dataset(const fs::path& manifest_path, LoadReport* report,
                          const LoadOptions& opts) {
  const Manifest manifest = resolve_manifest(manifest_path);
  LoadReport local;
  LoadReport& rep = report ? *report : local;

  std::vector<fs::path> image_files;
  for (const auto& entry : fs::directory_iterator(manifest.images_dir)) {
    if (entry.is_regular_file() && has_image_extension(entry.path())) {
      image_files.push_back(entry.path());
    }
  }
  if (image_files.empty()) {
    throw ManifestError("no images under " + manifest.images_dir.string());
  }
  std::sort(image_files.begin(), image_files.end());

  {
    std::map<std::string, int> stems;
    for (const auto& f : image_files) {
      if (++stems[f.stem().string()] > 1) {
        throw ManifestError("image_id collision on stem '" + f.stem().string() + "'");
      }
    }
  }

  DatasetIndex index;
  index.records.resize(image_files.size());
  parallel_for(image_files.size(), opts.jobs, [&](std::size_t i) {
    ImageRecord rec;
    rec.image_id = image_files[i].stem().string();
    rec.source_path = image_files[i];
    rec.pixels = load_rgb(image_files[i]);
    if (manifest.masks_dir) {
      const fs::path mask = *manifest.masks_dir / (rec.image_id + ".png");
      if (fs::exists(mask)) rec.mask_path = mask;
    }
    index.records[i] = std::move(rec);
  });
  std::sort(index.records.begin(), index.records.end(),
            [](const ImageRecord& a, const ImageRecord& b) { return a.image_id < b.image_id; });
  index.annotations.resize(index.records.size());
  index.rebuild_lookup();
  rep.images = index.records.size();

  std::vector<RawAnnotation> raw;
  if (fs::is_directory(manifest.annotations)) {
    raw = read_voc_dir(manifest.annotations);
  } else if (manifest.annotations.extension() == ".json") {
    raw = read_coco_file(manifest.annotations);
  } else {
    throw ManifestError("unsupported annotation source: " + manifest.annotations.string());
  }

  std::size_t dangling_count = 0;
  for (const auto& r : raw) {
    const auto rec_it = index.record_index.find(r.image_id);
    if (rec_it == index.record_index.end()) {
      rep.dangling.push_back(r.origin + ": no image for id '" + r.image_id + "'");
      ++dangling_count;
      continue;
    }
    const auto cls = damage_class_from_string(r.class_name);
    if (!cls) {
      if (opts.allow_unknown_classes) {
        ++rep.unknown_class_dropped;
        continue;
      }
      throw UnknownClass("unknown class label '" + r.class_name + "' in " + r.origin);
    }
    const ImageRecord& rec = index.records[rec_it->second];
    if (!r.bbox.valid()) {
      ++rep.dropped_outside;
      continue;
    }
    const auto clipped = clip_box(r.bbox, rec.width(), rec.height());
    if (!clipped) {
      ++rep.dropped_outside;
      continue;
    }
    if (clipped->x_min != r.bbox.x_min || clipped->y_min != r.bbox.y_min ||
        clipped->x_max != r.bbox.x_max || clipped->y_max != r.bbox.y_max) {
      ++rep.clipped;
    }
    Annotation a;
    a.image_id = r.image_id;
    a.class_id = *cls;
    a.bbox = *clipped;
    a.provenance = r.provenance;
    index.annotations[rec_it->second].push_back(std::move(a));
    ++rep.annotations_kept;
  }

  if (!raw.empty() && dangling_count == raw.size()) {
    throw ManifestError("all " + std::to_string(raw.size()) +
                        " annotations reference missing images");
  }
  return index;
}

RoadMask load_mask(const fs::path& path, int expected_width, int expected_height) {
  GrayImage gray;
  try {
    gray = load_gray(path);
  } catch (const ImageReadError& e) {
    throw MaskReadError(e.what());
  }
  if (gray.width != expected_width || gray.height != expected_height) {
    throw MaskDimMismatch("mask " + path.string() + " is " + std::to_string(gray.width) + "x" +
                          std::to_string(gray.height) + ", expected " +
                          std::to_string(expected_width) + "x" + std::to_string(expected_height));
  }
  return RoadMask::from_gray(gray);
}

WrittenImage write_augmented(const ImageRecord& record, std::vector<Annotation> annotations,
                             const fs::path& out_dir) {
  const fs::path images_dir = out_dir / "images";
  std::error_code ec;
  fs::create_directories(images_dir, ec);
  if (ec) throw WriteError("cannot create " + images_dir.string() + ": " + ec.message());

  WrittenImage out;
  out.image_id = record.image_id;
  out.width = record.width();
  out.height = record.height();
  out.image_path = images_dir / (record.image_id + ".png");
  save_png(out.image_path, record.pixels);
  out.annotations = std::move(annotations);
  return out;
}

fs::path write_annotation_document(std::vector<WrittenImage> images, const fs::path& out_dir) {
  std::sort(images.begin(), images.end(),
            [](const WrittenImage& a, const WrittenImage& b) { return a.image_id < b.image_id; });

  json doc;
  doc["categories"] = json::array();
  for (std::size_t i = 0; i < kAllClasses.size(); ++i) {
    doc["categories"].push_back(
        {{"id", i + 1}, {"name", to_string(kAllClasses[i])}, {"supercategory", "damage"}});
  }
  doc["images"] = json::array();
  doc["annotations"] = json::array();
  std::int64_t ann_id = 1;
  for (std::size_t i = 0; i < images.size(); ++i) {
    const auto& im = images[i];
    const std::int64_t image_id = static_cast<std::int64_t>(i) + 1;
    doc["images"].push_back({{"id", image_id},
                             {"file_name", im.image_path.filename().string()},
                             {"width", im.width},
                             {"height", im.height}});
    for (const auto& a : im.annotations) {
      doc["annotations"].push_back(
          {{"id", ann_id++},
           {"image_id", image_id},
           {"category_id", static_cast<int>(a.class_id) + 1},
           {"bbox", {a.bbox.x_min, a.bbox.y_min, a.bbox.width(), a.bbox.height()}},
           {"area", a.bbox.area()},
           {"iscrowd", 0},
           {"provenance", a.provenance == Provenance::injected ? "injected" : "original"}});
    }
  }

  const fs::path out_path = out_dir / "annotations.json";
  std::ofstream out(out_path);
  if (!out) throw WriteError("cannot write " + out_path.string());
  out << doc.dump(2) << '\n';
  if (!out) throw WriteError("write failed: " + out_path.string());
  return out_path;
}

std::string LoadReport::to_text() const {
  std::ostringstream os;
  os << "images: " << images << '\n'
     << "annotations_kept: " << annotations_kept << '\n'
     << "clipped: " << clipped << '\n'
     << "dropped_outside: " << dropped_outside << '\n'
     << "unknown_class_dropped: " << unknown_class_dropped << '\n'
     << "dangling: " << dangling.size() << '\n';
  for (const auto& d : dangling) os << "  " << d << '\n';
  return os.str();
}

}  // namespace roadaug
