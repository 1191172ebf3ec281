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

#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "roadaug/dataset_io.hpp"
#include "roadaug/errors.hpp"
#include "roadaug/image_io.hpp"
#include "support/fixtures.hpp"

namespace fs = std::filesystem;
using namespace roadaug;
using roadaug::testing::make_temp_dir;
using roadaug::testing::write_voc_xml;

namespace {

fs::path write_blank_image(const fs::path& dir, const std::string& stem, int w, int h) {
  fs::create_directories(dir);
  Image img(w, h, 128);
  const fs::path p = dir / (stem + ".png");
  save_png(p, img);
  return p;
}

}  // namespace

TEST_CASE("minimal VOC fixture loads one annotation") {
  const fs::path root = make_temp_dir("voc_minimal");
  write_blank_image(root / "images", "a", 640, 640);
  write_voc_xml(root / "annotations", "a", 640, 640,
                {{"D00", BoundingBox{10, 20, 110, 220}}});

  LoadReport report;
  const DatasetIndex index = load_dataset(root, &report);
  REQUIRE(index.records.size() == 1);
  REQUIRE(index.annotations[0].size() == 1);
  const Annotation& a = index.annotations[0][0];
  CHECK(a.class_id == DamageClass::D00);
  CHECK(a.bbox.x_min == doctest::Approx(10));
  CHECK(a.bbox.y_min == doctest::Approx(20));
  CHECK(a.bbox.x_max == doctest::Approx(110));
  CHECK(a.bbox.y_max == doctest::Approx(220));
  CHECK(a.provenance == Provenance::original);
  CHECK(report.clipped == 0);
}

TEST_CASE("partially outside boxes are clipped, fully outside dropped") {
  const fs::path root = make_temp_dir("voc_clip");
  write_blank_image(root / "images", "a", 640, 640);
  write_voc_xml(root / "annotations", "a", 640, 640,
                {{"D10", BoundingBox{-5, 10, 50, 60}},
                 {"D20", BoundingBox{-100, -100, -10, -10}}});

  LoadReport report;
  const DatasetIndex index = load_dataset(root, &report);
  REQUIRE(index.annotations[0].size() == 1);
  CHECK(index.annotations[0][0].bbox.x_min == doctest::Approx(0.0));
  CHECK(index.annotations[0][0].bbox.y_min == doctest::Approx(10.0));
  CHECK(report.clipped == 1);
  CHECK(report.dropped_outside == 1);
}

TEST_CASE("empty dataset root raises ManifestError") {
  const fs::path root = make_temp_dir("empty_root");
  CHECK_THROWS_AS(load_dataset(root), ManifestError);
  fs::create_directories(root / "images");
  CHECK_THROWS_AS(load_dataset(root), ManifestError);  // still no annotation source
}

TEST_CASE("missing manifest raises ManifestError") {
  CHECK_THROWS_AS(load_dataset("/nonexistent/path/xyz"), ManifestError);
}

TEST_CASE("unknown class label raises UnknownClass unless allowed") {
  const fs::path root = make_temp_dir("voc_unknown");
  write_blank_image(root / "images", "a", 64, 64);
  write_voc_xml(root / "annotations", "a", 64, 64, {{"D99", BoundingBox{1, 1, 10, 10}}});

  CHECK_THROWS_AS(load_dataset(root), UnknownClass);

  LoadOptions opts;
  opts.allow_unknown_classes = true;
  LoadReport report;
  const DatasetIndex index = load_dataset(root, &report, opts);
  CHECK(index.annotation_count() == 0);
  CHECK(report.unknown_class_dropped == 1);
}

TEST_CASE("annotations for missing images are collected as dangling") {
  const fs::path root = make_temp_dir("voc_dangling");
  write_blank_image(root / "images", "a", 64, 64);
  write_voc_xml(root / "annotations", "a", 64, 64, {{"D00", BoundingBox{1, 1, 9, 9}}});
  write_voc_xml(root / "annotations", "ghost", 64, 64, {{"D00", BoundingBox{1, 1, 9, 9}}});

  LoadReport report;
  const DatasetIndex index = load_dataset(root, &report);
  CHECK(index.annotation_count() == 1);
  REQUIRE(report.dangling.size() == 1);
  CHECK(report.dangling[0].find("ghost") != std::string::npos);
}

TEST_CASE("all annotations dangling is fatal") {
  const fs::path root = make_temp_dir("voc_all_dangling");
  write_blank_image(root / "images", "a", 64, 64);
  write_voc_xml(root / "annotations", "ghost", 64, 64, {{"D00", BoundingBox{1, 1, 9, 9}}});
  CHECK_THROWS_AS(load_dataset(root), ManifestError);
}

TEST_CASE("mask loading applies the >127 threshold and checks dims") {
  const fs::path dir = make_temp_dir("masks");
  GrayImage all255(4, 4, 255);
  save_gray_png(dir / "all255.png", all255);
  GrayImage all0(4, 4, 0);
  save_gray_png(dir / "all0.png", all0);
  GrayImage mid(4, 4, 127);
  save_gray_png(dir / "mid.png", mid);

  CHECK(load_mask(dir / "all255.png", 4, 4).road_pixel_count == 16);
  CHECK(load_mask(dir / "all0.png", 4, 4).road_pixel_count == 0);
  CHECK(load_mask(dir / "mid.png", 4, 4).road_pixel_count == 0);  // 127 is not road
  CHECK_THROWS_AS(load_mask(dir / "all255.png", 8, 8), MaskDimMismatch);
  CHECK_THROWS_AS(load_mask(dir / "missing.png", 4, 4), MaskReadError);
}

TEST_CASE("write then load round-trips boxes, labels and dims") {
  const fs::path out = make_temp_dir("roundtrip_out");
  ImageRecord rec;
  rec.image_id = "sample";
  rec.pixels = Image(96, 64, 200);
  std::vector<Annotation> anns{
      {"sample", DamageClass::D20, BoundingBox{4.5, 8.25, 40.0, 30.0}, Provenance::original},
      {"sample", DamageClass::D40, BoundingBox{50, 40, 90, 60}, Provenance::injected},
  };

  const WrittenImage written = write_augmented(rec, anns, out);
  write_annotation_document({written}, out);

  const DatasetIndex loaded = load_dataset(out);
  REQUIRE(loaded.records.size() == 1);
  CHECK(loaded.records[0].width() == 96);
  CHECK(loaded.records[0].height() == 64);
  REQUIRE(loaded.annotations[0].size() == 2);
  CHECK(loaded.annotations[0][0].class_id == DamageClass::D20);
  CHECK(loaded.annotations[0][0].bbox.x_min == doctest::Approx(4.5));
  CHECK(loaded.annotations[0][0].bbox.y_max == doctest::Approx(30.0));
  CHECK(loaded.annotations[0][0].provenance == Provenance::original);
  CHECK(loaded.annotations[0][1].provenance == Provenance::injected);

  // a second write of the loaded index produces an identical document
  const WrittenImage again = write_augmented(loaded.records[0], loaded.annotations[0], out);
  write_annotation_document({again}, out);
  const DatasetIndex reloaded = load_dataset(out);
  REQUIRE(reloaded.annotations[0].size() == 2);
  for (int i = 0; i < 2; ++i) {
    CHECK(reloaded.annotations[0][i].bbox.x_min ==
          doctest::Approx(loaded.annotations[0][i].bbox.x_min));
    CHECK(reloaded.annotations[0][i].class_id == loaded.annotations[0][i].class_id);
  }
}

TEST_CASE("record with zero annotations writes an image and no entries") {
  const fs::path out = make_temp_dir("zero_ann");
  ImageRecord rec;
  rec.image_id = "empty";
  rec.pixels = Image(32, 32, 10);
  const WrittenImage written = write_augmented(rec, {}, out);
  CHECK(fs::exists(written.image_path));
  write_annotation_document({written}, out);
  const DatasetIndex loaded = load_dataset(out);
  CHECK(loaded.annotation_count() == 0);
}

TEST_CASE("unwritable directory raises WriteError") {
  ImageRecord rec;
  rec.image_id = "x";
  rec.pixels = Image(8, 8, 0);
  CHECK_THROWS_AS(write_augmented(rec, {}, "/proc/not_writable_dir"), WriteError);
}

TEST_CASE("loading is independent of traversal order and ids are sorted") {
  const fs::path root = make_temp_dir("ordering");
  // written out of order on purpose
  write_blank_image(root / "images", "zeta", 32, 32);
  write_blank_image(root / "images", "alpha", 32, 32);
  write_blank_image(root / "images", "mid", 32, 32);
  write_voc_xml(root / "annotations", "alpha", 32, 32, {{"D00", BoundingBox{1, 1, 8, 8}}});

  const DatasetIndex a = load_dataset(root);
  const DatasetIndex b = load_dataset(root);
  REQUIRE(a.records.size() == 3);
  CHECK(a.records[0].image_id == "alpha");
  CHECK(a.records[1].image_id == "mid");
  CHECK(a.records[2].image_id == "zeta");
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    CHECK(a.records[i].image_id == b.records[i].image_id);
    CHECK(a.annotations[i].size() == b.annotations[i].size());
  }
}

TEST_CASE("COCO-style input loads through the same index") {
  const fs::path root = make_temp_dir("coco_in");
  write_blank_image(root / "images", "c1", 64, 48);
  std::ofstream coco(root / "annotations.json");
  coco << R"({
    "categories": [{"id": 7, "name": "D40", "supercategory": "damage"}],
    "images": [{"id": 3, "file_name": "c1.png", "width": 64, "height": 48}],
    "annotations": [
      {"id": 1, "image_id": 3, "category_id": 7, "bbox": [10.0, 12.0, 20.0, 16.0]}
    ]
  })";
  coco.close();

  const DatasetIndex index = load_dataset(root);
  REQUIRE(index.annotation_count() == 1);
  const Annotation& a = index.annotations[0][0];
  CHECK(a.class_id == DamageClass::D40);
  CHECK(a.bbox.x_max == doctest::Approx(30.0));
  CHECK(a.bbox.y_max == doctest::Approx(28.0));
}

TEST_CASE("manifest file form resolves relative paths") {
  const fs::path root = make_temp_dir("manifest_file");
  write_blank_image(root / "imgs", "m1", 32, 32);
  write_voc_xml(root / "anns", "m1", 32, 32, {{"D10", BoundingBox{2, 2, 12, 12}}});
  std::ofstream manifest(root / "data.manifest");
  manifest << "# fixture manifest\n"
           << "images = imgs\n"
           << "annotations = anns\n";
  manifest.close();

  const DatasetIndex index = load_dataset(root / "data.manifest");
  CHECK(index.records.size() == 1);
  CHECK(index.annotation_count() == 1);
}
