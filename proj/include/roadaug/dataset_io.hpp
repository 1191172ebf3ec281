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
#include <optional>
#include <string>
#include <vector>

#include "roadaug/types.hpp"

namespace roadaug {

/// Resolved dataset locations. The manifest is either a dataset root
/// directory (images/ plus annotations/ or annotations.json, optional masks/)
/// or a key-value file naming the three locations explicitly.
struct Manifest {
  std::filesystem::path images_dir;
  std::filesystem::path annotations;  // directory of VOC XML files, or a COCO-style .json
  std::optional<std::filesystem::path> masks_dir;
};

Manifest resolve_manifest(const std::filesystem::path& manifest_path);

struct LoadOptions {
  bool allow_unknown_classes = false;  // drop + count instead of failing
  int jobs = 1;                        // parallel image decoding
};

struct LoadReport {
  std::size_t images = 0;
  std::size_t annotations_kept = 0;
  std::size_t clipped = 0;          // partially outside, clipped to bounds
  std::size_t dropped_outside = 0;  // entirely outside image bounds
  std::size_t unknown_class_dropped = 0;
  std::vector<std::string> dangling;  // annotations referencing missing images

  std::string to_text() const;
};

/// Loads and validates a dataset. Boxes partially outside the image are
/// clipped; boxes entirely outside are dropped and counted. Records end up
/// sorted by image_id regardless of directory traversal order.
DatasetIndex load_dataset(const std::filesystem::path& manifest_path,
                          LoadReport* report = nullptr, const LoadOptions& opts = {});

/// 8-bit single-channel mask; value > 127 means road. Throws MaskDimMismatch
/// when dims differ from expected, MaskReadError when unreadable.
RoadMask load_mask(const std::filesystem::path& path, int expected_width, int expected_height);

/// Per-image write result, later assembled into the shared annotation
/// document by a single writer.
struct WrittenImage {
  std::string image_id;
  int width = 0;
  int height = 0;
  std::filesystem::path image_path;
  std::vector<Annotation> annotations;
};

/// Writes the image lossless under <out_dir>/images/<image_id>.png.
WrittenImage write_augmented(const ImageRecord& record, std::vector<Annotation> annotations,
                             const std::filesystem::path& out_dir);

/// Assembles one COCO-style document at <out_dir>/annotations.json in
/// image_id order, whatever order the per-image results arrive in.
std::filesystem::path write_annotation_document(std::vector<WrittenImage> images,
                                                const std::filesystem::path& out_dir);

}  // namespace roadaug
