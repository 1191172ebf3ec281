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

#include "roadaug/core.hpp"

namespace roadaug {

// Thin codec layer (PNG/JPEG) between the filesystem and the owned pixel
// buffers everything else operates on.

Image load_rgb(const std::filesystem::path& path);
GrayImage load_gray(const std::filesystem::path& path);

/// Lossless PNG. Throws WriteError on failure.
void save_png(const std::filesystem::path& path, const Image& image);
void save_gray_png(const std::filesystem::path& path, const GrayImage& image);

}  // namespace roadaug
