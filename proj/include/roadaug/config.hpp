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
#include <string>

#include "roadaug/pipeline.hpp"

namespace roadaug {

/// Flat "key = value" file with [section] headers; keys are returned as
/// "section.key". '#' and ';' start comments. Throws ConfigError on
/// malformed lines.
std::map<std::string, std::string> parse_ini_file(const std::filesystem::path& path);
std::map<std::string, std::string> parse_ini_text(const std::string& text,
                                                  const std::string& origin = "<string>");

/// Applies a parsed config file onto an AugmentationConfig. Recognized
/// sections: [pipeline], [perspective], [placement], [dataset] (the latter
/// feeds LoadOptions). Unknown keys are errors.
void apply_config(AugmentationConfig& config, LoadOptions& load_options,
                  const std::map<std::string, std::string>& values);

}  // namespace roadaug
