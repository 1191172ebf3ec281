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

#include <stdexcept>
#include <string>

namespace roadaug {

/// Base class for all failures raised by the toolkit.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// --- dataset I/O ---
struct ManifestError : Error { using Error::Error; };
struct UnknownClass : Error { using Error::Error; };
struct ImageReadError : Error { using Error::Error; };
struct MaskDimMismatch : Error { using Error::Error; };
struct MaskReadError : Error { using Error::Error; };
struct WriteError : Error { using Error::Error; };

// --- perspective estimation / binning ---
struct NoRoad : Error { using Error::Error; };
struct TooFewImages : Error { using Error::Error; };

// --- sampling ---
struct EmptyBank : Error { using Error::Error; };
struct EmptyRoadMask : Error { using Error::Error; };

// --- geometry / warping ---
struct DegenerateQuad : Error { using Error::Error; };
struct ScaleOutOfRange : Error { using Error::Error; };
struct SingularSystem : Error { using Error::Error; };

// --- compositing ---
struct NothingOnRoad : Error { using Error::Error; };
struct EmptyRegion : Error { using Error::Error; };
struct SolverDiverged : Error {
  SolverDiverged(const std::string& msg, double residual_)
      : Error(msg), residual(residual_) {}
  double residual = 0.0;
};

// --- configuration ---
struct ConfigError : Error { using Error::Error; };

}  // namespace roadaug
