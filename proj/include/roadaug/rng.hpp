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

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace roadaug {

inline constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ull;

/// SplitMix64 finalizer. Full 64-bit avalanche; used to derive
/// per-image random streams from (run seed, image id).
constexpr std::uint64_t avalanche64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ull;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBull;
  z ^= z >> 31;
  return z;
}

/// FNV-1a over the bytes of a string.
constexpr std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xCBF29CE484222325ull;
  for (char c : s) {
    h ^= static_cast<std::uint8_t>(c);
    h *= 0x100000001B3ull;
  }
  return h;
}

/// Seed of the private random stream of a named unit of work. Depends only on
/// (run_seed, stream_id), never on scheduling.
inline std::uint64_t stream_seed(std::uint64_t run_seed, std::string_view stream_id) {
  return avalanche64(run_seed ^ (fnv1a64(stream_id) + kGoldenGamma));
}

/// Deterministic draws on top of mt19937_64. The engine is bit-exact across
/// platforms by the standard; std:: distributions are not, so the draw
/// algorithms live here.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform in [0,1), 53-bit resolution.
  double uniform_real() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform_in(double lo, double hi) { return lo + (hi - lo) * uniform_real(); }

  /// Uniform index in [0, n). Rejection sampling, unbiased. n must be > 0.
  std::size_t uniform_index(std::size_t n) {
    const std::uint64_t bucket = UINT64_MAX / n;
    const std::uint64_t limit = bucket * n;
    std::uint64_t x;
    do {
      x = next_u64();
    } while (x >= limit);
    return static_cast<std::size_t>(x / bucket);
  }

  /// Uniform integer in [lo, hi] inclusive.
  int uniform_int(int lo, int hi) {
    return lo + static_cast<int>(uniform_index(static_cast<std::size_t>(hi - lo) + 1));
  }

 private:
  std::mt19937_64 engine_;
};

/// Draws indices with probability proportional to fixed nonnegative weights.
class DiscreteSampler {
 public:
  DiscreteSampler() = default;
  explicit DiscreteSampler(const std::vector<double>& weights) {
    cumulative_.reserve(weights.size());
    double acc = 0.0;
    for (double w : weights) {
      acc += (w > 0.0 ? w : 0.0);
      cumulative_.push_back(acc);
    }
    total_ = acc;
  }

  double total() const { return total_; }
  bool empty() const { return total_ <= 0.0; }

  std::size_t sample(Rng& rng) const {
    const double target = rng.uniform_real() * total_;
    std::size_t lo = 0, hi = cumulative_.size() - 1;
    while (lo < hi) {
      const std::size_t mid = (lo + hi) / 2;
      if (cumulative_[mid] > target) {
        hi = mid;
      } else {
        lo = mid + 1;
      }
    }
    return lo;
  }

 private:
  std::vector<double> cumulative_;
  double total_ = 0.0;
};

}  // namespace roadaug
