// Copyright 2026 The QTL Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <initializer_list>
#include <string_view>

namespace qtl::ml {

/// xoshiro256** seeded through SplitMix64. Normal draws use Box-Muller on
/// top of the raw stream so results do not depend on the standard library's
/// distribution implementations.
///
/// Independent sub-streams are derived by folding a path of 64-bit keys
/// (purpose tag, epoch, sample hash, ...) into the seed; see derive().
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  /// Stream for `seed` specialised by an ordered key path.
  static Rng derive(std::uint64_t seed, std::initializer_list<std::uint64_t> path);

  std::uint64_t next_u64();
  /// Uniform in [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform integer in [0, bound), unbiased.
  std::uint64_t below(std::uint64_t bound);
  double normal();
  double normal(double mean, double stddev) { return mean + stddev * normal(); }

 private:
  std::uint64_t s_[4];
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;
};

/// Stream purposes. Values are part of the reproducibility contract.
enum class Stream : std::uint64_t {
  kInit = 0x1001,
  kShuffle = 0x1002,
  kAugment = 0x1003,
  kData = 0x1004,
  kSplit = 0x1005,
  kExtractor = 0x1006,
};

constexpr std::uint64_t key(Stream s) { return static_cast<std::uint64_t>(s); }

std::uint64_t splitmix64(std::uint64_t& state);

}  // namespace qtl::ml
