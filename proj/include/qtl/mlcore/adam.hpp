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
#include <span>
#include <vector>

namespace qtl::ml {

struct AdamConfig {
  double lr = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// Moments are kept per parameter block, in the same order as the blocks
/// handed to adam_step.
struct AdamState {
  std::uint64_t step = 0;
  std::vector<std::vector<double>> first_moment;
  std::vector<std::vector<double>> second_moment;

  static AdamState for_blocks(std::span<const std::size_t> block_sizes);
  static AdamState for_size(std::size_t size);
};

/// Bias-corrected Adam over several blocks sharing one step counter.
void adam_step(const AdamConfig& config, AdamState& state, std::span<const std::span<double>> params,
               std::span<const std::span<const double>> grads);

/// Single-block convenience.
void adam_step(const AdamConfig& config, AdamState& state, std::span<double> params,
               std::span<const double> grads);

}  // namespace qtl::ml
