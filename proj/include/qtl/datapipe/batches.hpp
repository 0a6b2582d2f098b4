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

#include <cstddef>
#include <cstdint>
#include <vector>

namespace qtl::data {

using Batch = std::vector<std::size_t>;

/// Splits `members` (dataset row indices) into batches after a permutation
/// drawn from (seed, epoch) alone. The last batch may be short.
std::vector<Batch> make_batches(const std::vector<std::size_t>& members, std::size_t batch_size,
                                std::uint64_t seed, std::uint64_t epoch);

}  // namespace qtl::data
