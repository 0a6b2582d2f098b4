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

#include "qtl/datapipe/batches.hpp"

#include <algorithm>

#include "qtl/common/errors.hpp"
#include "qtl/mlcore/rng.hpp"

namespace qtl::data {

std::vector<Batch> make_batches(const std::vector<std::size_t>& members, std::size_t batch_size,
                                std::uint64_t seed, std::uint64_t epoch) {
  if (batch_size == 0) throw ArgumentError("batch_size must be at least 1");
  if (members.empty()) throw ArgumentError("cannot batch an empty split");
  std::vector<std::size_t> order = members;
  auto rng = ml::Rng::derive(seed, {ml::key(ml::Stream::kShuffle), epoch});
  for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);

  std::vector<Batch> batches;
  for (std::size_t start = 0; start < order.size(); start += batch_size) {
    const std::size_t end = std::min(order.size(), start + batch_size);
    batches.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(start),
                         order.begin() + static_cast<std::ptrdiff_t>(end));
  }
  return batches;
}

}  // namespace qtl::data
