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
#include <functional>
#include <numeric>
#include <vector>

namespace qtl {

/// Dense row-major tensor. Images are stored HWC as uint8; preprocessed
/// images are CHW float32.
template <class T>
struct Tensor {
  std::vector<std::size_t> shape;
  std::vector<T> data;

  static Tensor zeros(std::vector<std::size_t> shape) {
    Tensor t;
    t.shape = std::move(shape);
    t.data.assign(element_count(t.shape), T{});
    return t;
  }

  static std::size_t element_count(const std::vector<std::size_t>& shape) {
    return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
  }

  std::size_t rank() const { return shape.size(); }
  std::size_t size() const { return data.size(); }

  bool operator==(const Tensor&) const = default;
};

using FloatTensor = Tensor<float>;
using ByteTensor = Tensor<std::uint8_t>;

}  // namespace qtl
