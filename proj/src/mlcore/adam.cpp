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

#include "qtl/mlcore/adam.hpp"

#include <cmath>

#include "qtl/common/errors.hpp"

namespace qtl::ml {

AdamState AdamState::for_blocks(std::span<const std::size_t> block_sizes) {
  AdamState s;
  for (std::size_t n : block_sizes) {
    s.first_moment.emplace_back(n, 0.0);
    s.second_moment.emplace_back(n, 0.0);
  }
  return s;
}

AdamState AdamState::for_size(std::size_t size) {
  const std::size_t sizes[] = {size};
  return for_blocks(sizes);
}

void adam_step(const AdamConfig& config, AdamState& state, std::span<const std::span<double>> params,
               std::span<const std::span<const double>> grads) {
  if (params.size() != grads.size() || params.size() != state.first_moment.size() ||
      params.size() != state.second_moment.size()) {
    throw ArgumentError("adam_step: block count mismatch");
  }
  for (std::size_t b = 0; b < params.size(); ++b) {
    if (params[b].size() != grads[b].size() || params[b].size() != state.first_moment[b].size() ||
        params[b].size() != state.second_moment[b].size()) {
      throw ArgumentError("adam_step: block " + std::to_string(b) + " shape mismatch");
    }
  }
  state.step += 1;
  const double t = static_cast<double>(state.step);
  const double correction1 = 1.0 - std::pow(config.beta1, t);
  const double correction2 = 1.0 - std::pow(config.beta2, t);
  for (std::size_t b = 0; b < params.size(); ++b) {
    auto p = params[b];
    auto g = grads[b];
    auto& m = state.first_moment[b];
    auto& v = state.second_moment[b];
    for (std::size_t i = 0; i < p.size(); ++i) {
      m[i] = config.beta1 * m[i] + (1.0 - config.beta1) * g[i];
      v[i] = config.beta2 * v[i] + (1.0 - config.beta2) * g[i] * g[i];
      const double m_hat = m[i] / correction1;
      const double v_hat = v[i] / correction2;
      p[i] -= config.lr * m_hat / (std::sqrt(v_hat) + config.epsilon);
    }
  }
}

void adam_step(const AdamConfig& config, AdamState& state, std::span<double> params,
               std::span<const double> grads) {
  const std::span<double> p[] = {params};
  const std::span<const double> g[] = {grads};
  adam_step(config, state, p, g);
}

}  // namespace qtl::ml
