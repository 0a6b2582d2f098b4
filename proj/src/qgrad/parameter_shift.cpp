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

#include <cmath>
#include <numbers>

#include "qtl/common/errors.hpp"
#include "qtl/qgrad/gradients.hpp"

namespace qtl::qgrad {

namespace {

double weighted_loss(const qsim::CircuitSpec& spec, std::span<const double> upstream) {
  const auto z = qsim::run_ansatz(spec, /*check_embedding_range=*/false);
  double loss = 0.0;
  for (std::size_t q = 0; q < z.size(); ++q) loss += upstream[q] * z[q];
  return loss;
}

double shifted_difference(qsim::CircuitSpec& spec, double& angle,
                          std::span<const double> upstream) {
  constexpr double kShift = std::numbers::pi / 2;
  const double saved = angle;
  angle = saved + kShift;
  const double plus = weighted_loss(spec, upstream);
  angle = saved - kShift;
  const double minus = weighted_loss(spec, upstream);
  angle = saved;
  return 0.5 * (plus - minus);
}

}  // namespace

CircuitGradients parameter_shift_grad(const qsim::CircuitSpec& spec,
                                      std::span<const double> upstream) {
  spec.validate();
  if (upstream.size() != static_cast<std::size_t>(spec.num_qubits)) {
    throw ArgumentError("upstream length must equal the qubit count");
  }
  for (double u : upstream) {
    if (!std::isfinite(u)) throw ArgumentError("upstream gradient must be finite");
  }
  qsim::CircuitSpec work = spec;
  CircuitGradients grads = CircuitGradients::zeros(spec.num_qubits, spec.depth);
  for (std::size_t i = 0; i < work.embedding_angles.size(); ++i) {
    grads.embedding[i] = shifted_difference(work, work.embedding_angles[i], upstream);
  }
  for (std::size_t i = 0; i < work.variational_angles.size(); ++i) {
    grads.variational[i] = shifted_difference(work, work.variational_angles[i], upstream);
  }
  return grads;
}

}  // namespace qtl::qgrad
