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
#include <string>

#include "qtl/common/errors.hpp"
#include "qtl/qgrad/gradients.hpp"
#include "qtl/qsim/gates.hpp"

namespace qtl::qgrad {

using qsim::CircuitSpec;

CircuitGradients CircuitGradients::zeros(int num_qubits, int depth) {
  CircuitGradients g;
  g.embedding.assign(num_qubits, 0.0);
  g.variational.assign(static_cast<std::size_t>(num_qubits) * depth, 0.0);
  return g;
}

AnsatzEngine::AnsatzEngine(int num_qubits) : psi_(num_qubits), lambda_(num_qubits) {}

const std::vector<double>& AnsatzEngine::forward(const CircuitSpec& spec) {
  spec.validate();
  if (spec.num_qubits != num_qubits()) {
    throw ArgumentError("engine built for " + std::to_string(num_qubits()) + " qubits, spec has " +
                        std::to_string(spec.num_qubits));
  }
  spec_ = spec;
  const int n = spec.num_qubits;

  std::vector<double> first(spec.embedding_angles);
  if (spec.depth > 0) {
    for (int q = 0; q < n; ++q) first[q] += spec.theta(q, 0);
  }
  qsim::prepare_ry_product_state(psi_, first);
  if (spec.depth > 0) qsim::apply_entangler(psi_, spec.entangler, scratch_);
  for (int layer = 1; layer < spec.depth; ++layer) {
    qsim::apply_ry_layer(psi_, spec.layer_angles(layer));
    qsim::apply_entangler(psi_, spec.entangler, scratch_);
  }
  expectations_ = qsim::expvals_z(psi_, prob_scratch_);
  tape_valid_ = true;
  return expectations_;
}

CircuitGradients AnsatzEngine::vjp(std::span<const double> upstream) {
  if (!tape_valid_) throw std::logic_error("AnsatzEngine::vjp called without forward()");
  const int n = spec_.num_qubits;
  if (upstream.size() != static_cast<std::size_t>(n)) {
    throw ArgumentError("upstream length " + std::to_string(upstream.size()) +
                        " does not match qubit count " + std::to_string(n));
  }
  for (double u : upstream) {
    if (!std::isfinite(u)) throw ArgumentError("upstream gradient must be finite");
  }
  tape_valid_ = false;

  CircuitGradients grads = CircuitGradients::zeros(n, spec_.depth);
  qsim::apply_z_observable(psi_, upstream, lambda_);

  std::vector<double> layer_grads(n);
  for (int layer = spec_.depth - 1; layer >= 1; --layer) {
    qsim::apply_entangler(psi_, spec_.entangler, scratch_, /*inverse=*/true);
    qsim::apply_entangler(lambda_, spec_.entangler, scratch_, /*inverse=*/true);
    std::fill(layer_grads.begin(), layer_grads.end(), 0.0);
    qsim::ry_layer_backward(psi_, lambda_, spec_.layer_angles(layer), layer_grads);
    for (int q = 0; q < n; ++q) {
      grads.variational[static_cast<std::size_t>(q) * spec_.depth + layer] = layer_grads[q];
    }
  }

  // Product-state prefix: RY(x_q) and RY(theta_q0) act back to back on the
  // same qubit, so both angles share one derivative.
  std::vector<double> first(spec_.embedding_angles);
  if (spec_.depth > 0) {
    qsim::apply_entangler(psi_, spec_.entangler, scratch_, /*inverse=*/true);
    qsim::apply_entangler(lambda_, spec_.entangler, scratch_, /*inverse=*/true);
    for (int q = 0; q < n; ++q) first[q] += spec_.theta(q, 0);
  }
  std::fill(layer_grads.begin(), layer_grads.end(), 0.0);
  qsim::ry_layer_backward(psi_, lambda_, first, layer_grads);
  for (int q = 0; q < n; ++q) {
    grads.embedding[q] = layer_grads[q];
    if (spec_.depth > 0) grads.variational[static_cast<std::size_t>(q) * spec_.depth] = layer_grads[q];
  }
  return grads;
}

CircuitGradients circuit_vjp(const CircuitSpec& spec, std::span<const double> upstream) {
  spec.validate();
  if (upstream.size() != static_cast<std::size_t>(spec.num_qubits)) {
    throw ArgumentError("upstream length must equal the qubit count");
  }
  AnsatzEngine engine(spec.num_qubits);
  engine.forward(spec);
  return engine.vjp(upstream);
}

}  // namespace qtl::qgrad
