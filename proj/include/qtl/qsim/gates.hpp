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

#include <span>
#include <vector>

#include "qtl/qsim/state_vector.hpp"

namespace qtl::qsim {

// Single gates. All act in place; each counts as one kernel pass.

void apply_hadamard(StateVector& state, int q);
/// RY(angle) = [[cos(a/2), -sin(a/2)], [sin(a/2), cos(a/2)]] on qubit q.
void apply_ry(StateVector& state, int q, double angle);
void apply_cnot(StateVector& state, int control, int target);

/// <Z_q> = P(bit q = 0) - P(bit q = 1).
double expval_z(const StateVector& state, int q);
/// All n expectations in O(2^n) by folding marginals from the top bit down.
std::vector<double> expvals_z(const StateVector& state);
std::vector<double> expvals_z(const StateVector& state, std::vector<double>& scratch);

// Fused kernels used by the ansatz engine. Each is one logical pass over the
// state (the per-qubit passes for high qubits are counted separately).

/// Overwrites `state` with prod_q RY(angles[q]) H |0>, i.e. a product state.
void prepare_ry_product_state(StateVector& state, std::span<const double> angles);

/// Applies RY(angles[q]) to every qubit q. Low qubits are processed block-wise
/// so that a single sweep covers them.
void apply_ry_layer(StateVector& state, std::span<const double> angles);

/// Reverse step through one RY layer: for each qubit accumulates
/// Re<lambda| G_q |psi> (G = dRY/dphi * RY^-1 * 2) into grads[q], then undoes
/// RY(angles[q]) on both psi and lambda.
void ry_layer_backward(StateVector& psi, StateVector& lambda, std::span<const double> angles,
                       std::span<double> grads);

/// lambda = (sum_q weights[q] Z_q) psi.
void apply_z_observable(const StateVector& psi, std::span<const double> weights,
                        StateVector& lambda);

}  // namespace qtl::qsim
