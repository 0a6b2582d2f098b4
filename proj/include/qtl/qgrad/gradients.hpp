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

#include "qtl/qsim/ansatz.hpp"
#include "qtl/qsim/state_vector.hpp"

namespace qtl::qgrad {

/// Gradients of L = sum_q upstream[q] <Z_q> with respect to the circuit angles.
struct CircuitGradients {
  std::vector<double> embedding;    // n
  std::vector<double> variational;  // n x depth, same layout as CircuitSpec

  static CircuitGradients zeros(int num_qubits, int depth);
};

/// Forward simulation that keeps its final state so a reverse (adjoint)
/// sweep can follow. Owns its buffers; reuse one engine per worker thread.
///
/// Forward fuses H, the embedding RY and the first variational RY into a
/// product-state preparation and applies each entangler as one permutation.
/// vjp() walks the layers backwards carrying psi and lambda = O psi, so the
/// cost is a constant number of state passes per layer regardless of how
/// many angles are differentiated.
class AnsatzEngine {
 public:
  explicit AnsatzEngine(int num_qubits);

  int num_qubits() const noexcept { return psi_.num_qubits(); }

  const std::vector<double>& forward(const qsim::CircuitSpec& spec);

  /// Requires a preceding forward(); consumes the stored state.
  CircuitGradients vjp(std::span<const double> upstream);

  const qsim::StateVector& state() const noexcept { return psi_; }

 private:
  qsim::StateVector psi_;
  qsim::StateVector lambda_;
  std::vector<qsim::Amplitude> scratch_;
  std::vector<double> prob_scratch_;
  qsim::CircuitSpec spec_;
  std::vector<double> expectations_;
  bool tape_valid_ = false;
};

/// Adjoint vector-Jacobian product (forward + reverse sweep).
CircuitGradients circuit_vjp(const qsim::CircuitSpec& spec, std::span<const double> upstream);

/// Exact two-term shift rule, re-running the gate-by-gate reference
/// simulator twice per angle. Test oracle; O(#angles) circuit executions.
CircuitGradients parameter_shift_grad(const qsim::CircuitSpec& spec,
                                      std::span<const double> upstream);

}  // namespace qtl::qgrad
