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
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qtl/qsim/state_vector.hpp"

namespace qtl::qsim {

/// CNOT layout applied after each variational RY layer.
enum class Entangler {
  kRing,   // q -> (q+1) mod n for q = 0..n-1
  kChain,  // q -> q+1 for q = 0..n-2
  kNone,
};

std::string to_string(Entangler e);
Entangler entangler_from_string(const std::string& name);

/// (control, target) pairs in application order. Empty for n = 1.
std::vector<std::pair<int, int>> entangler_pairs(int num_qubits, Entangler e);

/// The dressed-circuit ansatz: H on every qubit, RY(embedding[q]), then
/// `depth` layers of RY(theta[q][l]) followed by the entangler.
struct CircuitSpec {
  int num_qubits = 1;
  int depth = 3;
  Entangler entangler = Entangler::kRing;
  std::vector<double> embedding_angles;    // n, each in [-pi/2, pi/2]
  std::vector<double> variational_angles;  // n x depth, row-major by qubit

  static CircuitSpec zeros(int num_qubits, int depth, Entangler e = Entangler::kRing);

  double theta(int q, int layer) const {
    return variational_angles[static_cast<std::size_t>(q) * depth + layer];
  }
  /// Angles of layer `layer` gathered across qubits.
  std::vector<double> layer_angles(int layer) const;

  /// Throws ArgumentError (shape, range, finiteness) or CapacityError.
  /// Shifted-angle evaluations (gradient oracles) may step outside the
  /// embedding range and pass check_embedding_range = false.
  void validate(bool check_embedding_range = true) const;
};

/// Applies the entangler as a single basis-state permutation (equivalent to
/// the CNOT sequence). `inverse` undoes it. `scratch` is resized as needed.
void apply_entangler(StateVector& state, Entangler e, std::vector<Amplitude>& scratch,
                     bool inverse = false);

/// Reference execution, one gate at a time.
std::vector<double> run_ansatz(const CircuitSpec& spec, bool check_embedding_range = true);

/// Dense Kronecker-product oracle; n <= 6 only.
inline constexpr int kDenseOracleMaxQubits = 6;
struct DenseOracleResult {
  std::vector<Amplitude> state;
  std::vector<double> expectations;
};
DenseOracleResult dense_oracle_state(const CircuitSpec& spec);
std::vector<double> dense_oracle(const CircuitSpec& spec);

}  // namespace qtl::qsim
