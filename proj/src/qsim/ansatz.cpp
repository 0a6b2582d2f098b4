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

#include "qtl/qsim/ansatz.hpp"

#include <cmath>
#include <numbers>

#include "qtl/common/errors.hpp"
#include "qtl/qsim/gates.hpp"

namespace qtl::qsim {

std::string to_string(Entangler e) {
  switch (e) {
    case Entangler::kRing: return "ring";
    case Entangler::kChain: return "chain";
    case Entangler::kNone: return "none";
  }
  return "?";
}

Entangler entangler_from_string(const std::string& name) {
  if (name == "ring") return Entangler::kRing;
  if (name == "chain") return Entangler::kChain;
  if (name == "none") return Entangler::kNone;
  throw ConfigError("unknown entangler '" + name + "' (expected ring, chain or none)");
}

std::vector<std::pair<int, int>> entangler_pairs(int num_qubits, Entangler e) {
  std::vector<std::pair<int, int>> pairs;
  if (num_qubits < 2 || e == Entangler::kNone) return pairs;
  for (int q = 0; q + 1 < num_qubits; ++q) pairs.emplace_back(q, q + 1);
  if (e == Entangler::kRing) pairs.emplace_back(num_qubits - 1, 0);
  return pairs;
}

CircuitSpec CircuitSpec::zeros(int num_qubits, int depth, Entangler e) {
  CircuitSpec spec;
  spec.num_qubits = num_qubits;
  spec.depth = depth;
  spec.entangler = e;
  spec.embedding_angles.assign(num_qubits > 0 ? num_qubits : 0, 0.0);
  spec.variational_angles.assign(
      num_qubits > 0 && depth > 0 ? static_cast<std::size_t>(num_qubits) * depth : 0, 0.0);
  return spec;
}

std::vector<double> CircuitSpec::layer_angles(int layer) const {
  std::vector<double> out(num_qubits);
  for (int q = 0; q < num_qubits; ++q) out[q] = theta(q, layer);
  return out;
}

void CircuitSpec::validate(bool check_embedding_range) const {
  check_capacity(num_qubits);
  if (depth < 0) throw ArgumentError("circuit depth must be non-negative");
  if (embedding_angles.size() != static_cast<std::size_t>(num_qubits)) {
    throw ArgumentError("embedding_angles must have one entry per qubit");
  }
  if (variational_angles.size() != static_cast<std::size_t>(num_qubits) * depth) {
    throw ArgumentError("variational_angles must have shape n x depth");
  }
  constexpr double kHalfPi = std::numbers::pi / 2;
  for (double a : embedding_angles) {
    if (!std::isfinite(a) || (check_embedding_range && (a < -kHalfPi || a > kHalfPi))) {
      throw ArgumentError("embedding angle outside [-pi/2, pi/2]");
    }
  }
  for (double a : variational_angles) {
    if (!std::isfinite(a)) throw ArgumentError("variational angle must be finite");
  }
}

namespace {

// Basis-index maps of the CNOT cascades. Applying CNOT(c, t) in sequence
// turns bit i into the xor of bits 0..i (chain); the ring's closing CNOT then
// xors the new top bit into bit 0.
inline std::size_t prefix_xor(std::size_t x) {
  x ^= x << 1;
  x ^= x << 2;
  x ^= x << 4;
  x ^= x << 8;
  x ^= x << 16;
  return x;
}

struct EntanglerMap {
  int n;
  bool ring;
  std::size_t mask;

  std::size_t forward(std::size_t k) const {
    std::size_t x = prefix_xor(k) & mask;
    if (ring) x ^= (x >> (n - 1)) & 1;
    return x;
  }
  std::size_t backward(std::size_t x) const {
    if (ring) x ^= (x >> (n - 1)) & 1;
    return (x ^ (x << 1)) & mask;
  }
};

}  // namespace

void apply_entangler(StateVector& state, Entangler e, std::vector<Amplitude>& scratch,
                     bool inverse) {
  const int n = state.num_qubits();
  if (n < 2 || e == Entangler::kNone) return;
  const EntanglerMap map{n, e == Entangler::kRing, state.size() - 1};
  auto src = state.amplitudes();
  scratch.resize(src.size());
  // new[F(k)] = old[k]; gather form new[j] = old[F^-1(j)].
  if (!inverse) {
    for (std::size_t j = 0; j < src.size(); ++j) scratch[j] = src[map.backward(j)];
  } else {
    for (std::size_t j = 0; j < src.size(); ++j) scratch[j] = src[map.forward(j)];
  }
  state.swap_storage(scratch);
  count_kernel_pass();
}

std::vector<double> run_ansatz(const CircuitSpec& spec, bool check_embedding_range) {
  spec.validate(check_embedding_range);
  const int n = spec.num_qubits;
  StateVector state(n);
  for (int q = 0; q < n; ++q) apply_hadamard(state, q);
  for (int q = 0; q < n; ++q) apply_ry(state, q, spec.embedding_angles[q]);
  const auto pairs = entangler_pairs(n, spec.entangler);
  for (int layer = 0; layer < spec.depth; ++layer) {
    for (int q = 0; q < n; ++q) apply_ry(state, q, spec.theta(q, layer));
    for (const auto& [c, t] : pairs) apply_cnot(state, c, t);
  }
  return expvals_z(state);
}

}  // namespace qtl::qsim
