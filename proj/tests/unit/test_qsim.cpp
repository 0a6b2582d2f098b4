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

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "qtl/common/errors.hpp"
#include "qtl/mlcore/rng.hpp"
#include "qtl/qgrad/gradients.hpp"
#include "qtl/qsim/ansatz.hpp"
#include "qtl/qsim/gates.hpp"
#include "qtl/qsim/state_vector.hpp"

namespace {

using qtl::qsim::Amplitude;
using qtl::qsim::CircuitSpec;
using qtl::qsim::Entangler;
using qtl::qsim::StateVector;

constexpr double kTol = 1e-10;

StateVector random_state(int n, qtl::ml::Rng& rng) {
  StateVector s(n);
  double norm = 0.0;
  for (std::size_t k = 0; k < s.size(); ++k) {
    s[k] = {rng.normal(), rng.normal()};
    norm += std::norm(s[k]);
  }
  for (std::size_t k = 0; k < s.size(); ++k) s[k] /= std::sqrt(norm);
  return s;
}

CircuitSpec random_spec(qtl::ml::Rng& rng, int max_qubits, int max_depth) {
  const int n = 1 + static_cast<int>(rng.below(max_qubits));
  const int d = 1 + static_cast<int>(rng.below(max_depth));
  const Entangler kinds[] = {Entangler::kRing, Entangler::kChain, Entangler::kNone};
  CircuitSpec spec = CircuitSpec::zeros(n, d, kinds[rng.below(3)]);
  for (auto& a : spec.embedding_angles) a = rng.uniform(-std::numbers::pi / 2, std::numbers::pi / 2);
  for (auto& a : spec.variational_angles) a = rng.normal(0.0, 2 * std::numbers::pi);
  return spec;
}

void expect_states_near(const StateVector& a, const StateVector& b, double tol) {
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t k = 0; k < a.size(); ++k) {
    EXPECT_NEAR(a[k].real(), b[k].real(), tol) << "index " << k;
    EXPECT_NEAR(a[k].imag(), b[k].imag(), tol) << "index " << k;
  }
}

TEST(StateVector, StartsInZeroState) {
  StateVector s(3);
  EXPECT_EQ(s.size(), 8u);
  EXPECT_EQ(s[0], Amplitude(1.0, 0.0));
  for (std::size_t k = 1; k < s.size(); ++k) EXPECT_EQ(s[k], Amplitude(0.0, 0.0));
  EXPECT_EQ(s.storage_bytes(), 8u * 16u);
}

TEST(StateVector, CapacityErrorNamesMemory) {
  EXPECT_THROW(StateVector(0), qtl::CapacityError);
  try {
    StateVector s(qtl::qsim::kMaxQubits + 1);
    FAIL() << "expected CapacityError";
  } catch (const qtl::CapacityError& e) {
    EXPECT_NE(std::string(e.what()).find(std::to_string(qtl::qsim::state_bytes(qtl::qsim::kMaxQubits + 1))),
              std::string::npos);
  }
}

TEST(StateVector, StateBytesArithmetic) {
  EXPECT_EQ(qtl::qsim::state_bytes(19), 8388608u);
  EXPECT_EQ(qtl::qsim::state_bytes(1), 32u);
}

TEST(Gates, HadamardUsesInverseSqrtTwo) {
  StateVector s(1);
  qtl::qsim::apply_hadamard(s, 0);
  EXPECT_NEAR(s[0].real(), 1 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(s[1].real(), 1 / std::sqrt(2.0), 1e-15);
  qtl::qsim::apply_hadamard(s, 0);
  EXPECT_NEAR(s[0].real(), 1.0, 1e-15);
  EXPECT_NEAR(std::abs(s[1]), 0.0, 1e-15);
}

TEST(Gates, RyMatrixEntries) {
  const double a = 0.7;
  StateVector s(1);
  qtl::qsim::apply_ry(s, 0, a);
  EXPECT_NEAR(s[0].real(), std::cos(a / 2), 1e-15);
  EXPECT_NEAR(s[1].real(), std::sin(a / 2), 1e-15);
  s[0] = 0.0;
  s[1] = 1.0;
  qtl::qsim::apply_ry(s, 0, a);
  EXPECT_NEAR(s[0].real(), -std::sin(a / 2), 1e-15);
  EXPECT_NEAR(s[1].real(), std::cos(a / 2), 1e-15);
}

TEST(Gates, RyActsOnRequestedQubitOnly) {
  StateVector s(3);
  qtl::qsim::apply_ry(s, 2, std::numbers::pi);
  EXPECT_NEAR(std::abs(s[4]), 1.0, 1e-15);
  EXPECT_NEAR(qtl::qsim::expval_z(s, 2), -1.0, 1e-15);
  EXPECT_NEAR(qtl::qsim::expval_z(s, 0), 1.0, 1e-15);
}

TEST(Gates, RejectsBadArguments) {
  StateVector s(2);
  EXPECT_THROW(qtl::qsim::apply_ry(s, 0, std::nan("")), qtl::ArgumentError);
  EXPECT_THROW(qtl::qsim::apply_ry(s, 0, INFINITY), qtl::ArgumentError);
  EXPECT_THROW(qtl::qsim::apply_hadamard(s, 2), qtl::IndexError);
  EXPECT_THROW(qtl::qsim::apply_cnot(s, 1, 1), qtl::ArgumentError);
  EXPECT_THROW(qtl::qsim::apply_cnot(s, 0, 5), qtl::IndexError);
}

TEST(Gates, CnotTruthTable) {
  for (std::size_t basis = 0; basis < 4; ++basis) {
    StateVector s(2);
    s[0] = 0.0;
    s[basis] = 1.0;
    qtl::qsim::apply_cnot(s, 0, 1);
    const std::size_t expected = (basis & 1) ? basis ^ 2 : basis;
    EXPECT_EQ(s[expected], Amplitude(1.0, 0.0)) << "basis " << basis;
  }
}

TEST(Gates, CnotOnPlusStateGivesBellPair) {
  StateVector s(2);
  qtl::qsim::apply_hadamard(s, 0);
  qtl::qsim::apply_cnot(s, 0, 1);
  EXPECT_NEAR(s[0].real(), 1 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(s[3].real(), 1 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(std::abs(s[1]) + std::abs(s[2]), 0.0, 1e-15);
}

TEST(Gates, ExpvalsMatchSingleQubitSweeps) {
  qtl::ml::Rng rng(11);
  for (int n = 1; n <= 9; ++n) {
    const StateVector s = random_state(n, rng);
    const auto all = qtl::qsim::expvals_z(s);
    ASSERT_EQ(all.size(), static_cast<std::size_t>(n));
    for (int q = 0; q < n; ++q) EXPECT_NEAR(all[q], qtl::qsim::expval_z(s, q), 1e-13);
  }
}

TEST(Gates, ExpvalOfBasisStates) {
  StateVector s(3);
  s[0] = 0.0;
  s[5] = 1.0;  // qubits 0 and 2 set
  const auto z = qtl::qsim::expvals_z(s);
  EXPECT_DOUBLE_EQ(z[0], -1.0);
  EXPECT_DOUBLE_EQ(z[1], 1.0);
  EXPECT_DOUBLE_EQ(z[2], -1.0);
}

TEST(Gates, RyLayerMatchesPerQubitRotations) {
  qtl::ml::Rng rng(5);
  for (int n : {1, 3, 10, 11, 12, 14}) {
    StateVector a = random_state(n, rng);
    StateVector b = a;
    std::vector<double> angles(n);
    for (auto& x : angles) x = rng.uniform(-4, 4);
    qtl::qsim::apply_ry_layer(a, angles);
    for (int q = 0; q < n; ++q) qtl::qsim::apply_ry(b, q, angles[q]);
    expect_states_near(a, b, 1e-12);
  }
}

TEST(Gates, ProductStatePreparation) {
  qtl::ml::Rng rng(9);
  for (int n : {1, 4, 12}) {
    std::vector<double> angles(n);
    for (auto& x : angles) x = rng.uniform(-3, 3);
    StateVector fused(n);
    qtl::qsim::prepare_ry_product_state(fused, angles);
    StateVector ref(n);
    for (int q = 0; q < n; ++q) {
      qtl::qsim::apply_hadamard(ref, q);
      qtl::qsim::apply_ry(ref, q, angles[q]);
    }
    expect_states_near(fused, ref, 1e-12);
  }
}

TEST(Gates, ZObservableIsDiagonalWeightedSum) {
  qtl::ml::Rng rng(3);
  const int n = 5;
  const StateVector psi = random_state(n, rng);
  std::vector<double> w(n);
  for (auto& x : w) x = rng.normal();
  StateVector lambda(n);
  qtl::qsim::apply_z_observable(psi, w, lambda);
  for (std::size_t k = 0; k < psi.size(); ++k) {
    double d = 0.0;
    for (int q = 0; q < n; ++q) d += (k >> q & 1) ? -w[q] : w[q];
    EXPECT_NEAR(std::abs(lambda[k] - d * psi[k]), 0.0, 1e-13);
  }
}

TEST(Entangler, PairsForRingAndChain) {
  using P = std::vector<std::pair<int, int>>;
  EXPECT_EQ(qtl::qsim::entangler_pairs(3, Entangler::kRing), (P{{0, 1}, {1, 2}, {2, 0}}));
  EXPECT_EQ(qtl::qsim::entangler_pairs(3, Entangler::kChain), (P{{0, 1}, {1, 2}}));
  EXPECT_EQ(qtl::qsim::entangler_pairs(2, Entangler::kRing), (P{{0, 1}, {1, 0}}));
  EXPECT_TRUE(qtl::qsim::entangler_pairs(1, Entangler::kRing).empty());
  EXPECT_TRUE(qtl::qsim::entangler_pairs(4, Entangler::kNone).empty());
}

TEST(Entangler, PermutationMatchesCnotSequenceAndInverts) {
  qtl::ml::Rng rng(21);
  std::vector<Amplitude> scratch;
  for (Entangler e : {Entangler::kRing, Entangler::kChain, Entangler::kNone}) {
    for (int n = 1; n <= 13; ++n) {
      const StateVector start = random_state(n, rng);
      StateVector fast = start, slow = start;
      qtl::qsim::apply_entangler(fast, e, scratch);
      for (auto [c, t] : qtl::qsim::entangler_pairs(n, e)) qtl::qsim::apply_cnot(slow, c, t);
      expect_states_near(fast, slow, 0.0);
      qtl::qsim::apply_entangler(fast, e, scratch, true);
      expect_states_near(fast, start, 0.0);
    }
  }
}

TEST(Entangler, NameRoundTrip) {
  for (Entangler e : {Entangler::kRing, Entangler::kChain, Entangler::kNone}) {
    EXPECT_EQ(qtl::qsim::entangler_from_string(qtl::qsim::to_string(e)), e);
  }
  EXPECT_THROW(qtl::qsim::entangler_from_string("star"), qtl::ConfigError);
}

TEST(CircuitSpec, Validation) {
  CircuitSpec spec = CircuitSpec::zeros(3, 2);
  EXPECT_NO_THROW(spec.validate());
  spec.embedding_angles[1] = 2.0;
  EXPECT_THROW(spec.validate(), qtl::ArgumentError);
  EXPECT_NO_THROW(spec.validate(false));
  spec.embedding_angles[1] = 0.0;
  spec.variational_angles[0] = std::nan("");
  EXPECT_THROW(spec.validate(), qtl::ArgumentError);
  spec = CircuitSpec::zeros(3, 2);
  spec.variational_angles.pop_back();
  EXPECT_THROW(spec.validate(), qtl::ArgumentError);
  spec = CircuitSpec::zeros(3, 2);
  spec.num_qubits = qtl::qsim::kMaxQubits + 1;
  EXPECT_THROW(spec.validate(), qtl::Error);
}

TEST(CircuitSpec, LayoutIsRowMajorByQubit) {
  CircuitSpec spec = CircuitSpec::zeros(2, 3);
  for (std::size_t i = 0; i < spec.variational_angles.size(); ++i) spec.variational_angles[i] = double(i);
  EXPECT_EQ(spec.theta(1, 2), 5.0);
  EXPECT_EQ(spec.layer_angles(1), (std::vector<double>{1.0, 4.0}));
}

TEST(Ansatz, ZeroAnglesGivePlusStateExpectations) {
  // H on every qubit, all rotations zero: every <Z> vanishes.
  const auto z = qtl::qsim::run_ansatz(CircuitSpec::zeros(4, 3));
  for (double v : z) EXPECT_NEAR(v, 0.0, 1e-15);
}

TEST(Ansatz, SingleQubitClosedForm) {
  // <Z> after RY(b) RY(a) H |0> is -sin(a + b).
  CircuitSpec spec = CircuitSpec::zeros(1, 1);
  spec.embedding_angles[0] = 0.3;
  spec.variational_angles[0] = 1.1;
  EXPECT_NEAR(qtl::qsim::run_ansatz(spec)[0], -std::sin(1.4), 1e-14);
}

TEST(Ansatz, MatchesDenseOracleOnRandomSpecs) {
  qtl::ml::Rng rng(2024);
  for (int i = 0; i < 200; ++i) {
    const CircuitSpec spec = random_spec(rng, 4, 3);
    const auto fast = qtl::qsim::run_ansatz(spec);
    const auto dense = qtl::qsim::dense_oracle_state(spec);
    ASSERT_EQ(fast.size(), dense.expectations.size());
    for (std::size_t q = 0; q < fast.size(); ++q) EXPECT_NEAR(fast[q], dense.expectations[q], kTol);

    qtl::qgrad::AnsatzEngine engine(spec.num_qubits);
    const auto fused = engine.forward(spec);
    for (std::size_t q = 0; q < fused.size(); ++q) EXPECT_NEAR(fused[q], dense.expectations[q], kTol);
    for (std::size_t k = 0; k < dense.state.size(); ++k) {
      EXPECT_NEAR(std::abs(engine.state()[k] - dense.state[k]), 0.0, kTol);
    }
  }
}

TEST(Ansatz, NormPreservedAfterEveryGate) {
  qtl::ml::Rng rng(77);
  for (int i = 0; i < 50; ++i) {
    const CircuitSpec spec = random_spec(rng, 6, 3);
    StateVector s(spec.num_qubits);
    auto check = [&] { ASSERT_NEAR(s.norm_squared(), 1.0, kTol); };
    for (int q = 0; q < spec.num_qubits; ++q) {
      qtl::qsim::apply_hadamard(s, q);
      check();
      qtl::qsim::apply_ry(s, q, spec.embedding_angles[q]);
      check();
    }
    for (int l = 0; l < spec.depth; ++l) {
      for (int q = 0; q < spec.num_qubits; ++q) {
        qtl::qsim::apply_ry(s, q, spec.theta(q, l));
        check();
      }
      for (auto [c, t] : qtl::qsim::entangler_pairs(spec.num_qubits, spec.entangler)) {
        qtl::qsim::apply_cnot(s, c, t);
        check();
      }
    }
  }
}

TEST(DenseOracle, RejectsLargeCircuits) {
  EXPECT_THROW(qtl::qsim::dense_oracle(CircuitSpec::zeros(qtl::qsim::kDenseOracleMaxQubits + 1, 1)),
               qtl::CapacityError);
}

TEST(KernelPasses, CountedPerGate) {
  qtl::qsim::reset_kernel_passes();
  StateVector s(3);
  qtl::qsim::apply_hadamard(s, 0);
  qtl::qsim::apply_ry(s, 1, 0.2);
  qtl::qsim::apply_cnot(s, 0, 1);
  EXPECT_EQ(qtl::qsim::kernel_passes(), 3u);
}

}  // namespace
