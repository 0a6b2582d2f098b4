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

#include <algorithm>
#include <cmath>
#include <numbers>

#include "qtl/common/errors.hpp"
#include "qtl/mlcore/rng.hpp"
#include "qtl/qgrad/gradients.hpp"
#include "qtl/qsim/state_vector.hpp"
#include "support/oracles.hpp"

namespace {

using qtl::qsim::CircuitSpec;
using qtl::qsim::Entangler;

CircuitSpec random_spec(qtl::ml::Rng& rng, int n, int d, Entangler e) {
  CircuitSpec spec = CircuitSpec::zeros(n, d, e);
  for (auto& a : spec.embedding_angles) a = rng.uniform(-std::numbers::pi / 2, std::numbers::pi / 2);
  for (auto& a : spec.variational_angles) a = rng.normal(0.0, 2 * std::numbers::pi);
  return spec;
}

double loss(const CircuitSpec& spec, const std::vector<double>& u) {
  const auto z = qtl::qsim::run_ansatz(spec, false);
  double l = 0.0;
  for (std::size_t q = 0; q < z.size(); ++q) l += u[q] * z[q];
  return l;
}

double rel_err(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-4});
}

TEST(Adjoint, MatchesParameterShiftAndFiniteDifferences) {
  qtl::ml::Rng rng(100);
  const Entangler kinds[] = {Entangler::kRing, Entangler::kChain, Entangler::kNone};
  const double h = 1e-5;
  for (int c = 0; c < 100; ++c) {
    const int n = 1 + static_cast<int>(rng.below(5));
    const int d = 1 + static_cast<int>(rng.below(3));
    const CircuitSpec spec = random_spec(rng, n, d, kinds[rng.below(3)]);
    std::vector<double> u(n);
    for (auto& x : u) x = rng.normal();

    const auto adj = qtl::qgrad::circuit_vjp(spec, u);
    const auto ps = qtl::qgrad::parameter_shift_grad(spec, u);
    for (int q = 0; q < n; ++q) {
      EXPECT_NEAR(adj.embedding[q], ps.embedding[q], 1e-8);
      const double fd = qtl::testing::central_difference(
          [&](double x) {
            CircuitSpec s = spec;
            s.embedding_angles[q] = x;
            return loss(s, u);
          },
          spec.embedding_angles[q], h);
      EXPECT_LT(rel_err(adj.embedding[q], fd), 1e-5) << "case " << c << " embedding " << q;
      EXPECT_LT(rel_err(ps.embedding[q], fd), 1e-5);
    }
    for (std::size_t i = 0; i < spec.variational_angles.size(); ++i) {
      EXPECT_NEAR(adj.variational[i], ps.variational[i], 1e-8);
      const double fd = qtl::testing::central_difference(
          [&](double x) {
            CircuitSpec s = spec;
            s.variational_angles[i] = x;
            return loss(s, u);
          },
          spec.variational_angles[i], h);
      EXPECT_LT(rel_err(adj.variational[i], fd), 1e-5) << "case " << c << " theta " << i;
      EXPECT_LT(rel_err(ps.variational[i], fd), 1e-5);
    }
  }
}

TEST(Adjoint, EmbeddingGradientEqualsFirstLayerGradient) {
  qtl::ml::Rng rng(8);
  const CircuitSpec spec = random_spec(rng, 4, 3, Entangler::kRing);
  const std::vector<double> u{0.3, -1.0, 0.5, 2.0};
  const auto g = qtl::qgrad::circuit_vjp(spec, u);
  for (int q = 0; q < 4; ++q) EXPECT_NEAR(g.embedding[q], g.variational[q * 3], 1e-12);
}

TEST(Adjoint, EngineContract) {
  qtl::qgrad::AnsatzEngine engine(3);
  const std::vector<double> u{1.0, 1.0, 1.0};
  EXPECT_THROW(engine.vjp(u), std::logic_error);
  engine.forward(CircuitSpec::zeros(3, 2));
  EXPECT_THROW(engine.vjp(std::vector<double>{1.0}), qtl::ArgumentError);
  EXPECT_THROW(engine.vjp(std::vector<double>{1.0, NAN, 0.0}), qtl::ArgumentError);
  EXPECT_NO_THROW(engine.vjp(u));
  EXPECT_THROW(engine.vjp(u), std::logic_error);
  EXPECT_THROW(engine.forward(CircuitSpec::zeros(4, 2)), qtl::ArgumentError);
}

TEST(Adjoint, EngineReuseIsDeterministic) {
  qtl::ml::Rng rng(4);
  qtl::qgrad::AnsatzEngine engine(5);
  const auto a = random_spec(rng, 5, 3, Entangler::kRing);
  const auto b = random_spec(rng, 5, 3, Entangler::kRing);
  const std::vector<double> u{1, 2, 3, 4, 5};
  engine.forward(a);
  const auto first = engine.vjp(u);
  engine.forward(b);
  engine.vjp(u);
  engine.forward(a);
  const auto again = engine.vjp(u);
  EXPECT_EQ(first.embedding, again.embedding);
  EXPECT_EQ(first.variational, again.variational);
}

TEST(Adjoint, ZeroUpstreamGivesZeroGradient) {
  qtl::ml::Rng rng(6);
  const auto g = qtl::qgrad::circuit_vjp(random_spec(rng, 3, 2, Entangler::kRing), std::vector<double>(3, 0.0));
  for (double v : g.embedding) EXPECT_EQ(v, 0.0);
  for (double v : g.variational) EXPECT_EQ(v, 0.0);
}

std::uint64_t passes_for_adjoint(int n, int d) {
  qtl::ml::Rng rng(1);
  const auto spec = random_spec(rng, n, d, Entangler::kRing);
  qtl::qsim::reset_kernel_passes();
  qtl::qgrad::circuit_vjp(spec, std::vector<double>(n, 1.0));
  return qtl::qsim::kernel_passes();
}

TEST(Adjoint, PassCountIndependentOfAngleCount) {
  // Below the cache-block width every RY layer is one pass, so the cost
  // depends only on depth.
  for (int d = 1; d <= 4; ++d) {
    const auto small = passes_for_adjoint(2, d);
    EXPECT_EQ(small, passes_for_adjoint(6, d)) << "depth " << d;
    EXPECT_EQ(small, passes_for_adjoint(10, d)) << "depth " << d;
    EXPECT_LE(small, static_cast<std::uint64_t>(4 + 6 * d));
  }
}

TEST(Adjoint, FarCheaperThanParameterShift) {
  qtl::ml::Rng rng(2);
  const auto spec = random_spec(rng, 6, 3, Entangler::kRing);
  const std::vector<double> u(6, 1.0);
  qtl::qsim::reset_kernel_passes();
  qtl::qgrad::circuit_vjp(spec, u);
  const auto adjoint = qtl::qsim::kernel_passes();
  qtl::qsim::reset_kernel_passes();
  qtl::qgrad::parameter_shift_grad(spec, u);
  const auto shift = qtl::qsim::kernel_passes();
  EXPECT_GT(shift, 10 * adjoint);
}

}  // namespace
