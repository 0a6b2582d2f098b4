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
#include <filesystem>
#include <numbers>

#include "qtl/common/errors.hpp"
#include "qtl/model/extractor.hpp"
#include "qtl/model/heads.hpp"
#include "qtl/qgrad/gradients.hpp"
#include "support/oracles.hpp"

namespace {

using namespace qtl::model;
using qtl::ml::Rng;

double rel_err(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-4});
}

std::vector<double> random_vector(Rng& rng, std::size_t n, double scale = 1.0) {
  std::vector<double> v(n);
  for (auto& x : v) x = rng.normal(0.0, scale);
  return v;
}

TEST(ParameterCounts, ComponentTableValues) {
  const std::size_t labels[] = {8, 14, 19};
  const std::size_t pre[] = {16392, 28686, 38931};
  const std::size_t quantum[] = {24, 42, 57};
  const std::size_t post[] = {72, 210, 380};
  for (int i = 0; i < 3; ++i) {
    const auto dqc = dqc_parameter_counts(2048, labels[i], 3);
    EXPECT_EQ(dqc.classical_preprocess, pre[i]);
    EXPECT_EQ(dqc.quantum, quantum[i]);
    EXPECT_EQ(dqc.classical_postprocess, post[i]);
    EXPECT_EQ(cdl_parameter_counts(2048, labels[i]).total(), pre[i]);
  }
}

TEST(ParameterCounts, InitialisedHeadsAgreeWithClosedForms) {
  Rng rng(1);
  for (std::size_t n : {8u, 14u, 19u}) {
    EXPECT_EQ(count_parameters(init_dqc(rng, 2048, n, 3)), dqc_parameter_counts(2048, n, 3));
    EXPECT_EQ(count_parameters(init_cdl(rng, 2048, n)), cdl_parameter_counts(2048, n));
    auto head = make_head(HeadKind::kDqc, 2048, n, 3, rng);
    std::size_t total = 0;
    for (auto s : head->block_sizes()) total += s;
    EXPECT_EQ(total, dqc_parameter_counts(2048, n, 3).total());
  }
}

TEST(Cdl, ZeroHeadPredictsHalf) {
  CdlParams p{qtl::ml::LinearLayer::zeros(4, 3)};
  const auto pred = cdl_forward(p, std::vector<double>{1, 2, 3, 4});
  for (double v : pred.probabilities) EXPECT_EQ(v, 0.5);
  EXPECT_THROW(cdl_forward(p, std::vector<double>{1, 2}), qtl::ArgumentError);
}

TEST(Dqc, ZeroParametersPredictHalf) {
  DqcParams p;
  p.w_in = qtl::ml::LinearLayer::zeros(5, 3);
  p.theta.assign(9, 0.0);
  p.w_out = qtl::ml::LinearLayer::zeros(3, 3);
  p.depth = 3;
  const auto pred = dqc_forward(p, std::vector<double>{1, -2, 3, 0.5, 7});
  for (double v : pred.logits) EXPECT_EQ(v, 0.0);
  for (double v : pred.probabilities) EXPECT_EQ(v, 0.5);
}

TEST(Dqc, ProbabilitiesAreSigmoidOfLogitsAndDeterministic) {
  Rng rng(2);
  const auto p = init_dqc(rng, 16, 4, 3);
  const auto f = random_vector(rng, 16);
  const auto a = dqc_forward(p, f);
  const auto b = dqc_forward(p, f);
  EXPECT_EQ(a.logits, b.logits);
  for (std::size_t k = 0; k < 4; ++k) {
    EXPECT_NEAR(a.probabilities[k], 1 / (1 + std::exp(-a.logits[k])), 1e-12);
    EXPECT_GT(a.probabilities[k], 0.0);
    EXPECT_LT(a.probabilities[k], 1.0);
  }
}

TEST(Dqc, CapacityAndDepthChecks) {
  Rng rng(3);
  EXPECT_THROW(init_dqc(rng, 8, qtl::qsim::kMaxQubits + 1, 3), qtl::CapacityError);
  EXPECT_THROW(init_dqc(rng, 8, 4, 0), qtl::ArgumentError);
}

double head_loss(const DqcParams& p, const std::vector<double>& f, const std::vector<double>& y) {
  return qtl::ml::bce_with_logits(dqc_forward(p, f).logits, y);
}

TEST(Dqc, EndToEndGradientsMatchFiniteDifferences) {
  Rng rng(99);
  DqcParams p = init_dqc(rng, 5, 3, 2);
  for (auto& b : p.w_in.bias) b = rng.normal(0, 0.5);
  for (auto& b : p.w_out.bias) b = rng.normal(0, 0.5);
  const auto f = random_vector(rng, 5);
  const std::vector<double> y{1, 0, 1};
  const auto pred = dqc_forward(p, f);
  std::vector<double> upstream(3);
  qtl::ml::bce_with_logits_grad(pred.logits, y, 3.0, upstream);
  const auto g = dqc_backward(p, f, upstream);

  auto check = [&](std::vector<double>& values,
                   const std::vector<double>& grads, const char* what) {
    for (std::size_t i = 0; i < values.size(); ++i) {
      const double saved = values[i];
      const double fd = qtl::testing::central_difference(
          [&](double v) { values[i] = v; const double l = head_loss(p, f, y); values[i] = saved; return l; },
          saved, 1e-5);
      EXPECT_LT(rel_err(grads[i], fd), 1e-4) << what << "[" << i << "]";
    }
  };
  check(p.w_in.weights, g.w_in.weights, "w_in.weights");
  check(p.w_in.bias, g.w_in.bias, "w_in.bias");
  check(p.theta, g.theta, "theta");
  check(p.w_out.weights, g.w_out.weights, "w_out.weights");
  check(p.w_out.bias, g.w_out.bias, "w_out.bias");
  auto feats = f;
  for (std::size_t i = 0; i < feats.size(); ++i) {
    const double fd = qtl::testing::central_difference(
        [&](double v) { auto ff = f; ff[i] = v; return head_loss(p, ff, y); }, f[i], 1e-5);
    EXPECT_LT(rel_err(g.features[i], fd), 1e-4) << "features[" << i << "]";
  }
}

TEST(Dqc, ThetaGradientMatchesParameterShiftChain) {
  Rng rng(5);
  const DqcParams p = init_dqc(rng, 6, 4, 3);
  const auto f = random_vector(rng, 6);
  const std::vector<double> upstream{0.2, -0.4, 0.1, 0.3};
  const auto g = dqc_backward(p, f, upstream);

  qtl::qsim::CircuitSpec spec = qtl::qsim::CircuitSpec::zeros(4, 3);
  spec.embedding_angles = qtl::ml::tanh_rescale(qtl::ml::linear_forward(p.w_in, f));
  spec.variational_angles = p.theta;
  std::vector<double> d_expect(4, 0.0), gw(16, 0.0), gb(4, 0.0);
  const auto z = qtl::qsim::run_ansatz(spec);
  qtl::ml::linear_backward(p.w_out, z, upstream, gw, gb, d_expect);
  const auto ps = qtl::qgrad::parameter_shift_grad(spec, d_expect);
  for (std::size_t i = 0; i < p.theta.size(); ++i) EXPECT_NEAR(g.theta[i], ps.variational[i], 1e-7);
}

TEST(Dqc, ZeroUpstreamGivesZeroGradients) {
  Rng rng(6);
  const DqcParams p = init_dqc(rng, 6, 3, 2);
  const auto g = dqc_backward(p, random_vector(rng, 6), std::vector<double>(3, 0.0));
  for (const auto* v : {&g.w_in.weights, &g.w_in.bias, &g.theta, &g.w_out.weights, &g.w_out.bias}) {
    for (double x : *v) EXPECT_EQ(x, 0.0);
  }
}

TEST(Dqc, NoDeadParametersAtRandomInit) {
  Rng rng(10);
  DqcParams p = init_dqc(rng, 8, 4, 3);
  const auto f = random_vector(rng, 8);
  const std::vector<double> y{1, 0, 0, 1};
  std::size_t total = 0, live = 0;
  for (auto* block : {&p.w_in.weights, &p.w_in.bias, &p.theta, &p.w_out.weights, &p.w_out.bias}) {
    for (double& v : *block) {
      const double saved = v;
      const double fd = qtl::testing::central_difference(
          [&](double x) { v = x; const double l = head_loss(p, f, y); v = saved; return l; }, saved, 1e-4);
      ++total;
      live += std::abs(fd) > 1e-12;
    }
  }
  EXPECT_GE(static_cast<double>(live), 0.99 * static_cast<double>(total));
}

TEST(HeadInterface, WorkspacePathMatchesFreeFunctions) {
  Rng rng(12);
  const DqcParams params = init_dqc(rng, 10, 3, 2);
  DqcHead dqc(params);
  Head& head = dqc;
  auto ws = head.make_workspace();
  const auto f = random_vector(rng, 10);
  const std::vector<double> up{0.5, -0.5, 0.25};
  const auto pred = head.forward(f, *ws);
  EXPECT_EQ(pred.logits, dqc_forward(params, f).logits);
  auto grads = head.zero_gradients();
  head.backward(f, up, *ws, grads);
  const auto ref = dqc_backward(params, f, up);
  EXPECT_EQ(grads[0], ref.w_in.weights);
  EXPECT_EQ(grads[2], ref.theta);
  EXPECT_EQ(grads[4], ref.w_out.bias);
  EXPECT_THROW(head.backward(f, up, *ws, grads), std::logic_error);
}

TEST(HeadInterface, BlockNamesAndCloneIndependence) {
  Rng rng(13);
  auto dqc = make_head(HeadKind::kDqc, 6, 3, 2, rng);
  std::vector<std::string> names;
  for (const auto& b : dqc->parameters()) names.push_back(b.name);
  EXPECT_EQ(names, (std::vector<std::string>{"w_in.weights", "w_in.bias", "theta", "w_out.weights", "w_out.bias"}));
  auto copy = dqc->clone();
  copy->parameters()[2].values[0] += 1.0;
  EXPECT_NE(copy->parameters()[2].values[0], dqc->parameters()[2].values[0]);

  auto cdl = make_head(HeadKind::kCdl, 6, 3, 2, rng);
  EXPECT_EQ(cdl->kind(), HeadKind::kCdl);
  EXPECT_EQ(cdl->parameters().size(), 2u);
  EXPECT_EQ(head_kind_from_string("dqc"), HeadKind::kDqc);
  EXPECT_THROW(head_kind_from_string("cnn"), qtl::ConfigError);
}

TEST(HeadInterface, CdlBackwardMatchesFiniteDifferences) {
  Rng rng(14);
  CdlHead head(init_cdl(rng, 7, 3));
  const Head& base = head;
  auto ws = head.make_workspace();
  const auto f = random_vector(rng, 7);
  const std::vector<double> y{0, 1, 1};
  const auto pred = head.forward(f, *ws);
  std::vector<double> up(3);
  qtl::ml::bce_with_logits_grad(pred.logits, y, 3.0, up);
  auto grads = head.zero_gradients();
  base.backward(f, up, *ws, grads);
  auto blocks = head.parameters();
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    for (std::size_t i = 0; i < blocks[b].values.size(); ++i) {
      double& v = blocks[b].values[i];
      const double saved = v;
      const double fd = qtl::testing::central_difference(
          [&](double x) {
            v = x;
            const double l = qtl::ml::bce_with_logits(head.forward(f, *ws).logits, y);
            v = saved;
            return l;
          },
          saved, 1e-5);
      EXPECT_LT(rel_err(grads[b][i], fd), 1e-5);
    }
  }
}

TEST(Extractor, ZeroInputGivesZeroFeatures) {
  ExtractorConfig cfg;
  FrozenProjection fx(cfg);
  EXPECT_EQ(fx.feature_dim(), 2048u);
  EXPECT_EQ(fx.pooled_dim(), 192u);
  const auto f = fx.extract(qtl::FloatTensor::zeros({3, 64, 64}));
  for (double v : f) EXPECT_EQ(v, 0.0);
}

TEST(Extractor, DeterministicBoundedAndSeeded) {
  ExtractorConfig cfg;
  cfg.height = cfg.width = 16;
  cfg.pool = 4;
  cfg.feature_dim = 64;
  Rng rng(1);
  auto img = qtl::FloatTensor::zeros({3, 16, 16});
  for (auto& v : img.data) v = static_cast<float>(rng.normal());
  const auto a = FrozenProjection(cfg).extract(img);
  EXPECT_EQ(a, FrozenProjection(cfg).extract(img));
  for (double v : a) EXPECT_LT(std::abs(v), 1.0);
  cfg.seed += 1;
  EXPECT_NE(a, FrozenProjection(cfg).extract(img));
}

TEST(Extractor, ShapeErrors) {
  ExtractorConfig cfg;
  FrozenProjection fx(cfg);
  EXPECT_THROW(fx.extract(qtl::FloatTensor::zeros({3, 32, 32})), qtl::ArgumentError);
  cfg.pool = 7;
  EXPECT_THROW(FrozenProjection{cfg}, qtl::ArgumentError);
}

TEST(Extractor, PrecomputedTableRoundTrip) {
  const auto path = std::filesystem::temp_directory_path() / "qtl_test_features.tsv";
  PrecomputedFeatures::save(path, {{"a", {0.25, -1.5, 3.0}}, {"b", {1e-300, 0.0, -2.0}}});
  const auto table = PrecomputedFeatures::load(path);
  EXPECT_EQ(table.feature_dim(), 3u);
  EXPECT_EQ(table.size(), 2u);
  EXPECT_EQ(table.lookup("a"), (std::vector<double>{0.25, -1.5, 3.0}));
  EXPECT_EQ(table.lookup("b")[0], 1e-300);
  EXPECT_THROW(table.lookup("zzz"), qtl::LookupError);
  std::filesystem::remove(path);
}

TEST(Extractor, KindNames) {
  EXPECT_EQ(extractor_kind_from_string(to_string(ExtractorKind::kPrecomputed)), ExtractorKind::kPrecomputed);
  EXPECT_THROW(extractor_kind_from_string("resnet"), qtl::ConfigError);
}

}  // namespace
