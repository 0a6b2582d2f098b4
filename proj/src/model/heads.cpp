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

#include "qtl/model/heads.hpp"

#include "qtl/common/errors.hpp"

namespace qtl::model {

std::string to_string(HeadKind k) { return k == HeadKind::kCdl ? "cdl" : "dqc"; }

HeadKind head_kind_from_string(const std::string& s) {
  if (s == "cdl") return HeadKind::kCdl;
  if (s == "dqc") return HeadKind::kDqc;
  throw ConfigError("unknown head '" + s + "' (expected cdl or dqc)");
}

ParameterCounts cdl_parameter_counts(std::size_t feature_dim, std::size_t num_labels) {
  return {feature_dim * num_labels + num_labels, 0, 0};
}

ParameterCounts dqc_parameter_counts(std::size_t feature_dim, std::size_t num_labels,
                                     std::size_t depth) {
  return {feature_dim * num_labels + num_labels, num_labels * depth,
          num_labels * num_labels + num_labels};
}

ParameterCounts count_parameters(const CdlParams& p) {
  return {p.head.parameter_count(), 0, 0};
}

ParameterCounts count_parameters(const DqcParams& p) {
  return {p.w_in.parameter_count(), p.theta.size(), p.w_out.parameter_count()};
}

CdlParams init_cdl(ml::Rng& rng, std::size_t feature_dim, std::size_t num_labels) {
  return {ml::init_lecun_normal(rng, feature_dim, num_labels)};
}

DqcParams init_dqc(ml::Rng& rng, std::size_t feature_dim, std::size_t num_labels, int depth,
                   qsim::Entangler entangler) {
  qsim::check_capacity(static_cast<int>(num_labels));
  if (depth < 1) throw ArgumentError("DQC depth must be at least 1");
  DqcParams p;
  p.w_in = ml::init_lecun_normal(rng, feature_dim, num_labels);
  p.theta = ml::init_variational_angles(rng, num_labels, depth);
  p.w_out = ml::init_lecun_normal(rng, num_labels, num_labels);
  p.depth = depth;
  p.entangler = entangler;
  return p;
}

namespace {

Prediction from_logits(std::vector<double> logits) {
  Prediction pred;
  pred.probabilities = ml::sigmoid(logits);
  pred.logits = std::move(logits);
  return pred;
}

void check_features(std::span<const double> features, std::size_t expected) {
  if (features.size() != expected) {
    throw ArgumentError("feature vector length " + std::to_string(features.size()) +
                        " does not match head input " + std::to_string(expected));
  }
}

class CdlWorkspace final : public HeadWorkspace {};

class DqcWorkspace final : public HeadWorkspace {
 public:
  explicit DqcWorkspace(int n) : engine(n) {}
  qgrad::AnsatzEngine engine;
  qsim::CircuitSpec spec;
  std::vector<double> expectations;
  bool primed = false;
};

}  // namespace

Prediction cdl_forward(const CdlParams& params, std::span<const double> features) {
  check_features(features, params.head.in_dim);
  return from_logits(ml::linear_forward(params.head, features));
}

Prediction dqc_forward(const DqcParams& params, std::span<const double> features) {
  DqcHead head(params);
  auto ws = head.make_workspace();
  return head.forward(features, *ws);
}

DqcGradients dqc_backward(const DqcParams& params, std::span<const double> features,
                          std::span<const double> upstream) {
  DqcHead head(params);
  auto ws = head.make_workspace();
  head.forward(features, *ws);
  Gradients g = head.zero_gradients();
  DqcGradients out;
  out.features.assign(features.size(), 0.0);
  head.backward(features, upstream, *ws, g, out.features);
  out.w_in = {std::move(g[0]), std::move(g[1])};
  out.theta = std::move(g[2]);
  out.w_out = {std::move(g[3]), std::move(g[4])};
  return out;
}

std::vector<std::size_t> Head::block_sizes() {
  std::vector<std::size_t> sizes;
  for (const auto& b : parameters()) sizes.push_back(b.values.size());
  return sizes;
}

Gradients Head::zero_gradients() {
  Gradients g;
  for (std::size_t n : block_sizes()) g.emplace_back(n, 0.0);
  return g;
}

std::vector<ParamBlock> CdlHead::parameters() {
  return {{"head.weights", params_.head.weights}, {"head.bias", params_.head.bias}};
}

std::unique_ptr<HeadWorkspace> CdlHead::make_workspace() const {
  return std::make_unique<CdlWorkspace>();
}

Prediction CdlHead::forward(std::span<const double> features, HeadWorkspace&) const {
  return cdl_forward(params_, features);
}

void CdlHead::backward(std::span<const double> features, std::span<const double> upstream,
                       HeadWorkspace&, Gradients& grads, std::span<double> feature_grad) const {
  check_features(features, feature_dim());
  if (upstream.size() != num_labels() || grads.size() != 2) {
    throw ArgumentError("cdl backward: shape mismatch");
  }
  ml::linear_backward(params_.head, features, upstream, grads[0], grads[1], feature_grad);
}

DqcHead::DqcHead(DqcParams params) : params_(std::move(params)) {
  qsim::check_capacity(static_cast<int>(params_.num_qubits()));
  const std::size_t n = params_.num_qubits();
  if (params_.w_out.in_dim != n || params_.w_out.out_dim != n ||
      params_.theta.size() != n * static_cast<std::size_t>(params_.depth)) {
    throw ArgumentError("DQC parameter shapes are inconsistent");
  }
}

std::vector<ParamBlock> DqcHead::parameters() {
  return {{"w_in.weights", params_.w_in.weights},
          {"w_in.bias", params_.w_in.bias},
          {"theta", params_.theta},
          {"w_out.weights", params_.w_out.weights},
          {"w_out.bias", params_.w_out.bias}};
}

std::unique_ptr<HeadWorkspace> DqcHead::make_workspace() const {
  return std::make_unique<DqcWorkspace>(static_cast<int>(params_.num_qubits()));
}

Prediction DqcHead::forward(std::span<const double> features, HeadWorkspace& base) const {
  check_features(features, feature_dim());
  auto& ws = dynamic_cast<DqcWorkspace&>(base);
  const auto pre = ml::linear_forward(params_.w_in, features);
  ws.spec.num_qubits = static_cast<int>(params_.num_qubits());
  ws.spec.depth = params_.depth;
  ws.spec.entangler = params_.entangler;
  ws.spec.embedding_angles = ml::tanh_rescale(pre);
  ws.spec.variational_angles = params_.theta;
  ws.expectations = ws.engine.forward(ws.spec);
  ws.primed = true;
  return from_logits(ml::linear_forward(params_.w_out, ws.expectations));
}

void DqcHead::backward(std::span<const double> features, std::span<const double> upstream,
                       HeadWorkspace& base, Gradients& grads,
                       std::span<double> feature_grad) const {
  auto& ws = dynamic_cast<DqcWorkspace&>(base);
  if (!ws.primed) throw std::logic_error("DqcHead::backward without a matching forward");
  check_features(features, feature_dim());
  if (upstream.size() != num_labels() || grads.size() != 5) {
    throw ArgumentError("dqc backward: shape mismatch");
  }
  ws.primed = false;
  const std::size_t n = params_.num_qubits();
  std::vector<double> d_expectations(n);
  ml::linear_backward(params_.w_out, ws.expectations, upstream, grads[3], grads[4], d_expectations);
  const auto circuit = ws.engine.vjp(d_expectations);
  for (std::size_t i = 0; i < circuit.variational.size(); ++i) grads[2][i] += circuit.variational[i];
  const auto d_pre = ml::tanh_rescale_backward(ws.spec.embedding_angles, circuit.embedding);
  ml::linear_backward(params_.w_in, features, d_pre, grads[0], grads[1], feature_grad);
}

std::unique_ptr<Head> make_head(HeadKind kind, std::size_t feature_dim, std::size_t num_labels,
                                int depth, ml::Rng& init_rng) {
  if (kind == HeadKind::kCdl) {
    return std::make_unique<CdlHead>(init_cdl(init_rng, feature_dim, num_labels));
  }
  return std::make_unique<DqcHead>(init_dqc(init_rng, feature_dim, num_labels, depth));
}

}  // namespace qtl::model
