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
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "qtl/mlcore/layers.hpp"
#include "qtl/mlcore/rng.hpp"
#include "qtl/qgrad/gradients.hpp"
#include "qtl/qsim/ansatz.hpp"

namespace qtl::model {

enum class HeadKind { kCdl, kDqc };

std::string to_string(HeadKind k);
HeadKind head_kind_from_string(const std::string& s);

/// Trainable parameters split the way the component table reports them.
struct ParameterCounts {
  std::size_t classical_preprocess = 0;
  std::size_t quantum = 0;
  std::size_t classical_postprocess = 0;

  std::size_t total() const { return classical_preprocess + quantum + classical_postprocess; }
  bool operator==(const ParameterCounts&) const = default;
};

/// CDL: m*n + n in the single linear layer.
ParameterCounts cdl_parameter_counts(std::size_t feature_dim, std::size_t num_labels);
/// DQC: (m*n + n) + n*d + (n*n + n).
ParameterCounts dqc_parameter_counts(std::size_t feature_dim, std::size_t num_labels,
                                     std::size_t depth);

struct Prediction {
  std::vector<double> logits;
  std::vector<double> probabilities;  // sigmoid(logits)
};

struct CdlParams {
  ml::LinearLayer head;  // m -> n
};

struct DqcParams {
  ml::LinearLayer w_in;   // m -> n, followed by tanh rescale
  std::vector<double> theta;  // n x depth RY angles
  ml::LinearLayer w_out;  // n -> n
  int depth = 3;
  qsim::Entangler entangler = qsim::Entangler::kRing;

  std::size_t num_qubits() const { return w_in.out_dim; }
};

ParameterCounts count_parameters(const CdlParams& p);
ParameterCounts count_parameters(const DqcParams& p);

CdlParams init_cdl(ml::Rng& rng, std::size_t feature_dim, std::size_t num_labels);
DqcParams init_dqc(ml::Rng& rng, std::size_t feature_dim, std::size_t num_labels, int depth,
                   qsim::Entangler entangler = qsim::Entangler::kRing);

Prediction cdl_forward(const CdlParams& params, std::span<const double> features);
Prediction dqc_forward(const DqcParams& params, std::span<const double> features);

struct DqcGradients {
  ml::LinearGradients w_in;
  std::vector<double> theta;
  ml::LinearGradients w_out;
  std::vector<double> features;
};

/// Gradients for upstream = dLoss/dlogits.
DqcGradients dqc_backward(const DqcParams& params, std::span<const double> features,
                          std::span<const double> upstream);

/// Named view over one trainable block.
struct ParamBlock {
  std::string name;
  std::span<double> values;
};

/// One gradient vector per parameter block, in parameters() order.
using Gradients = std::vector<std::vector<double>>;

/// Per-thread scratch for forward/backward. The DQC workspace owns a
/// simulator engine, so each worker needs its own.
class HeadWorkspace {
 public:
  virtual ~HeadWorkspace() = default;
};

/// Common surface of the two classification heads.
class Head {
 public:
  virtual ~Head() = default;

  virtual HeadKind kind() const = 0;
  virtual std::size_t num_labels() const = 0;
  virtual std::size_t feature_dim() const = 0;
  virtual ParameterCounts count_parameters() const = 0;

  virtual std::vector<ParamBlock> parameters() = 0;
  std::vector<std::size_t> block_sizes();
  Gradients zero_gradients();

  virtual std::unique_ptr<HeadWorkspace> make_workspace() const = 0;
  virtual Prediction forward(std::span<const double> features, HeadWorkspace& ws) const = 0;
  /// Must follow forward() on the same workspace and features. Accumulates
  /// into `grads`; writes dLoss/dfeatures when `feature_grad` is non-empty.
  virtual void backward(std::span<const double> features, std::span<const double> upstream,
                        HeadWorkspace& ws, Gradients& grads,
                        std::span<double> feature_grad = {}) const = 0;

  virtual std::unique_ptr<Head> clone() const = 0;
};

class CdlHead final : public Head {
 public:
  explicit CdlHead(CdlParams params) : params_(std::move(params)) {}

  HeadKind kind() const override { return HeadKind::kCdl; }
  std::size_t num_labels() const override { return params_.head.out_dim; }
  std::size_t feature_dim() const override { return params_.head.in_dim; }
  ParameterCounts count_parameters() const override { return model::count_parameters(params_); }
  std::vector<ParamBlock> parameters() override;
  std::unique_ptr<HeadWorkspace> make_workspace() const override;
  Prediction forward(std::span<const double> features, HeadWorkspace& ws) const override;
  void backward(std::span<const double> features, std::span<const double> upstream,
                HeadWorkspace& ws, Gradients& grads,
                std::span<double> feature_grad) const override;
  std::unique_ptr<Head> clone() const override { return std::make_unique<CdlHead>(*this); }

  const CdlParams& params() const { return params_; }

 private:
  CdlParams params_;
};

class DqcHead final : public Head {
 public:
  explicit DqcHead(DqcParams params);

  HeadKind kind() const override { return HeadKind::kDqc; }
  std::size_t num_labels() const override { return params_.w_out.out_dim; }
  std::size_t feature_dim() const override { return params_.w_in.in_dim; }
  ParameterCounts count_parameters() const override { return model::count_parameters(params_); }
  std::vector<ParamBlock> parameters() override;
  std::unique_ptr<HeadWorkspace> make_workspace() const override;
  Prediction forward(std::span<const double> features, HeadWorkspace& ws) const override;
  void backward(std::span<const double> features, std::span<const double> upstream,
                HeadWorkspace& ws, Gradients& grads,
                std::span<double> feature_grad) const override;
  std::unique_ptr<Head> clone() const override { return std::make_unique<DqcHead>(*this); }

  const DqcParams& params() const { return params_; }

 private:
  DqcParams params_;
};

/// Seeded construction of either head.
std::unique_ptr<Head> make_head(HeadKind kind, std::size_t feature_dim, std::size_t num_labels,
                                int depth, ml::Rng& init_rng);

}  // namespace qtl::model
