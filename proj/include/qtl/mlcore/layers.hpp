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
#include <vector>

#include "qtl/mlcore/rng.hpp"

namespace qtl::ml {

/// Fully connected layer y = W^T x + b with W stored in x out row-major.
struct LinearLayer {
  std::size_t in_dim = 0;
  std::size_t out_dim = 0;
  std::vector<double> weights;  // in_dim * out_dim, weights[i * out_dim + j]
  std::vector<double> bias;     // out_dim

  static LinearLayer zeros(std::size_t in_dim, std::size_t out_dim);
  std::size_t parameter_count() const { return in_dim * out_dim + out_dim; }
};

struct LinearGradients {
  std::vector<double> weights;
  std::vector<double> bias;
};

std::vector<double> linear_forward(const LinearLayer& layer, std::span<const double> x);
void linear_forward(const LinearLayer& layer, std::span<const double> x, std::span<double> y);

/// Accumulates dW += x dy^T and db += dy into `grads` (sized like `layer`).
/// When `dx` is non-empty it receives W dy.
void linear_backward(const LinearLayer& layer, std::span<const double> x,
                     std::span<const double> dy, std::span<double> grad_weights,
                     std::span<double> grad_bias, std::span<double> dx = {});

/// (pi/2) tanh(x), mapping onto [-pi/2, pi/2].
std::vector<double> tanh_rescale(std::span<const double> x);
/// Gradient through tanh_rescale given its outputs y.
std::vector<double> tanh_rescale_backward(std::span<const double> y, std::span<const double> dy);

double sigmoid(double x);
std::vector<double> sigmoid(std::span<const double> x);

/// Probabilities are clamped to [kProbClamp, 1 - kProbClamp] before the log.
inline constexpr double kProbClamp = 1e-7;

/// Mean over all entries of -[y ln p + (1 - y) ln(1 - p)].
double bce_loss(std::span<const double> probabilities, std::span<const double> targets);
/// Same loss evaluated from logits: softplus(z) - y z, stable for any |z|.
double bce_with_logits(std::span<const double> logits, std::span<const double> targets);
/// d(mean BCE)/d(logit) = (sigmoid(z) - y) / count, written into grad.
void bce_with_logits_grad(std::span<const double> logits, std::span<const double> targets,
                          double count, std::span<double> grad);

/// Weights ~ Normal(0, 1/fan_in), zero bias.
LinearLayer init_lecun_normal(Rng& rng, std::size_t fan_in, std::size_t fan_out);
/// n x d angles ~ Normal(0, (2 pi)^2), row-major by qubit.
std::vector<double> init_variational_angles(Rng& rng, std::size_t num_qubits, std::size_t depth);

}  // namespace qtl::ml
