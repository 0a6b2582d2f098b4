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

#include "qtl/mlcore/layers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "qtl/common/errors.hpp"

namespace qtl::ml {

namespace {
void require(bool ok, const char* what) {
  if (!ok) throw ArgumentError(what);
}
}  // namespace

LinearLayer LinearLayer::zeros(std::size_t in_dim, std::size_t out_dim) {
  LinearLayer layer;
  layer.in_dim = in_dim;
  layer.out_dim = out_dim;
  layer.weights.assign(in_dim * out_dim, 0.0);
  layer.bias.assign(out_dim, 0.0);
  return layer;
}

std::vector<double> linear_forward(const LinearLayer& layer, std::span<const double> x) {
  std::vector<double> y(layer.out_dim);
  linear_forward(layer, x, y);
  return y;
}

void linear_forward(const LinearLayer& layer, std::span<const double> x, std::span<double> y) {
  if (x.size() != layer.in_dim) {
    throw ArgumentError("linear_forward: input length " + std::to_string(x.size()) +
                        " != in_dim " + std::to_string(layer.in_dim));
  }
  require(y.size() == layer.out_dim, "linear_forward: output length mismatch");
  const std::size_t k = layer.out_dim;
  std::copy(layer.bias.begin(), layer.bias.end(), y.begin());
  for (std::size_t i = 0; i < layer.in_dim; ++i) {
    const double xi = x[i];
    if (xi == 0.0) continue;
    const double* w = layer.weights.data() + i * k;
    for (std::size_t j = 0; j < k; ++j) y[j] += w[j] * xi;
  }
}

void linear_backward(const LinearLayer& layer, std::span<const double> x,
                     std::span<const double> dy, std::span<double> grad_weights,
                     std::span<double> grad_bias, std::span<double> dx) {
  require(x.size() == layer.in_dim, "linear_backward: input length mismatch");
  require(dy.size() == layer.out_dim, "linear_backward: upstream length mismatch");
  require(grad_weights.size() == layer.weights.size(), "linear_backward: weight grad size");
  require(grad_bias.size() == layer.out_dim, "linear_backward: bias grad size");
  require(dx.empty() || dx.size() == layer.in_dim, "linear_backward: dx size");
  const std::size_t k = layer.out_dim;
  for (std::size_t j = 0; j < k; ++j) grad_bias[j] += dy[j];
  for (std::size_t i = 0; i < layer.in_dim; ++i) {
    const double xi = x[i];
    double* g = grad_weights.data() + i * k;
    for (std::size_t j = 0; j < k; ++j) g[j] += xi * dy[j];
  }
  if (!dx.empty()) {
    for (std::size_t i = 0; i < layer.in_dim; ++i) {
      const double* w = layer.weights.data() + i * k;
      double acc = 0.0;
      for (std::size_t j = 0; j < k; ++j) acc += w[j] * dy[j];
      dx[i] = acc;
    }
  }
}

std::vector<double> tanh_rescale(std::span<const double> x) {
  std::vector<double> y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = std::numbers::pi / 2 * std::tanh(x[i]);
  return y;
}

std::vector<double> tanh_rescale_backward(std::span<const double> y, std::span<const double> dy) {
  require(y.size() == dy.size(), "tanh_rescale_backward: length mismatch");
  constexpr double kHalfPi = std::numbers::pi / 2;
  std::vector<double> dx(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double t = y[i] / kHalfPi;
    dx[i] = dy[i] * kHalfPi * (1.0 - t * t);
  }
  return dx;
}

double sigmoid(double x) {
  // Clamped to the open interval so downstream probabilities never hit 0 or 1.
  constexpr double kLo = std::numeric_limits<double>::min();
  constexpr double kHi = 1.0 - std::numeric_limits<double>::epsilon() / 2;
  double s;
  if (x >= 0) {
    s = 1.0 / (1.0 + std::exp(-x));
  } else {
    const double e = std::exp(x);
    s = e / (1.0 + e);
  }
  return std::clamp(s, kLo, kHi);
}

std::vector<double> sigmoid(std::span<const double> x) {
  std::vector<double> y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = sigmoid(x[i]);
  return y;
}

double bce_loss(std::span<const double> probabilities, std::span<const double> targets) {
  if (probabilities.size() != targets.size()) {
    throw ArgumentError("bce_loss: prediction and target shapes differ");
  }
  require(!targets.empty(), "bce_loss: empty input");
  double sum = 0.0;
  for (std::size_t i = 0; i < targets.size(); ++i) {
    const double p = std::clamp(probabilities[i], kProbClamp, 1.0 - kProbClamp);
    const double y = targets[i];
    sum -= y * std::log(p) + (1.0 - y) * std::log1p(-p);
  }
  return sum / static_cast<double>(targets.size());
}

double bce_with_logits(std::span<const double> logits, std::span<const double> targets) {
  if (logits.size() != targets.size()) {
    throw ArgumentError("bce_with_logits: logit and target shapes differ");
  }
  require(!targets.empty(), "bce_with_logits: empty input");
  double sum = 0.0;
  for (std::size_t i = 0; i < targets.size(); ++i) {
    const double z = logits[i];
    const double softplus = std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z)));
    sum += softplus - targets[i] * z;
  }
  return sum / static_cast<double>(targets.size());
}

void bce_with_logits_grad(std::span<const double> logits, std::span<const double> targets,
                          double count, std::span<double> grad) {
  require(logits.size() == targets.size() && grad.size() == logits.size(),
          "bce_with_logits_grad: shape mismatch");
  for (std::size_t i = 0; i < logits.size(); ++i) {
    grad[i] = (sigmoid(logits[i]) - targets[i]) / count;
  }
}

LinearLayer init_lecun_normal(Rng& rng, std::size_t fan_in, std::size_t fan_out) {
  require(fan_in >= 1 && fan_out >= 1, "init_lecun_normal: dimensions must be positive");
  LinearLayer layer = LinearLayer::zeros(fan_in, fan_out);
  const double stddev = 1.0 / std::sqrt(static_cast<double>(fan_in));
  for (auto& w : layer.weights) w = rng.normal(0.0, stddev);
  return layer;
}

std::vector<double> init_variational_angles(Rng& rng, std::size_t num_qubits, std::size_t depth) {
  require(num_qubits >= 1 && depth >= 1, "init_variational_angles: n and d must be positive");
  std::vector<double> angles(num_qubits * depth);
  for (auto& a : angles) a = rng.normal(0.0, 2.0 * std::numbers::pi);
  return angles;
}

}  // namespace qtl::ml
