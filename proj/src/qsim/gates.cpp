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

#include "qtl/qsim/gates.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <string>

#include "qtl/common/errors.hpp"

namespace qtl::qsim {

namespace {

// Qubits below this index are handled inside cache-resident blocks of
// 2^kBlockBits amplitudes by the fused layer kernels.
constexpr int kBlockBits = 11;

void check_qubit(const StateVector& state, int q) {
  if (q < 0 || q >= state.num_qubits()) {
    throw IndexError("qubit index " + std::to_string(q) + " out of range for " +
                     std::to_string(state.num_qubits()) + "-qubit state");
  }
}

void check_angle(double angle) {
  if (!std::isfinite(angle)) throw ArgumentError("rotation angle must be finite");
}

// Rotation by a real 2x2 matrix [[c, -s], [s, c]] on qubit q of amps[begin, end).
inline void rotate_range(Amplitude* amps, std::size_t count, int q, double c, double s) {
  const std::size_t stride = qubit_mask(q);
  for (std::size_t base = 0; base < count; base += 2 * stride) {
    Amplitude* lo = amps + base;
    Amplitude* hi = lo + stride;
    for (std::size_t k = 0; k < stride; ++k) {
      const Amplitude a = lo[k];
      const Amplitude b = hi[k];
      lo[k] = c * a - s * b;
      hi[k] = s * a + c * b;
    }
  }
}

// Accumulates Re(conj(l_hi) p_lo - conj(l_lo) p_hi) then rotates both by the
// inverse RY.
inline double rotate_back_with_grad(Amplitude* psi, Amplitude* lam, std::size_t count, int q,
                                    double c, double s) {
  const std::size_t stride = qubit_mask(q);
  double grad = 0.0;
  for (std::size_t base = 0; base < count; base += 2 * stride) {
    Amplitude* plo = psi + base;
    Amplitude* phi = plo + stride;
    Amplitude* llo = lam + base;
    Amplitude* lhi = llo + stride;
    for (std::size_t k = 0; k < stride; ++k) {
      const Amplitude pa = plo[k], pb = phi[k];
      const Amplitude la = llo[k], lb = lhi[k];
      grad += lb.real() * pa.real() + lb.imag() * pa.imag() - la.real() * pb.real() -
              la.imag() * pb.imag();
      // RY(-phi) = [[c, s], [-s, c]]
      plo[k] = c * pa + s * pb;
      phi[k] = -s * pa + c * pb;
      llo[k] = c * la + s * lb;
      lhi[k] = -s * la + c * lb;
    }
  }
  return grad;
}

}  // namespace

void apply_hadamard(StateVector& state, int q) {
  check_qubit(state, q);
  const double r = 1.0 / std::numbers::sqrt2;
  const std::size_t stride = qubit_mask(q);
  auto amps = state.amplitudes();
  for (std::size_t base = 0; base < amps.size(); base += 2 * stride) {
    for (std::size_t k = base; k < base + stride; ++k) {
      const Amplitude a = amps[k];
      const Amplitude b = amps[k + stride];
      amps[k] = r * (a + b);
      amps[k + stride] = r * (a - b);
    }
  }
  count_kernel_pass();
}

void apply_ry(StateVector& state, int q, double angle) {
  check_qubit(state, q);
  check_angle(angle);
  rotate_range(state.amplitudes().data(), state.size(), q, std::cos(angle / 2),
               std::sin(angle / 2));
  count_kernel_pass();
}

void apply_cnot(StateVector& state, int control, int target) {
  check_qubit(state, control);
  check_qubit(state, target);
  if (control == target) throw ArgumentError("cnot: control and target must differ");
  const std::size_t cmask = qubit_mask(control);
  const std::size_t tmask = qubit_mask(target);
  auto amps = state.amplitudes();
  for (std::size_t k = 0; k < amps.size(); ++k) {
    if ((k & cmask) && !(k & tmask)) std::swap(amps[k], amps[k | tmask]);
  }
  count_kernel_pass();
}

double expval_z(const StateVector& state, int q) {
  check_qubit(state, q);
  const std::size_t mask = qubit_mask(q);
  double value = 0.0;
  auto amps = state.amplitudes();
  for (std::size_t k = 0; k < amps.size(); ++k) {
    const double p = std::norm(amps[k]);
    value += (k & mask) ? -p : p;
  }
  count_kernel_pass();
  return value;
}

std::vector<double> expvals_z(const StateVector& state) {
  std::vector<double> scratch;
  return expvals_z(state, scratch);
}

std::vector<double> expvals_z(const StateVector& state, std::vector<double>& scratch) {
  const int n = state.num_qubits();
  auto amps = state.amplitudes();
  scratch.resize(amps.size());
  for (std::size_t k = 0; k < amps.size(); ++k) scratch[k] = std::norm(amps[k]);
  std::vector<double> values(n);
  std::size_t len = amps.size();
  for (int q = n - 1; q >= 0; --q) {
    const std::size_t half = len / 2;
    double lower = 0.0, upper = 0.0;
    for (std::size_t k = 0; k < half; ++k) {
      lower += scratch[k];
      upper += scratch[k + half];
      scratch[k] += scratch[k + half];
    }
    values[q] = lower - upper;
    len = half;
  }
  count_kernel_pass();
  return values;
}

void prepare_ry_product_state(StateVector& state, std::span<const double> angles) {
  const int n = state.num_qubits();
  if (angles.size() != static_cast<std::size_t>(n)) {
    throw ArgumentError("prepare_ry_product_state: need one angle per qubit");
  }
  auto amps = state.amplitudes();
  amps[0] = Amplitude{1.0, 0.0};
  // RY(a) H|0> = (cos(a/2) - sin(a/2), sin(a/2) + cos(a/2)) / sqrt2
  std::size_t len = 1;
  for (int q = 0; q < n; ++q) {
    check_angle(angles[q]);
    const double c = std::cos(angles[q] / 2), s = std::sin(angles[q] / 2);
    const double a0 = (c - s) / std::numbers::sqrt2;
    const double a1 = (s + c) / std::numbers::sqrt2;
    for (std::size_t k = 0; k < len; ++k) {
      amps[k + len] = amps[k] * a1;
      amps[k] *= a0;
    }
    len *= 2;
  }
  count_kernel_pass();
}

void apply_ry_layer(StateVector& state, std::span<const double> angles) {
  const int n = state.num_qubits();
  if (angles.size() != static_cast<std::size_t>(n)) {
    throw ArgumentError("apply_ry_layer: need one angle per qubit");
  }
  for (double a : angles) check_angle(a);
  const int low = std::min(n, kBlockBits);
  const std::size_t block = qubit_mask(low);
  Amplitude* amps = state.amplitudes().data();
  for (std::size_t base = 0; base < state.size(); base += block) {
    for (int q = 0; q < low; ++q) {
      rotate_range(amps + base, block, q, std::cos(angles[q] / 2), std::sin(angles[q] / 2));
    }
  }
  count_kernel_pass();
  for (int q = low; q < n; ++q) {
    rotate_range(amps, state.size(), q, std::cos(angles[q] / 2), std::sin(angles[q] / 2));
    count_kernel_pass();
  }
}

void ry_layer_backward(StateVector& psi, StateVector& lambda, std::span<const double> angles,
                       std::span<double> grads) {
  const int n = psi.num_qubits();
  if (lambda.num_qubits() != n || angles.size() != static_cast<std::size_t>(n) ||
      grads.size() != static_cast<std::size_t>(n)) {
    throw ArgumentError("ry_layer_backward: shape mismatch");
  }
  const int low = std::min(n, kBlockBits);
  const std::size_t block = qubit_mask(low);
  Amplitude* p = psi.amplitudes().data();
  Amplitude* l = lambda.amplitudes().data();
  for (int q = n - 1; q >= low; --q) {
    grads[q] += rotate_back_with_grad(p, l, psi.size(), q, std::cos(angles[q] / 2),
                                      std::sin(angles[q] / 2));
    count_kernel_pass();
  }
  for (std::size_t base = 0; base < psi.size(); base += block) {
    for (int q = low - 1; q >= 0; --q) {
      grads[q] += rotate_back_with_grad(p + base, l + base, block, q, std::cos(angles[q] / 2),
                                        std::sin(angles[q] / 2));
    }
  }
  count_kernel_pass();
}

void apply_z_observable(const StateVector& psi, std::span<const double> weights,
                        StateVector& lambda) {
  const int n = psi.num_qubits();
  if (lambda.num_qubits() != n || weights.size() != static_cast<std::size_t>(n)) {
    throw ArgumentError("apply_z_observable: shape mismatch");
  }
  // diag(k) = sum_q w_q (1 - 2 bit_q(k)), split into low/high lookup tables.
  const int low = std::min(n, kBlockBits);
  const int high = n - low;
  double total = 0.0;
  for (double w : weights) total += w;
  std::vector<double> low_tab(qubit_mask(low), 0.0), high_tab(qubit_mask(high), 0.0);
  for (std::size_t k = 1; k < low_tab.size(); ++k) {
    const int b = std::countr_zero(k);
    low_tab[k] = low_tab[k & (k - 1)] + weights[b];
  }
  for (std::size_t k = 1; k < high_tab.size(); ++k) {
    const int b = std::countr_zero(k);
    high_tab[k] = high_tab[k & (k - 1)] + weights[low + b];
  }
  auto src = psi.amplitudes();
  auto dst = lambda.amplitudes();
  const std::size_t low_mask = low_tab.size() - 1;
  for (std::size_t k = 0; k < src.size(); ++k) {
    const double d = total - 2.0 * (low_tab[k & low_mask] + high_tab[k >> low]);
    dst[k] = d * src[k];
  }
  count_kernel_pass();
}

}  // namespace qtl::qsim
