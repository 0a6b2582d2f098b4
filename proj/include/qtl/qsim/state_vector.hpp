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

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#ifndef QTL_MAX_QUBITS
#define QTL_MAX_QUBITS 24
#endif

namespace qtl::qsim {

/// Hard cap on simulated qubits; a state needs 2^n * 16 bytes.
inline constexpr int kMaxQubits = QTL_MAX_QUBITS;

using Amplitude = std::complex<double>;

/// Qubit q is bit q of the amplitude index, qubit 0 being the least
/// significant bit. Every kernel, the dense oracle and the gradient code
/// use this ordering.
constexpr std::size_t qubit_mask(int q) { return std::size_t{1} << q; }

/// Bytes of amplitude storage needed for n qubits.
constexpr std::uint64_t state_bytes(int num_qubits) {
  return (std::uint64_t{1} << num_qubits) * sizeof(Amplitude);
}

/// Pure n-qubit state: 2^n complex amplitudes, initialised to |0...0>.
class StateVector {
 public:
  explicit StateVector(int num_qubits);

  int num_qubits() const noexcept { return num_qubits_; }
  std::size_t size() const noexcept { return amps_.size(); }
  std::uint64_t storage_bytes() const noexcept { return amps_.size() * sizeof(Amplitude); }

  std::span<Amplitude> amplitudes() noexcept { return amps_; }
  std::span<const Amplitude> amplitudes() const noexcept { return amps_; }
  Amplitude& operator[](std::size_t k) { return amps_[k]; }
  const Amplitude& operator[](std::size_t k) const { return amps_[k]; }

  double norm_squared() const;
  void reset_to_zero_state();
  void swap_storage(std::vector<Amplitude>& other);

 private:
  int num_qubits_;
  std::vector<Amplitude> amps_;
};

StateVector init_zero_state(int num_qubits);

/// Throws CapacityError when n is outside [1, kMaxQubits].
void check_capacity(int num_qubits);

/// Number of full-state kernel passes run on the calling thread. Every gate
/// kernel, fused kernel and expectation sweep bumps it by one; the gradient
/// cost tests read it.
std::uint64_t kernel_passes() noexcept;
void reset_kernel_passes() noexcept;
void count_kernel_pass() noexcept;

}  // namespace qtl::qsim
