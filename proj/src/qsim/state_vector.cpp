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

#include "qtl/qsim/state_vector.hpp"

#include <string>

#include "qtl/common/errors.hpp"

namespace qtl::qsim {

namespace {
thread_local std::uint64_t g_kernel_passes = 0;
}

std::uint64_t kernel_passes() noexcept { return g_kernel_passes; }
void reset_kernel_passes() noexcept { g_kernel_passes = 0; }
void count_kernel_pass() noexcept { ++g_kernel_passes; }

void check_capacity(int num_qubits) {
  if (num_qubits < 1 || num_qubits > kMaxQubits) {
    std::string need = num_qubits >= 1 && num_qubits < 63
                           ? std::to_string(state_bytes(num_qubits)) + " bytes"
                           : std::string("an unrepresentable amount");
    throw CapacityError("qubit count " + std::to_string(num_qubits) + " outside [1, " +
                        std::to_string(kMaxQubits) + "]: a state needs 2^n x 16 bytes (" +
                        need + ")");
  }
}

StateVector::StateVector(int num_qubits) : num_qubits_(num_qubits) {
  check_capacity(num_qubits);
  amps_.assign(std::size_t{1} << num_qubits, Amplitude{0.0, 0.0});
  amps_[0] = Amplitude{1.0, 0.0};
}

double StateVector::norm_squared() const {
  double sum = 0.0;
  for (const auto& a : amps_) sum += std::norm(a);
  return sum;
}

void StateVector::reset_to_zero_state() {
  std::fill(amps_.begin(), amps_.end(), Amplitude{0.0, 0.0});
  amps_[0] = Amplitude{1.0, 0.0};
}

void StateVector::swap_storage(std::vector<Amplitude>& other) {
  if (other.size() != amps_.size()) {
    throw ArgumentError("swap_storage: size mismatch");
  }
  amps_.swap(other);
}

StateVector init_zero_state(int num_qubits) { return StateVector(num_qubits); }

}  // namespace qtl::qsim
