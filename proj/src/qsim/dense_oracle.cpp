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

// Dense-matrix reference for the ansatz. Deliberately naive: every gate is
// expanded to a full 2^n x 2^n matrix with Kronecker products and applied by
// matrix-vector multiplication. Shares nothing with the kernel code paths
// except the qubit ordering convention.

#include <cmath>
#include <string>

#include "qtl/common/errors.hpp"
#include "qtl/qsim/ansatz.hpp"

namespace qtl::qsim {

namespace {

struct Matrix {
  std::size_t dim = 0;
  std::vector<Amplitude> data;  // row-major

  explicit Matrix(std::size_t d) : dim(d), data(d * d, Amplitude{}) {}
  Amplitude& at(std::size_t r, std::size_t c) { return data[r * dim + c]; }
  const Amplitude& at(std::size_t r, std::size_t c) const { return data[r * dim + c]; }

  static Matrix identity(std::size_t d) {
    Matrix m(d);
    for (std::size_t i = 0; i < d; ++i) m.at(i, i) = 1.0;
    return m;
  }
};

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.dim * b.dim);
  for (std::size_t i = 0; i < a.dim; ++i)
    for (std::size_t j = 0; j < a.dim; ++j)
      for (std::size_t k = 0; k < b.dim; ++k)
        for (std::size_t l = 0; l < b.dim; ++l)
          out.at(i * b.dim + k, j * b.dim + l) = a.at(i, j) * b.at(k, l);
  return out;
}

Matrix add(const Matrix& a, const Matrix& b) {
  Matrix out(a.dim);
  for (std::size_t i = 0; i < a.data.size(); ++i) out.data[i] = a.data[i] + b.data[i];
  return out;
}

Matrix two_by_two(Amplitude a, Amplitude b, Amplitude c, Amplitude d) {
  Matrix m(2);
  m.at(0, 0) = a;
  m.at(0, 1) = b;
  m.at(1, 0) = c;
  m.at(1, 1) = d;
  return m;
}

// Full operator for one factor per qubit. Qubit 0 is the least significant
// bit, so it is the rightmost factor: U = f[n-1] (x) ... (x) f[0].
Matrix expand(const std::vector<Matrix>& factors) {
  Matrix out = factors.back();
  for (int q = static_cast<int>(factors.size()) - 2; q >= 0; --q) out = kron(out, factors[q]);
  return out;
}

Matrix single_qubit(int n, int q, const Matrix& u) {
  std::vector<Matrix> f(n, Matrix::identity(2));
  f[q] = u;
  return expand(f);
}

Matrix cnot(int n, int control, int target) {
  const Matrix p0 = two_by_two(1, 0, 0, 0);
  const Matrix p1 = two_by_two(0, 0, 0, 1);
  const Matrix x = two_by_two(0, 1, 1, 0);
  std::vector<Matrix> off(n, Matrix::identity(2)), on(n, Matrix::identity(2));
  off[control] = p0;
  on[control] = p1;
  on[target] = x;
  return add(expand(off), expand(on));
}

std::vector<Amplitude> apply(const Matrix& m, const std::vector<Amplitude>& v) {
  std::vector<Amplitude> out(v.size());
  for (std::size_t r = 0; r < m.dim; ++r) {
    Amplitude acc{};
    for (std::size_t c = 0; c < m.dim; ++c) acc += m.at(r, c) * v[c];
    out[r] = acc;
  }
  return out;
}

}  // namespace

DenseOracleResult dense_oracle_state(const CircuitSpec& spec) {
  if (spec.num_qubits > kDenseOracleMaxQubits) {
    throw CapacityError("dense oracle supports at most " + std::to_string(kDenseOracleMaxQubits) +
                        " qubits, got " + std::to_string(spec.num_qubits));
  }
  spec.validate();
  const int n = spec.num_qubits;
  const std::size_t dim = std::size_t{1} << n;
  std::vector<Amplitude> psi(dim, Amplitude{});
  psi[0] = 1.0;

  const double r = 1.0 / std::sqrt(2.0);
  const Matrix h = two_by_two(r, r, r, -r);
  auto ry = [](double a) {
    return two_by_two(std::cos(a / 2), -std::sin(a / 2), std::sin(a / 2), std::cos(a / 2));
  };

  for (int q = 0; q < n; ++q) psi = apply(single_qubit(n, q, h), psi);
  for (int q = 0; q < n; ++q) psi = apply(single_qubit(n, q, ry(spec.embedding_angles[q])), psi);
  for (int layer = 0; layer < spec.depth; ++layer) {
    for (int q = 0; q < n; ++q) psi = apply(single_qubit(n, q, ry(spec.theta(q, layer))), psi);
    for (const auto& [c, t] : entangler_pairs(n, spec.entangler)) psi = apply(cnot(n, c, t), psi);
  }

  DenseOracleResult result;
  result.expectations.assign(n, 0.0);
  for (int q = 0; q < n; ++q) {
    const Matrix z = single_qubit(n, q, two_by_two(1, 0, 0, -1));
    const auto zpsi = apply(z, psi);
    Amplitude e{};
    for (std::size_t k = 0; k < dim; ++k) e += std::conj(psi[k]) * zpsi[k];
    result.expectations[q] = e.real();
  }
  result.state = std::move(psi);
  return result;
}

std::vector<double> dense_oracle(const CircuitSpec& spec) {
  return dense_oracle_state(spec).expectations;
}

}  // namespace qtl::qsim
