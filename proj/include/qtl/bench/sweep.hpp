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

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "qtl/bench/bench.hpp"

namespace qtl::bench {

struct SweepRow {
  std::size_t n = 0;
  model::HeadKind head = model::HeadKind::kCdl;
  double mean = 0.0;
  double stddev = 0.0;
  std::uint64_t state_bytes = 0;  // 2^n * 16
};

/// Runs `base` for each n (ascending, within the qubit cap) and each head.
std::vector<SweepRow> scaling_sweep(const std::vector<std::size_t>& n_values,
                                    const BenchProtocol& base,
                                    const std::vector<model::HeadKind>& heads = {
                                        model::HeadKind::kCdl, model::HeadKind::kDqc},
                                    std::vector<BenchResult>* raw = nullptr);

/// Least-squares fits of mean time against n (linear) and against 2^n
/// (exponential), both with an intercept, compared by AIC.
struct GrowthFit {
  double linear_intercept = 0.0, linear_slope = 0.0, linear_rss = 0.0, linear_aic = 0.0;
  double exp_intercept = 0.0, exp_slope = 0.0, exp_rss = 0.0, exp_aic = 0.0;
  bool exponential_preferred() const { return exp_aic < linear_aic; }
};

GrowthFit fit_growth(std::span<const double> n, std::span<const double> seconds);

/// Columns: n, head, mean_s, std_s, state_bytes.
std::string sweep_table(const std::vector<SweepRow>& rows);

}  // namespace qtl::bench
