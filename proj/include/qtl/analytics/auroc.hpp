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

namespace qtl::analytics {

struct ScoredLabelSet {
  std::string label;
  std::vector<double> scores;
  std::vector<std::uint8_t> truths;
};

/// Mann-Whitney AUROC with half credit for ties:
/// (#concordant + #tied / 2) / (#pos * #neg).
/// UndefinedMetricError when a class is missing; ArgumentError on NaN scores
/// or length mismatch.
double auroc(std::span<const double> scores, std::span<const std::uint8_t> truths);
double auroc(const ScoredLabelSet& set);

/// Unweighted mean; an undefined label rethrows with its name.
double mean_auroc(const std::vector<ScoredLabelSet>& sets);
double mean_auroc(std::span<const double> per_label);

/// Per-label AUROC from a row-major samples x labels score matrix.
std::vector<double> per_label_auroc(std::span<const double> scores,
                                    std::span<const std::uint8_t> truths, std::size_t num_labels,
                                    const std::vector<std::string>& label_names = {});

/// 2 (a_cdl - a_dqc) / (a_cdl + a_dqc).
double pct_diff_auroc(double a_cdl, double a_dqc);

}  // namespace qtl::analytics
