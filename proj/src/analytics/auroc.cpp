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

#include "qtl/analytics/auroc.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "qtl/common/errors.hpp"

namespace qtl::analytics {

double auroc(std::span<const double> scores, std::span<const std::uint8_t> truths) {
  if (scores.size() != truths.size()) throw ArgumentError("scores and truths differ in length");
  std::uint64_t pos = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (std::isnan(scores[i])) throw ArgumentError("NaN score at index " + std::to_string(i));
    if (truths[i] > 1) throw ArgumentError("truth values must be 0 or 1");
    pos += truths[i];
  }
  const std::uint64_t neg = scores.size() - pos;
  if (pos == 0 || neg == 0) {
    throw UndefinedMetricError("AUROC needs at least one positive and one negative");
  }

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  // Doubled mid-ranks stay integral, so the statistic is an exact ratio.
  std::uint64_t doubled_rank_sum = 0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    std::uint64_t group_pos = 0;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) group_pos += truths[order[j++]];
    doubled_rank_sum += group_pos * static_cast<std::uint64_t>(i + 1 + j);
    i = j;
  }
  const std::uint64_t doubled_u = doubled_rank_sum - pos * (pos + 1);
  return static_cast<double>(doubled_u) / static_cast<double>(2 * pos * neg);
}

double auroc(const ScoredLabelSet& set) {
  try {
    return auroc(set.scores, set.truths);
  } catch (const UndefinedMetricError& e) {
    throw UndefinedMetricError("label '" + set.label + "': " + e.what());
  }
}

double mean_auroc(std::span<const double> per_label) {
  if (per_label.empty()) throw UndefinedMetricError("mean AUROC of zero labels");
  double sum = 0.0;
  for (double a : per_label) sum += a;
  return sum / static_cast<double>(per_label.size());
}

double mean_auroc(const std::vector<ScoredLabelSet>& sets) {
  std::vector<double> values;
  values.reserve(sets.size());
  for (const auto& s : sets) values.push_back(auroc(s));
  return mean_auroc(values);
}

std::vector<double> per_label_auroc(std::span<const double> scores,
                                    std::span<const std::uint8_t> truths, std::size_t num_labels,
                                    const std::vector<std::string>& label_names) {
  if (num_labels == 0 || scores.size() != truths.size() || scores.size() % num_labels != 0) {
    throw ArgumentError("score/truth matrices do not match num_labels");
  }
  const std::size_t rows = scores.size() / num_labels;
  std::vector<double> out;
  for (std::size_t k = 0; k < num_labels; ++k) {
    ScoredLabelSet set;
    set.label = k < label_names.size() ? label_names[k] : "label_" + std::to_string(k);
    for (std::size_t i = 0; i < rows; ++i) {
      set.scores.push_back(scores[i * num_labels + k]);
      set.truths.push_back(truths[i * num_labels + k]);
    }
    out.push_back(auroc(set));
  }
  return out;
}

double pct_diff_auroc(double a_cdl, double a_dqc) {
  if (!(a_cdl >= 0.0 && a_cdl <= 1.0) || !(a_dqc >= 0.0 && a_dqc <= 1.0)) {
    throw ArgumentError("AUROC values must lie in [0, 1]");
  }
  if (a_cdl + a_dqc == 0.0) throw UndefinedMetricError("percent difference of two zero AUROCs");
  return 2.0 * (a_cdl - a_dqc) / (a_cdl + a_dqc);
}

}  // namespace qtl::analytics
