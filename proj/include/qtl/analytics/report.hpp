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
#include <optional>
#include <string>
#include <vector>

namespace qtl::analytics {

struct PairedComparison {
  std::string label;  // a label name or "mean"
  std::string task;   // e.g. "n8"
  std::vector<double> auroc_cdl;  // per seed
  std::vector<double> auroc_dqc;  // per seed, same order
  std::optional<double> t;
  std::optional<double> p_value;  // empty when the test is degenerate
  double pct_diff = 0.0;          // of the seed means
};

/// Seed lists must match in length (>= 2). A zero-variance difference
/// leaves t and p empty instead of throwing.
PairedComparison compare_paired(const std::string& label, const std::string& task,
                                std::vector<double> auroc_cdl, std::vector<double> auroc_dqc);

struct VolcanoRow {
  std::string label;
  std::string task;
  double pct_diff = 0.0;
  double p = 0.0;
  std::optional<double> x;  // log2(pct_diff); empty when pct_diff <= 0
  double y = 0.0;           // -log10(p)
};

struct VolcanoTable {
  std::vector<VolcanoRow> rows;
  double alpha = 0.05;
  double threshold_y = 0.0;  // -log10(alpha)
};

/// ArgumentError when a comparison has no p-value or p <= 0.
VolcanoTable volcano_data(const std::vector<PairedComparison>& comparisons, double alpha = 0.05);

/// Columns: label, task, pct_diff, p, x, x_flag, y. The first line is a
/// "# threshold_y=<value> alpha=<value>" comment; x is "NA" and x_flag is
/// "nonpositive_pct_diff" for untransformable rows, "ok" otherwise.
std::string volcano_tsv(const VolcanoTable& table);

/// Columns: label, task, cdl_mean, cdl_std, dqc_mean, dqc_std, t, p, pct_diff.
/// Missing statistics print as "NA".
std::string comparison_tsv(const std::vector<PairedComparison>& comparisons);

struct AurocRecord {
  std::string head;
  std::uint64_t seed = 0;
  std::string label;
  double auroc = 0.0;
};

/// Columns: head, seed, label, auroc.
std::string auroc_tsv(const std::vector<AurocRecord>& records);

}  // namespace qtl::analytics
