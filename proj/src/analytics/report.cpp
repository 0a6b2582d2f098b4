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

#include "qtl/analytics/report.hpp"

#include <cmath>
#include <sstream>

#include "qtl/analytics/auroc.hpp"
#include "qtl/analytics/stats.hpp"
#include "qtl/common/errors.hpp"

namespace qtl::analytics {

namespace {

std::string num(double v) {
  std::ostringstream s;
  s.precision(10);
  s << v;
  return s.str();
}

std::string num(const std::optional<double>& v) { return v ? num(*v) : "NA"; }

}  // namespace

PairedComparison compare_paired(const std::string& label, const std::string& task,
                                std::vector<double> auroc_cdl, std::vector<double> auroc_dqc) {
  if (auroc_cdl.size() != auroc_dqc.size() || auroc_cdl.size() < 2) {
    throw ArgumentError("comparison '" + label + "' needs two equal seed lists of length >= 2");
  }
  PairedComparison c;
  c.label = label;
  c.task = task;
  c.pct_diff = pct_diff_auroc(mean(auroc_cdl), mean(auroc_dqc));
  try {
    const auto r = paired_t_test(auroc_cdl, auroc_dqc);
    c.t = r.t;
    c.p_value = r.p;
  } catch (const DegenerateTestError&) {
  }
  c.auroc_cdl = std::move(auroc_cdl);
  c.auroc_dqc = std::move(auroc_dqc);
  return c;
}

VolcanoTable volcano_data(const std::vector<PairedComparison>& comparisons, double alpha) {
  VolcanoTable table;
  table.alpha = alpha;
  table.threshold_y = -std::log10(alpha);
  for (const auto& c : comparisons) {
    if (!c.p_value) throw ArgumentError("comparison '" + c.label + "' has no p-value");
    if (!(*c.p_value > 0.0)) throw ArgumentError("comparison '" + c.label + "' has p <= 0");
    VolcanoRow row;
    row.label = c.label;
    row.task = c.task;
    row.pct_diff = c.pct_diff;
    row.p = *c.p_value;
    if (c.pct_diff > 0.0) row.x = std::log2(c.pct_diff);
    row.y = -std::log10(row.p);
    table.rows.push_back(std::move(row));
  }
  return table;
}

std::string volcano_tsv(const VolcanoTable& table) {
  std::ostringstream out;
  out << "# threshold_y=" << num(table.threshold_y) << " alpha=" << num(table.alpha) << '\n';
  out << "label\ttask\tpct_diff\tp\tx\tx_flag\ty\n";
  for (const auto& r : table.rows) {
    out << r.label << '\t' << r.task << '\t' << num(r.pct_diff) << '\t' << num(r.p) << '\t'
        << num(r.x) << '\t' << (r.x ? "ok" : "nonpositive_pct_diff") << '\t' << num(r.y) << '\n';
  }
  return out.str();
}

std::string comparison_tsv(const std::vector<PairedComparison>& comparisons) {
  std::ostringstream out;
  out << "label\ttask\tcdl_mean\tcdl_std\tdqc_mean\tdqc_std\tt\tp\tpct_diff\n";
  for (const auto& c : comparisons) {
    out << c.label << '\t' << c.task << '\t' << num(mean(c.auroc_cdl)) << '\t'
        << num(sample_stddev(c.auroc_cdl)) << '\t' << num(mean(c.auroc_dqc)) << '\t'
        << num(sample_stddev(c.auroc_dqc)) << '\t' << num(c.t) << '\t' << num(c.p_value) << '\t'
        << num(c.pct_diff) << '\n';
  }
  return out.str();
}

std::string auroc_tsv(const std::vector<AurocRecord>& records) {
  std::ostringstream out;
  out << "head\tseed\tlabel\tauroc\n";
  for (const auto& r : records) {
    out << r.head << '\t' << r.seed << '\t' << r.label << '\t' << num(r.auroc) << '\n';
  }
  return out.str();
}

}  // namespace qtl::analytics
