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

#include "qtl/bench/sweep.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "qtl/common/errors.hpp"
#include "qtl/qsim/state_vector.hpp"

namespace qtl::bench {

namespace {

struct LineFit {
  double intercept, slope, rss;
};

LineFit least_squares(std::span<const double> x, std::span<const double> y) {
  const double k = static_cast<double>(x.size());
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / k, my = sy / k;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) throw ArgumentError("growth fit needs at least two distinct n values");
  LineFit f{};
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (f.intercept + f.slope * x[i]);
    f.rss += r * r;
  }
  return f;
}

double aic(double rss, std::size_t points, int params) {
  const double k = static_cast<double>(points);
  const double floor = std::numeric_limits<double>::min();
  return k * std::log(std::max(rss, floor) / k) + 2.0 * params;
}

}  // namespace

std::vector<SweepRow> scaling_sweep(const std::vector<std::size_t>& n_values,
                                    const BenchProtocol& base,
                                    const std::vector<model::HeadKind>& heads,
                                    std::vector<BenchResult>* raw) {
  for (std::size_t i = 0; i < n_values.size(); ++i) {
    if (i > 0 && n_values[i] <= n_values[i - 1]) throw ArgumentError("sweep n values must ascend");
    qsim::check_capacity(static_cast<int>(n_values[i]));
  }
  std::vector<SweepRow> rows;
  for (std::size_t n : n_values) {
    for (auto head : heads) {
      BenchProtocol p = base;
      p.num_labels = n;
      p.head = head;
      BenchResult r = run_bench(p);
      rows.push_back({n, head, r.mean, r.stddev, qsim::state_bytes(static_cast<int>(n))});
      if (raw != nullptr) raw->push_back(std::move(r));
    }
  }
  return rows;
}

GrowthFit fit_growth(std::span<const double> n, std::span<const double> seconds) {
  if (n.size() != seconds.size() || n.size() < 3) {
    throw ArgumentError("growth fit needs at least three (n, time) points");
  }
  std::vector<double> pow2(n.size());
  for (std::size_t i = 0; i < n.size(); ++i) pow2[i] = std::exp2(n[i]);
  const LineFit lin = least_squares(n, seconds);
  const LineFit ex = least_squares(pow2, seconds);
  GrowthFit g;
  g.linear_intercept = lin.intercept;
  g.linear_slope = lin.slope;
  g.linear_rss = lin.rss;
  g.linear_aic = aic(lin.rss, n.size(), 2);
  g.exp_intercept = ex.intercept;
  g.exp_slope = ex.slope;
  g.exp_rss = ex.rss;
  g.exp_aic = aic(ex.rss, n.size(), 2);
  return g;
}

std::string sweep_table(const std::vector<SweepRow>& rows) {
  std::ostringstream out;
  out.precision(6);
  out << "n\thead\tmean_s\tstd_s\tstate_bytes\n";
  for (const auto& r : rows) {
    out << r.n << '\t' << model::to_string(r.head) << '\t' << r.mean << '\t' << r.stddev << '\t'
        << r.state_bytes << '\n';
  }
  return out.str();
}

}  // namespace qtl::bench
