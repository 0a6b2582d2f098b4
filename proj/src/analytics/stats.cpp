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

#include "qtl/analytics/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "qtl/common/errors.hpp"

namespace qtl::analytics {

namespace {

double beta_continued_fraction(double a, double b, double x) {
  constexpr double kTiny = 1e-300;
  constexpr double kEps = 1e-15;
  const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= 10000; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < kEps) return h;
  }
  throw std::runtime_error("incomplete beta continued fraction did not converge");
}

}  // namespace

double regularized_incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0)) throw ArgumentError("incomplete beta needs a, b > 0");
  if (!(x >= 0.0 && x <= 1.0)) throw ArgumentError("incomplete beta needs x in [0, 1]");
  if (x == 0.0 || x == 1.0) return x;
  const double log_front =
      std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_continued_fraction(a, b, x) / a;
  return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double student_t_two_sided_p(double t, double df) {
  if (!(df > 0.0)) throw ArgumentError("degrees of freedom must be positive");
  if (std::isnan(t)) throw ArgumentError("t statistic is NaN");
  if (std::isinf(t)) return 0.0;
  return regularized_incomplete_beta(df / 2.0, 0.5, df / (df + t * t));
}

double student_t_cdf(double t, double df) {
  const double tail = 0.5 * student_t_two_sided_p(t, df);
  return t >= 0.0 ? 1.0 - tail : tail;
}

double mean(std::span<const double> x) {
  if (x.empty()) throw ArgumentError("mean of an empty sample");
  double s = 0.0;
  for (double v : x) s += v;
  return s / static_cast<double>(x.size());
}

double sample_stddev(std::span<const double> x) {
  if (x.size() < 2) throw ArgumentError("standard deviation needs at least two values");
  const double m = mean(x);
  double ss = 0.0;
  for (double v : x) ss += (v - m) * (v - m);
  return std::sqrt(ss / static_cast<double>(x.size() - 1));
}

TTestResult paired_t_test(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw ArgumentError("paired samples differ in length");
  if (x.size() < 2) throw ArgumentError("paired t-test needs at least two pairs");
  std::vector<double> d(x.size());
  double scale = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    d[i] = x[i] - y[i];
    if (!std::isfinite(d[i])) throw ArgumentError("non-finite paired difference");
    scale = std::max(scale, std::abs(d[i]));
  }
  TTestResult r;
  r.df = static_cast<double>(d.size() - 1);
  r.mean_difference = mean(d);
  r.sd_difference = sample_stddev(d);
  // Differences equal up to rounding count as zero spread.
  if (r.sd_difference <= 64.0 * std::numeric_limits<double>::epsilon() * scale ||
      r.sd_difference == 0.0) {
    throw DegenerateTestError("paired differences have zero variance");
  }
  r.t = r.mean_difference / (r.sd_difference / std::sqrt(static_cast<double>(d.size())));
  r.p = student_t_two_sided_p(r.t, r.df);
  return r;
}

TTestResult one_sample_t_test(std::span<const double> x, double mu) {
  const std::vector<double> base(x.size(), mu);
  return paired_t_test(x, base);
}

}  // namespace qtl::analytics
