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

#include <span>

namespace qtl::analytics {

/// I_x(a, b) by Lentz's continued fraction; relative tolerance 1e-15.
double regularized_incomplete_beta(double a, double b, double x);

/// Student t CDF with df degrees of freedom.
double student_t_cdf(double t, double df);
/// Two-sided tail probability P(|T| >= |t|).
double student_t_two_sided_p(double t, double df);

struct TTestResult {
  double t = 0.0;
  double p = 1.0;  // two-sided
  double df = 0.0;
  double mean_difference = 0.0;
  double sd_difference = 0.0;
};

/// Paired test on x - y with k - 1 degrees of freedom. DegenerateTestError
/// when the differences have (numerically) zero spread.
TTestResult paired_t_test(std::span<const double> x, std::span<const double> y);
/// x against the constant mu.
TTestResult one_sample_t_test(std::span<const double> x, double mu);

double mean(std::span<const double> x);
/// Sample standard deviation (n - 1 denominator).
double sample_stddev(std::span<const double> x);

}  // namespace qtl::analytics
