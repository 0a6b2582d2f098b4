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

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "qtl/analytics/stats.hpp"
#include "qtl/bench/bench.hpp"
#include "qtl/bench/sweep.hpp"
#include "qtl/common/errors.hpp"
#include "qtl/qsim/state_vector.hpp"

namespace {

using namespace qtl::bench;
using qtl::model::HeadKind;
namespace fs = std::filesystem;

BenchProtocol quick(HeadKind head, std::size_t n) {
  BenchProtocol p;
  p.head = head;
  p.num_labels = n;
  p.warmup_steps = 2;
  p.measured_steps = 5;
  p.batch_size = 4;
  p.extractor.height = p.extractor.width = 16;
  p.extractor.pool = 4;
  p.extractor.feature_dim = 64;
  return p;
}

TEST(Bench, ZeroBatchIsAllZero) {
  const auto b = zero_batch(32, {3, 8, 8}, 5);
  ASSERT_EQ(b.images.size(), 32u);
  ASSERT_EQ(b.labels.size(), 32u);
  for (const auto& img : b.images) {
    EXPECT_EQ(img.shape, (std::vector<std::size_t>{3, 8, 8}));
    for (float v : img.data) EXPECT_EQ(v, 0.0f);
  }
  for (const auto& l : b.labels) EXPECT_EQ(l.size(), 5u);
}

TEST(Bench, DefaultProtocolCountsSamples) {
  BenchProtocol p = quick(HeadKind::kDqc, 4);
  p.warmup_steps = 10;
  p.measured_steps = 30;
  const auto r = run_bench(p);
  EXPECT_EQ(r.warmup_seconds.size(), 10u);
  ASSERT_EQ(r.samples.size(), 30u);
  for (double s : r.samples) EXPECT_GT(s, 0.0);
  EXPECT_NEAR(r.mean, qtl::analytics::mean(r.samples), 1e-15);
  EXPECT_NEAR(r.stddev, qtl::analytics::sample_stddev(r.samples), 1e-15);
  EXPECT_FALSE(r.environment.host.empty());
  EXPECT_GE(r.environment.cores, 1u);
}

TEST(Bench, WorkIsDeterministic) {
  for (HeadKind h : {HeadKind::kCdl, HeadKind::kDqc}) {
    const auto a = run_bench(quick(h, 5));
    const auto b = run_bench(quick(h, 5));
    EXPECT_EQ(a.final_loss, b.final_loss);
    EXPECT_TRUE(std::isfinite(a.final_loss));
  }
}

TEST(Bench, ProtocolValidation) {
  auto p = quick(HeadKind::kDqc, 4);
  p.warmup_steps = 0;
  EXPECT_THROW(p.validate(), qtl::ConfigError);
  p = quick(HeadKind::kDqc, 4);
  p.measured_steps = 1;
  EXPECT_THROW(p.validate(), qtl::ConfigError);
  EXPECT_THROW(run_bench(quick(HeadKind::kDqc, qtl::qsim::kMaxQubits + 1)), qtl::CapacityError);
}

TEST(Bench, LockIsExclusive) {
  const auto path = fs::temp_directory_path() / ("qtl_bench_lock_" + std::to_string(::getpid()));
  {
    BenchLock held(path);
    EXPECT_THROW(BenchLock second(path), qtl::IoError);
  }
  EXPECT_NO_THROW(BenchLock again(path));
  fs::remove(path);
}

TEST(Bench, ResultsLogAppends) {
  const auto path = fs::temp_directory_path() / ("qtl_bench_log_" + std::to_string(::getpid()) + ".tsv");
  fs::remove(path);
  const auto r = run_bench(quick(HeadKind::kCdl, 3));
  append_results_log(path, {r}, "first");
  append_results_log(path, {r, r}, "second");
  std::ifstream in(path);
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) lines.push_back(line);
  ASSERT_EQ(lines.size(), 4u);
  EXPECT_EQ(lines[0].rfind("timestamp\ttag\thost", 0), 0u);
  EXPECT_NE(lines[1].find("\tfirst\t"), std::string::npos);
  EXPECT_NE(lines[3].find("\tsecond\t"), std::string::npos);
  fs::remove(path);

  const auto table = results_table({r});
  EXPECT_EQ(table.substr(0, table.find('\n')), "head\tn\twarmup\tmeasured\tbatch\tmean_s\tstd_s");
}

TEST(Sweep, StateBytesAndCapacity) {
  EXPECT_EQ(qtl::qsim::state_bytes(19), 8388608u);
  EXPECT_EQ(qtl::qsim::state_bytes(8), 4096u);
  EXPECT_THROW(qtl::qsim::check_capacity(qtl::qsim::kMaxQubits + 1), qtl::CapacityError);
}

TEST(Sweep, RowsPerHeadAndN) {
  std::vector<BenchResult> raw;
  const auto rows = scaling_sweep({2, 3, 4}, quick(HeadKind::kDqc, 0), {HeadKind::kCdl, HeadKind::kDqc}, &raw);
  ASSERT_EQ(rows.size(), 6u);
  EXPECT_EQ(raw.size(), 6u);
  for (const auto& r : rows) {
    EXPECT_EQ(r.state_bytes, 16ull << r.n);
    EXPECT_GT(r.mean, 0.0);
  }
  EXPECT_THROW(scaling_sweep({4, 3}, quick(HeadKind::kDqc, 0)), qtl::ArgumentError);
  EXPECT_THROW(scaling_sweep({3, qtl::qsim::kMaxQubits + 1}, quick(HeadKind::kDqc, 0), {HeadKind::kDqc}),
               qtl::CapacityError);
  const auto text = sweep_table(rows);
  EXPECT_EQ(text.substr(0, text.find('\n')), "n\thead\tmean_s\tstd_s\tstate_bytes");
}

TEST(Sweep, GrowthFitRecoversModels) {
  std::vector<double> n, lin, ex;
  for (int k = 4; k <= 14; ++k) {
    n.push_back(k);
    lin.push_back(0.5 + 0.25 * k + 0.001 * ((k * 7) % 3));
    ex.push_back(0.01 + 1e-4 * std::ldexp(1.0, k) + 1e-4 * ((k * 5) % 3));
  }
  const auto fl = fit_growth(n, lin);
  EXPECT_FALSE(fl.exponential_preferred());
  EXPECT_NEAR(fl.linear_slope, 0.25, 1e-3);
  const auto fe = fit_growth(n, ex);
  EXPECT_TRUE(fe.exponential_preferred());
  EXPECT_NEAR(fe.exp_slope, 1e-4, 1e-6);
}

}  // namespace
