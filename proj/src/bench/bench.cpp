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

#include "qtl/bench/bench.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <sstream>
#include <thread>

#include "qtl/common/errors.hpp"
#include "qtl/common/parallel.hpp"
#include "qtl/mlcore/adam.hpp"
#include "qtl/mlcore/rng.hpp"
#include "qtl/trainer/session.hpp"

#ifndef QTL_BUILD_FLAGS
#define QTL_BUILD_FLAGS "unknown"
#endif

namespace qtl::bench {

void BenchProtocol::validate() const {
  if (warmup_steps < 1) throw ConfigError("warmup_steps must be at least 1");
  if (measured_steps < 2) throw ConfigError("measured_steps must be at least 2");
  if (batch_size < 1) throw ConfigError("batch_size must be at least 1");
  if (num_labels < 1) throw ConfigError("num_labels must be at least 1");
  if (depth < 1) throw ConfigError("depth must be at least 1");
}

ZeroBatch zero_batch(std::size_t batch_size, const std::vector<std::size_t>& shape,
                     std::size_t num_labels) {
  ZeroBatch b;
  b.images.assign(batch_size, FloatTensor::zeros(shape));
  b.labels.assign(batch_size, std::vector<std::uint8_t>(num_labels, 0));
  return b;
}

EnvironmentFingerprint capture_environment(std::size_t threads) {
  EnvironmentFingerprint env;
  char host[256] = {};
  if (::gethostname(host, sizeof host - 1) == 0) env.host = host;
  env.cores = std::thread::hardware_concurrency();
  env.build_flags = QTL_BUILD_FLAGS;
  const std::time_t now = std::time(nullptr);
  std::tm utc{};
  ::gmtime_r(&now, &utc);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &utc);
  env.timestamp = buf;
  env.threads = resolve_threads(threads);
  return env;
}

BenchResult run_bench(const BenchProtocol& protocol) {
  protocol.validate();
  BenchResult result;
  result.protocol = protocol;
  result.environment = capture_environment(protocol.threads);

  model::FrozenProjection extractor(protocol.extractor);
  auto rng = ml::Rng::derive(protocol.seed, {ml::key(ml::Stream::kInit)});
  auto head = model::make_head(protocol.head, extractor.feature_dim(), protocol.num_labels,
                               protocol.depth, rng);
  auto adam = ml::AdamState::for_blocks(head->block_sizes());
  const ml::AdamConfig adam_config;
  train::StepKernel kernel(*head, protocol.threads);
  const ZeroBatch batch =
      zero_batch(protocol.batch_size, extractor.input_shape(), protocol.num_labels);

  auto fill = [&](std::size_t j, std::size_t, std::span<double> out) {
    extractor.extract_into(batch.images[j], out);
  };
  auto targets = [&](std::size_t j) { return batch.labels[j].data(); };

  const std::size_t total = protocol.warmup_steps + protocol.measured_steps;
  for (std::size_t s = 0; s < total; ++s) {
    const auto t0 = std::chrono::steady_clock::now();
    result.final_loss = kernel.step(*head, adam, adam_config, protocol.batch_size, fill, targets);
    const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    (s < protocol.warmup_steps ? result.warmup_seconds : result.samples).push_back(dt);
  }

  double sum = 0.0;
  for (double v : result.samples) sum += v;
  result.mean = sum / static_cast<double>(result.samples.size());
  double ss = 0.0;
  for (double v : result.samples) ss += (v - result.mean) * (v - result.mean);
  result.stddev = std::sqrt(ss / static_cast<double>(result.samples.size() - 1));
  return result;
}

BenchLock::BenchLock(const std::filesystem::path& path) {
  fd_ = ::open(path.c_str(), O_RDWR | O_CREAT, 0644);
  if (fd_ < 0) throw IoError("cannot open lock file " + path.string());
  if (::flock(fd_, LOCK_EX | LOCK_NB) != 0) {
    ::close(fd_);
    fd_ = -1;
    throw IoError("another benchmark holds " + path.string());
  }
}

BenchLock::~BenchLock() {
  if (fd_ >= 0) {
    ::flock(fd_, LOCK_UN);
    ::close(fd_);
  }
}

std::filesystem::path default_lock_path() {
  if (const char* env = std::getenv("QTL_BENCH_LOCK"); env != nullptr && *env != '\0') return env;
  return std::filesystem::temp_directory_path() / "qtl-bench.lock";
}

std::string results_table(const std::vector<BenchResult>& results) {
  std::ostringstream out;
  out.precision(6);
  out << "head\tn\twarmup\tmeasured\tbatch\tmean_s\tstd_s\n";
  for (const auto& r : results) {
    out << model::to_string(r.protocol.head) << '\t' << r.protocol.num_labels << '\t'
        << r.protocol.warmup_steps << '\t' << r.protocol.measured_steps << '\t'
        << r.protocol.batch_size << '\t' << r.mean << '\t' << r.stddev << '\n';
  }
  return out.str();
}

void append_results_log(const std::filesystem::path& path, const std::vector<BenchResult>& results,
                        const std::string& tag) {
  const bool fresh = !std::filesystem::exists(path);
  std::ofstream out(path, std::ios::app);
  if (!out) throw IoError("cannot append to " + path.string());
  out.precision(9);
  if (fresh) {
    out << "timestamp\ttag\thost\tcores\tthreads\tbuild_flags\thead\tn\tmean_s\tstd_s\tsamples\n";
  }
  for (const auto& r : results) {
    const auto& e = r.environment;
    out << e.timestamp << '\t' << tag << '\t' << e.host << '\t' << e.cores << '\t' << e.threads
        << '\t' << e.build_flags << '\t' << model::to_string(r.protocol.head) << '\t'
        << r.protocol.num_labels << '\t' << r.mean << '\t' << r.stddev << '\t';
    for (std::size_t i = 0; i < r.samples.size(); ++i) out << (i ? "," : "") << r.samples[i];
    out << '\n';
  }
}

}  // namespace qtl::bench
