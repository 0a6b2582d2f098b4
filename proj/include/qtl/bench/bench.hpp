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
#include <filesystem>
#include <string>
#include <vector>

#include "qtl/common/tensor.hpp"
#include "qtl/model/extractor.hpp"
#include "qtl/model/heads.hpp"

namespace qtl::bench {

struct BenchProtocol {
  std::size_t warmup_steps = 10;
  std::size_t measured_steps = 30;
  std::size_t batch_size = 32;
  model::HeadKind head = model::HeadKind::kDqc;
  std::size_t num_labels = 8;
  int depth = 3;
  std::uint64_t seed = 0;
  std::size_t threads = 1;
  model::ExtractorConfig extractor;

  void validate() const;
};

struct ZeroBatch {
  std::vector<FloatTensor> images;
  std::vector<std::vector<std::uint8_t>> labels;
};

ZeroBatch zero_batch(std::size_t batch_size, const std::vector<std::size_t>& shape,
                     std::size_t num_labels);

struct EnvironmentFingerprint {
  std::string host;
  std::size_t cores = 0;
  std::string build_flags;
  std::string timestamp;  // UTC, ISO 8601
  std::size_t threads = 0;
};

EnvironmentFingerprint capture_environment(std::size_t threads);

struct BenchResult {
  BenchProtocol protocol;
  std::vector<double> warmup_seconds;  // recorded, never reported in mean/std
  std::vector<double> samples;         // one per measured step
  double mean = 0.0;
  double stddev = 0.0;                 // n - 1 denominator
  double final_loss = 0.0;             // loss of the last step, for work determinism
  EnvironmentFingerprint environment;
};

/// Times full training steps (frozen extractor forward on the zero images,
/// head forward, BCE, backward, Adam update) on a pre-staged zero batch.
/// Throws CapacityError for DQC qubit counts over the cap.
BenchResult run_bench(const BenchProtocol& protocol);

/// Exclusive, non-blocking advisory lock held for the object's lifetime.
/// Throws IoError when another process holds it.
class BenchLock {
 public:
  explicit BenchLock(const std::filesystem::path& path);
  ~BenchLock();
  BenchLock(const BenchLock&) = delete;
  BenchLock& operator=(const BenchLock&) = delete;

 private:
  int fd_ = -1;
};

/// $QTL_BENCH_LOCK, else <temp dir>/qtl-bench.lock.
std::filesystem::path default_lock_path();

/// Columns: head, n, warmup, measured, batch, mean_s, std_s.
std::string results_table(const std::vector<BenchResult>& results);

/// Appends one line per result (creating the file with a header when new):
/// timestamp, tag, host, cores, threads, build_flags, head, n, mean_s, std_s, samples.
void append_results_log(const std::filesystem::path& path, const std::vector<BenchResult>& results,
                        const std::string& tag);

}  // namespace qtl::bench
