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

#include <functional>
#include <string>
#include <vector>

#include "qtl/trainer/early_stopping.hpp"
#include "qtl/trainer/session.hpp"

namespace qtl::train {

struct EpochReport {
  std::size_t epoch = 0;  // 1-based
  double mean_train_loss = 0.0;
  double validation_loss = 0.0;
  bool improved = false;
};

struct TrainRun {
  TrainConfig config;
  std::vector<double> train_losses;       // one per optimiser step
  std::vector<double> validation_losses;  // one per epoch
  std::vector<std::size_t> epoch_end_steps;
  std::size_t best_epoch = 0;
  double best_validation_loss = 0.0;
  StopReason stop_reason = StopReason::kMaxEpochs;
  Checkpoint best;
  std::string stream_hash;
  /// Test rows and their probabilities under the best checkpoint.
  std::vector<std::size_t> test_rows;
  std::vector<double> test_probabilities;
  double seconds = 0.0;

  std::size_t epochs_run() const { return validation_losses.size(); }
};

using EpochCallback = std::function<void(const EpochReport&)>;

/// Epochs of shuffled batches with validation after each; stops on the
/// patience rule or max_epochs and finishes on the best checkpoint.
/// Throws DivergenceError naming the step on a non-finite loss.
TrainRun train(const TrainConfig& config, const data::SampleTable& table,
               const EpochCallback& on_epoch = {});

struct PairedRun {
  std::uint64_t seed = 0;
  TrainRun cdl;
  TrainRun dqc;
};

/// Runs both heads for every seed. Configs may differ only in head kind and
/// depth; anything touching the data stream must match.
std::vector<PairedRun> paired_seed_protocol(const TrainConfig& cdl, const TrainConfig& dqc,
                                            const data::SampleTable& table,
                                            const std::vector<std::uint64_t>& seeds,
                                            const EpochCallback& on_epoch = {});

/// Tab-separated: step, split (train|val), loss.
std::string loss_curves_tsv(const TrainRun& run);

}  // namespace qtl::train
