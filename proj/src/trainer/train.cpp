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

#include "qtl/trainer/train.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

#include "qtl/common/errors.hpp"

namespace qtl::train {

TrainRun train(const TrainConfig& config, const data::SampleTable& table,
               const EpochCallback& on_epoch) {
  const auto start = std::chrono::steady_clock::now();
  TrainingSession session(config, table);
  const auto val_rows = table.indices_of(data::Split::kValidation);
  TrainRun run;
  run.config = config;
  EarlyStopping stopper(config.patience);

  for (std::uint64_t epoch = 0; epoch < config.max_epochs; ++epoch) {
    const auto batches = session.epoch_batches(epoch);
    double epoch_loss = 0.0;
    for (std::size_t b = 0; b < batches.size(); ++b) {
      const double loss = session.train_step(epoch, b, batches[b]);
      if (!std::isfinite(loss)) {
        throw DivergenceError("non-finite training loss at step " +
                              std::to_string(run.train_losses.size() + 1) + " (epoch " +
                              std::to_string(epoch + 1) + ", batch " + std::to_string(b + 1) + ")");
      }
      run.train_losses.push_back(loss);
      epoch_loss += loss;
    }
    const double val = session.evaluate_loss(val_rows);
    if (!std::isfinite(val)) {
      throw DivergenceError("non-finite validation loss after step " +
                            std::to_string(run.train_losses.size()) + " (epoch " +
                            std::to_string(epoch + 1) + ")");
    }
    run.validation_losses.push_back(val);
    run.epoch_end_steps.push_back(run.train_losses.size());
    const bool stop = stopper.update(val);
    if (stopper.improved_last()) run.best = session.checkpoint(epoch + 1);
    if (on_epoch) {
      on_epoch({static_cast<std::size_t>(epoch + 1), epoch_loss / static_cast<double>(batches.size()),
                val, stopper.improved_last()});
    }
    if (stop) {
      run.stop_reason = StopReason::kEarly;
      break;
    }
  }

  run.best_epoch = stopper.best_epoch();
  run.best_validation_loss = stopper.best_loss();
  run.stream_hash = session.stream_hash();
  session.restore(run.best);
  run.test_rows = table.indices_of(data::Split::kTest);
  run.test_probabilities = session.predict(run.test_rows);
  run.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return run;
}

std::vector<PairedRun> paired_seed_protocol(const TrainConfig& cdl, const TrainConfig& dqc,
                                            const data::SampleTable& table,
                                            const std::vector<std::uint64_t>& seeds,
                                            const EpochCallback& on_epoch) {
  if (cdl.head != model::HeadKind::kCdl || dqc.head != model::HeadKind::kDqc) {
    throw ArgumentError("paired protocol expects one CDL and one DQC config");
  }
  if (cdl.dataset_fingerprint != dqc.dataset_fingerprint) {
    throw ArgumentError("paired configs reference different datasets");
  }
  if (cdl.num_labels != dqc.num_labels || cdl.batch_size != dqc.batch_size ||
      cdl.max_epochs != dqc.max_epochs || cdl.patience != dqc.patience ||
      cdl.augment != dqc.augment || cdl.extractor.kind != dqc.extractor.kind ||
      cdl.extractor.feature_dim != dqc.extractor.feature_dim ||
      cdl.extractor.seed != dqc.extractor.seed) {
    throw ArgumentError("paired configs disagree on data, batching or stopping settings");
  }
  std::vector<PairedRun> out;
  for (std::uint64_t seed : seeds) {
    PairedRun pr;
    pr.seed = seed;
    TrainConfig c = cdl, d = dqc;
    c.seed = d.seed = seed;
    pr.cdl = train(c, table, on_epoch);
    pr.dqc = train(d, table, on_epoch);
    out.push_back(std::move(pr));
  }
  return out;
}

std::string loss_curves_tsv(const TrainRun& run) {
  std::ostringstream out;
  out.precision(17);
  out << "step\tsplit\tloss\n";
  std::size_t next_epoch = 0;
  for (std::size_t s = 0; s < run.train_losses.size(); ++s) {
    out << s + 1 << "\ttrain\t" << run.train_losses[s] << '\n';
    while (next_epoch < run.epoch_end_steps.size() && run.epoch_end_steps[next_epoch] == s + 1) {
      out << s + 1 << "\tval\t" << run.validation_losses[next_epoch] << '\n';
      ++next_epoch;
    }
  }
  return out.str();
}

}  // namespace qtl::train
