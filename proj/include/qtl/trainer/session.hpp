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

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "qtl/datapipe/batches.hpp"
#include "qtl/datapipe/dataset_io.hpp"
#include "qtl/mlcore/adam.hpp"
#include "qtl/model/extractor.hpp"
#include "qtl/model/heads.hpp"
#include "qtl/trainer/checkpoint.hpp"

namespace qtl::train {

struct TrainConfig {
  model::HeadKind head = model::HeadKind::kCdl;
  std::size_t num_labels = 8;
  int depth = 3;
  ml::AdamConfig adam;
  std::size_t batch_size = 32;
  std::size_t max_epochs = 50;
  std::size_t patience = 5;
  std::uint64_t seed = 0;
  std::size_t threads = 0;  // 0 = all cores
  bool augment = true;
  model::ExtractorConfig extractor;
  /// Expected SampleTable fingerprint; empty accepts any table.
  std::string dataset_fingerprint;

  /// Throws ConfigError / CapacityError.
  void validate() const;
  /// SHA-256 over head kind, n, m, d and the optimiser constants.
  std::string config_hash() const;
};

/// Forward, backward and Adam update over one batch. Per-sample gradients
/// land in their own buffers and are summed in sample order, so the result
/// does not depend on the worker count.
class StepKernel {
 public:
  StepKernel(const model::Head& head, std::size_t threads);

  /// `fill(j, worker, features)` writes the features of batch slot j;
  /// `targets(j)` points at its num_labels multi-hot row. Returns the mean
  /// BCE of the batch before the update.
  double step(model::Head& head, ml::AdamState& adam, const ml::AdamConfig& config,
              std::size_t count,
              const std::function<void(std::size_t, std::size_t, std::span<double>)>& fill,
              const std::function<const std::uint8_t*(std::size_t)>& targets);

  std::size_t threads() const noexcept { return threads_; }

 private:
  std::size_t threads_;
  std::vector<std::unique_ptr<model::HeadWorkspace>> workspaces_;
  std::vector<std::vector<double>> features_;
  std::vector<std::vector<double>> upstream_;
  std::vector<model::Gradients> per_sample_;
  std::vector<double> losses_;
  model::Gradients total_;
};

/// Produces head inputs for dataset rows: either the frozen projection of
/// the (optionally augmented) preprocessed image, or a precomputed table.
class FeatureSource {
 public:
  FeatureSource(const model::ExtractorConfig& config, const data::SampleTable& table);

  std::size_t feature_dim() const;
  /// decision == nullptr means no augmentation.
  void features(std::size_t row, const data::AugmentDecision* decision, std::span<double> out) const;

 private:
  const data::SampleTable& table_;
  std::shared_ptr<const model::FrozenProjection> projection_;
  std::shared_ptr<const model::PrecomputedFeatures> precomputed_;
};

/// Mutable state of one training run: head, optimiser, stream hash.
class TrainingSession {
 public:
  TrainingSession(const TrainConfig& config, const data::SampleTable& table);

  const TrainConfig& config() const { return config_; }
  model::Head& head() { return *head_; }
  const model::Head& head() const { return *head_; }
  const ml::AdamState& adam() const { return adam_; }
  const FeatureSource& features() const { return features_; }

  std::vector<data::Batch> epoch_batches(std::uint64_t epoch) const;
  /// One optimiser step on `batch`; epoch is 0-based and picks the
  /// augmentation stream. Returns the batch loss.
  double train_step(std::uint64_t epoch, std::size_t batch_index, const data::Batch& batch);

  /// Mean BCE over `rows` without augmentation, using cached features.
  double evaluate_loss(const std::vector<std::size_t>& rows);
  /// Row-major rows.size() x num_labels logits / probabilities.
  std::vector<double> predict_logits(const std::vector<std::size_t>& rows);
  std::vector<double> predict(const std::vector<std::size_t>& rows);

  /// Hex SHA-256 of every (epoch, batch, sample_id, augmentation) consumed.
  std::string stream_hash();

  Checkpoint checkpoint(std::uint64_t epoch);
  void restore(const Checkpoint& ckpt);

 private:
  TrainConfig config_;
  const data::SampleTable& table_;
  FeatureSource features_;
  std::unique_ptr<model::Head> head_;
  ml::AdamState adam_;
  StepKernel kernel_;
  std::array<std::uint8_t, 32> stream_state_{};
  std::vector<std::vector<double>> eval_cache_;
  std::vector<std::unique_ptr<model::HeadWorkspace>> eval_ws_;
};

}  // namespace qtl::train
