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

#include "qtl/trainer/session.hpp"

#include <cmath>

#include "qtl/common/errors.hpp"
#include "qtl/common/hash.hpp"
#include "qtl/common/parallel.hpp"
#include "qtl/datapipe/image_ops.hpp"
#include "qtl/mlcore/layers.hpp"
#include "qtl/qsim/state_vector.hpp"

namespace qtl::train {

void TrainConfig::validate() const {
  if (num_labels == 0) throw ConfigError("num_labels must be positive");
  if (depth < 1) throw ConfigError("depth must be at least 1");
  if (!(adam.lr > 0.0) || !std::isfinite(adam.lr)) throw ConfigError("lr must be positive");
  if (!(adam.beta1 >= 0.0 && adam.beta1 < 1.0) || !(adam.beta2 >= 0.0 && adam.beta2 < 1.0)) {
    throw ConfigError("Adam betas must lie in [0, 1)");
  }
  if (!(adam.epsilon > 0.0)) throw ConfigError("Adam epsilon must be positive");
  if (batch_size == 0) throw ConfigError("batch_size must be positive");
  if (max_epochs == 0) throw ConfigError("max_epochs must be positive");
  if (patience == 0) throw ConfigError("patience must be positive");
  if (extractor.feature_dim == 0) throw ConfigError("feature_dim must be positive");
  if (head == model::HeadKind::kDqc) qsim::check_capacity(static_cast<int>(num_labels));
}

std::string TrainConfig::config_hash() const {
  Sha256 h;
  h.update(model::to_string(head));
  h.update_pod(static_cast<std::uint64_t>(num_labels));
  h.update_pod(static_cast<std::uint64_t>(extractor.feature_dim));
  h.update_pod(static_cast<std::int64_t>(depth));
  h.update_pod(adam.lr).update_pod(adam.beta1).update_pod(adam.beta2).update_pod(adam.epsilon);
  return h.hex_digest();
}

StepKernel::StepKernel(const model::Head& head, std::size_t threads)
    : threads_(resolve_threads(threads)) {
  for (std::size_t w = 0; w < threads_; ++w) {
    workspaces_.push_back(head.make_workspace());
    features_.emplace_back(head.feature_dim());
    upstream_.emplace_back(head.num_labels());
  }
}

double StepKernel::step(model::Head& head, ml::AdamState& adam, const ml::AdamConfig& config,
                        std::size_t count,
                        const std::function<void(std::size_t, std::size_t, std::span<double>)>& fill,
                        const std::function<const std::uint8_t*(std::size_t)>& targets) {
  if (count == 0) throw ArgumentError("empty batch");
  const std::size_t n = head.num_labels();
  if (per_sample_.size() < count) {
    per_sample_.resize(count, head.zero_gradients());
  }
  if (total_.empty()) total_ = head.zero_gradients();
  losses_.assign(count, 0.0);

  parallel_for(count, threads_, [&](std::size_t j, std::size_t w) {
    auto& feats = features_[w];
    fill(j, w, feats);
    const auto pred = head.forward(feats, *workspaces_[w]);
    const std::uint8_t* y = targets(j);
    std::vector<double> target(y, y + n);
    losses_[j] = ml::bce_with_logits(pred.logits, target);
    ml::bce_with_logits_grad(pred.logits, target, static_cast<double>(n), upstream_[w]);
    for (auto& block : per_sample_[j]) std::fill(block.begin(), block.end(), 0.0);
    head.backward(feats, upstream_[w], *workspaces_[w], per_sample_[j]);
  });

  double loss = 0.0;
  for (double l : losses_) loss += l;
  loss /= static_cast<double>(count);

  const double inv = 1.0 / static_cast<double>(count);
  for (std::size_t b = 0; b < total_.size(); ++b) {
    auto& acc = total_[b];
    std::fill(acc.begin(), acc.end(), 0.0);
    for (std::size_t j = 0; j < count; ++j) {
      const auto& g = per_sample_[j][b];
      for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += g[i];
    }
    for (double& v : acc) v *= inv;
  }

  if (!std::isfinite(loss)) return loss;
  auto blocks = head.parameters();
  std::vector<std::span<double>> params;
  std::vector<std::span<const double>> grads;
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    params.push_back(blocks[b].values);
    grads.emplace_back(total_[b]);
  }
  ml::adam_step(config, adam, params, grads);
  return loss;
}

FeatureSource::FeatureSource(const model::ExtractorConfig& config, const data::SampleTable& table)
    : table_(table) {
  if (config.kind == model::ExtractorKind::kPrecomputed) {
    auto pre = std::make_shared<model::PrecomputedFeatures>(
        model::PrecomputedFeatures::load(config.features_path));
    if (pre->feature_dim() != config.feature_dim) {
      throw ConfigError("precomputed features have dimension " +
                        std::to_string(pre->feature_dim()) + ", config expects " +
                        std::to_string(config.feature_dim));
    }
    precomputed_ = std::move(pre);
  } else {
    auto cfg = config;
    if (table.tensor_shape.size() == 3) {
      cfg.channels = table.tensor_shape[0];
      cfg.height = table.tensor_shape[1];
      cfg.width = table.tensor_shape[2];
    }
    projection_ = std::make_shared<model::FrozenProjection>(cfg);
  }
}

std::size_t FeatureSource::feature_dim() const {
  return projection_ ? projection_->feature_dim() : precomputed_->feature_dim();
}

void FeatureSource::features(std::size_t row, const data::AugmentDecision* decision,
                             std::span<double> out) const {
  if (precomputed_) {
    const auto& f = precomputed_->lookup(table_.sample_ids[row]);
    std::copy(f.begin(), f.end(), out.begin());
    return;
  }
  const FloatTensor image = table_.load(row);
  if (decision != nullptr) {
    projection_->extract_into(data::apply_augment(image, *decision), out);
  } else {
    projection_->extract_into(image, out);
  }
}

TrainingSession::TrainingSession(const TrainConfig& config, const data::SampleTable& table)
    : config_(config),
      table_(table),
      features_((config.validate(), config.extractor), table),
      head_([&] {
        if (table.num_labels() != config.num_labels) {
          throw ArgumentError("config has " + std::to_string(config.num_labels) +
                              " labels, dataset has " + std::to_string(table.num_labels()));
        }
        if (!config.dataset_fingerprint.empty() &&
            config.dataset_fingerprint != table.fingerprint) {
          throw ArgumentError("dataset fingerprint mismatch");
        }
        auto rng = ml::Rng::derive(config.seed, {ml::key(ml::Stream::kInit)});
        return model::make_head(config.head, features_.feature_dim(), config.num_labels,
                                config.depth, rng);
      }()),
      adam_(ml::AdamState::for_blocks(head_->block_sizes())),
      kernel_(*head_, config.threads) {
  eval_cache_.resize(table.size());
  for (std::size_t w = 0; w < kernel_.threads(); ++w) eval_ws_.push_back(head_->make_workspace());
}

std::vector<data::Batch> TrainingSession::epoch_batches(std::uint64_t epoch) const {
  return data::make_batches(table_.indices_of(data::Split::kTrain), config_.batch_size,
                            config_.seed, epoch);
}

double TrainingSession::train_step(std::uint64_t epoch, std::size_t batch_index,
                                   const data::Batch& batch) {
  std::vector<data::AugmentDecision> decisions(batch.size());
  Sha256 h;
  h.update(std::as_bytes(std::span(stream_state_)));
  h.update_pod(epoch).update_pod(static_cast<std::uint64_t>(batch_index));
  for (std::size_t j = 0; j < batch.size(); ++j) {
    const std::string& id = table_.sample_ids[batch[j]];
    decisions[j] = data::draw_augment(config_.seed, epoch, id);
    h.update(id).update_pod(static_cast<std::uint8_t>(decisions[j].flip)).update_pod(
        decisions[j].angle_degrees);
  }
  stream_state_ = h.digest();

  const bool augment = config_.augment;
  return kernel_.step(
      *head_, adam_, config_.adam, batch.size(),
      [&](std::size_t j, std::size_t, std::span<double> out) {
        features_.features(batch[j], augment ? &decisions[j] : nullptr, out);
      },
      [&](std::size_t j) { return table_.label_row(batch[j]); });
}

std::vector<double> TrainingSession::predict_logits(const std::vector<std::size_t>& rows) {
  const std::size_t n = head_->num_labels();
  std::vector<double> out(rows.size() * n);
  parallel_for(rows.size(), eval_ws_.size(), [&](std::size_t j, std::size_t w) {
    auto& f = eval_cache_[rows[j]];
    if (f.empty()) {
      f.resize(features_.feature_dim());
      features_.features(rows[j], nullptr, f);
    }
    const auto pred = head_->forward(f, *eval_ws_[w]);
    std::copy(pred.logits.begin(), pred.logits.end(), out.begin() + static_cast<std::ptrdiff_t>(j * n));
  });
  return out;
}

std::vector<double> TrainingSession::predict(const std::vector<std::size_t>& rows) {
  auto out = predict_logits(rows);
  for (double& v : out) v = ml::sigmoid(v);
  return out;
}

double TrainingSession::evaluate_loss(const std::vector<std::size_t>& rows) {
  if (rows.empty()) throw ArgumentError("cannot evaluate an empty split");
  const std::size_t n = head_->num_labels();
  const auto logits = predict_logits(rows);
  double total = 0.0;
  for (std::size_t j = 0; j < rows.size(); ++j) {
    const std::uint8_t* y = table_.label_row(rows[j]);
    std::vector<double> target(y, y + n);
    total += ml::bce_with_logits(std::span(logits).subspan(j * n, n), target);
  }
  return total / static_cast<double>(rows.size());
}

std::string TrainingSession::stream_hash() {
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (auto b : stream_state_) {
    out.push_back(hex[b >> 4]);
    out.push_back(hex[b & 15]);
  }
  return out;
}

Checkpoint TrainingSession::checkpoint(std::uint64_t epoch) {
  Checkpoint ckpt;
  ckpt.config_hash = config_.config_hash();
  ckpt.epoch = epoch;
  for (const auto& block : head_->parameters()) {
    ckpt.blocks.push_back({block.name, {block.values.begin(), block.values.end()}});
  }
  ckpt.adam = adam_;
  return ckpt;
}

void TrainingSession::restore(const Checkpoint& ckpt) {
  if (ckpt.config_hash != config_.config_hash()) {
    throw CheckpointMismatchError("checkpoint belongs to a different configuration");
  }
  auto blocks = head_->parameters();
  if (blocks.size() != ckpt.blocks.size()) {
    throw CheckpointMismatchError("checkpoint block count differs from the head");
  }
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    if (blocks[b].name != ckpt.blocks[b].name ||
        blocks[b].values.size() != ckpt.blocks[b].values.size()) {
      throw CheckpointMismatchError("checkpoint block '" + ckpt.blocks[b].name +
                                    "' does not match the head");
    }
    std::copy(ckpt.blocks[b].values.begin(), ckpt.blocks[b].values.end(), blocks[b].values.begin());
  }
  adam_ = ckpt.adam;
}

}  // namespace qtl::train
