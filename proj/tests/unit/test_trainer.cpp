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
#include <limits>
#include <sstream>
#include <unistd.h>

#include "qtl/common/errors.hpp"
#include "qtl/mlcore/rng.hpp"
#include "qtl/trainer/checkpoint.hpp"
#include "qtl/trainer/early_stopping.hpp"
#include "qtl/trainer/session.hpp"
#include "qtl/trainer/train.hpp"
#include "support/oracles.hpp"

namespace {

using namespace qtl::train;
using qtl::data::SampleTable;
using qtl::data::Split;
using qtl::model::HeadKind;

// Early stopping

TEST(EarlyStopping, HandWorkedSeries) {
  const std::vector<double> losses{0.5, 0.4, 0.41, 0.42, 0.43, 0.44, 0.45};
  const auto out = replay_early_stopping(losses, 5);
  EXPECT_EQ(out.stop_epoch, 7u);
  EXPECT_EQ(out.best_epoch, 2u);
  EXPECT_EQ(out.reason, StopReason::kEarly);
}

TEST(EarlyStopping, EqualLossIsNotImprovement) {
  EarlyStopping es(2);
  EXPECT_FALSE(es.update(1.0));
  EXPECT_TRUE(es.improved_last());
  EXPECT_FALSE(es.update(1.0));
  EXPECT_FALSE(es.improved_last());
  EXPECT_TRUE(es.update(1.0));
  EXPECT_EQ(es.best_epoch(), 1u);
}

TEST(EarlyStopping, MaxEpochsCap) {
  const std::vector<double> losses{5, 4, 3, 2, 1, 0.5};
  const auto out = replay_early_stopping(losses, 5, 4);
  EXPECT_EQ(out.stop_epoch, 4u);
  EXPECT_EQ(out.best_epoch, 4u);
  EXPECT_EQ(out.reason, StopReason::kMaxEpochs);
  EXPECT_EQ(to_string(out.reason), "max-epochs");
}

TEST(EarlyStopping, RandomSequencesMatchReference) {
  qtl::ml::Rng rng(2024);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t len = 1 + rng.below(60);
    std::vector<double> losses(len);
    double level = 1.0;
    for (auto& l : losses) {
      // Coarse quantisation produces exact ties now and then.
      level += rng.normal(-0.01, 0.05);
      l = std::round(level * 50.0) / 50.0;
    }
    const auto ref = qtl::testing::reference_early_stopping(losses, 5);
    const auto got = replay_early_stopping(losses, 5);
    ASSERT_EQ(got.stop_epoch, ref.stop_epoch) << "trial " << trial;
    ASSERT_EQ(got.best_epoch, ref.best_epoch) << "trial " << trial;
    ASSERT_EQ(got.reason == StopReason::kEarly, ref.early) << "trial " << trial;
  }
}

// A small table whose images encode the labels directly: channel k is
// bright when label k is present, so a linear head can separate it.
SampleTable separable_table(std::size_t n_samples, std::size_t n_labels, std::uint64_t seed,
                            bool poison = false) {
  SampleTable t;
  qtl::ml::Rng rng(seed);
  for (std::size_t k = 0; k < n_labels; ++k) t.label_names.push_back("L" + std::to_string(k));
  for (std::size_t i = 0; i < n_samples; ++i) {
    t.sample_ids.push_back("x" + std::to_string(i));
    const std::size_t m = i % 10;
    t.splits.push_back(m < 7 ? Split::kTrain : (m == 7 ? Split::kValidation : Split::kTest));
    for (std::size_t k = 0; k < n_labels; ++k) t.labels.push_back(rng.uniform() < 0.5 ? 1 : 0);
  }
  t.fingerprint = "separable-" + std::to_string(seed);
  t.tensor_shape = {n_labels, 8, 8};
  const auto labels = t.labels;
  t.load = [labels, n_labels, poison](std::size_t row) {
    auto img = qtl::FloatTensor::zeros({n_labels, 8, 8});
    for (std::size_t k = 0; k < n_labels; ++k) {
      const float v = labels[row * n_labels + k] ? 1.5f : -1.5f;
      for (std::size_t p = 0; p < 64; ++p) img.data[k * 64 + p] = v + 0.01f * static_cast<float>(p % 7);
    }
    if (poison) img.data[0] = std::numeric_limits<float>::quiet_NaN();
    return img;
  };
  return t;
}

TrainConfig small_config(HeadKind head, std::size_t labels) {
  TrainConfig c;
  c.head = head;
  c.num_labels = labels;
  c.depth = 2;
  c.adam.lr = 0.02;
  c.batch_size = 16;
  c.max_epochs = 6;
  c.patience = 3;
  c.seed = 7;
  c.threads = 1;
  c.extractor.pool = 4;
  c.extractor.feature_dim = 32;
  return c;
}

TEST(Train, SeparableCdlLossHalves) {
  const auto table = separable_table(200, 2, 1);
  auto cfg = small_config(HeadKind::kCdl, 2);
  cfg.max_epochs = 30;
  cfg.patience = 30;
  const auto run = train(cfg, table);
  ASSERT_FALSE(run.train_losses.empty());
  const double first = run.train_losses.front();
  const std::size_t last_epoch_start = run.epoch_end_steps[run.epoch_end_steps.size() - 2];
  double last = 0.0;
  for (std::size_t s = last_epoch_start; s < run.train_losses.size(); ++s) last += run.train_losses[s];
  last /= static_cast<double>(run.train_losses.size() - last_epoch_start);
  EXPECT_LE(last, 0.5 * first);
}

TEST(Train, RepeatedRunsAreBitIdentical) {
  const auto table = separable_table(120, 3, 2);
  for (HeadKind h : {HeadKind::kCdl, HeadKind::kDqc}) {
    const auto a = train(small_config(h, 3), table);
    const auto b = train(small_config(h, 3), table);
    EXPECT_EQ(a.train_losses, b.train_losses);
    EXPECT_EQ(a.validation_losses, b.validation_losses);
    EXPECT_EQ(a.test_probabilities, b.test_probabilities);
    EXPECT_EQ(a.stream_hash, b.stream_hash);
  }
}

TEST(Train, WorkerCountDoesNotChangeResults) {
  const auto table = separable_table(120, 3, 3);
  auto one = small_config(HeadKind::kDqc, 3);
  auto three = one;
  three.threads = 3;
  const auto a = train(one, table);
  const auto b = train(three, table);
  EXPECT_EQ(a.train_losses, b.train_losses);
  EXPECT_EQ(a.validation_losses, b.validation_losses);
}

TEST(Train, RunInvariants) {
  const auto table = separable_table(120, 3, 4);
  auto cfg = small_config(HeadKind::kDqc, 3);
  std::vector<EpochReport> reports;
  const auto run = train(cfg, table, [&](const EpochReport& r) { reports.push_back(r); });
  ASSERT_EQ(reports.size(), run.epochs_run());
  const auto& v = run.validation_losses;
  const auto best = std::min_element(v.begin(), v.end());
  EXPECT_EQ(run.best_epoch, static_cast<std::size_t>(best - v.begin()) + 1);
  EXPECT_EQ(run.best_validation_loss, *best);
  EXPECT_EQ(run.best.epoch, run.best_epoch);
  EXPECT_EQ(run.test_rows, table.indices_of(Split::kTest));
  EXPECT_EQ(run.test_probabilities.size(), run.test_rows.size() * 3);
  const auto expect = replay_early_stopping(v, cfg.patience, cfg.max_epochs);
  EXPECT_EQ(run.epochs_run(), expect.stop_epoch);
  EXPECT_EQ(run.stop_reason, expect.reason);
}

TEST(Train, BestCheckpointReproducesValidationLoss) {
  const auto table = separable_table(120, 3, 5);
  const auto cfg = small_config(HeadKind::kDqc, 3);
  const auto run = train(cfg, table);
  TrainingSession fresh(cfg, table);
  fresh.restore(run.best);
  EXPECT_NEAR(fresh.evaluate_loss(table.indices_of(Split::kValidation)), run.best_validation_loss, 1e-12);
}

TEST(Train, NonFiniteLossNamesTheStep) {
  const auto table = separable_table(60, 2, 6, /*poison=*/true);
  try {
    train(small_config(HeadKind::kCdl, 2), table);
    FAIL() << "expected DivergenceError";
  } catch (const qtl::DivergenceError& e) {
    EXPECT_NE(std::string(e.what()).find("step 1"), std::string::npos) << e.what();
  }
}

TEST(Train, ConfigValidation) {
  const auto table = separable_table(60, 2, 7);
  auto cfg = small_config(HeadKind::kCdl, 3);
  EXPECT_THROW(TrainingSession(cfg, table), qtl::ArgumentError);
  cfg = small_config(HeadKind::kCdl, 2);
  cfg.dataset_fingerprint = "other";
  EXPECT_THROW(TrainingSession(cfg, table), qtl::ArgumentError);
  cfg = small_config(HeadKind::kCdl, 2);
  cfg.patience = 0;
  EXPECT_THROW(cfg.validate(), qtl::ConfigError);
  cfg = small_config(HeadKind::kDqc, 40);
  EXPECT_THROW(cfg.validate(), qtl::CapacityError);
}

TEST(Train, LossCurvesTable) {
  const auto table = separable_table(60, 2, 8);
  auto cfg = small_config(HeadKind::kCdl, 2);
  cfg.max_epochs = 2;
  const auto run = train(cfg, table);
  std::istringstream in(loss_curves_tsv(run));
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "step\tsplit\tloss");
  std::size_t train_rows = 0, val_rows = 0;
  while (std::getline(in, line)) {
    train_rows += line.find("\ttrain\t") != std::string::npos;
    val_rows += line.find("\tval\t") != std::string::npos;
  }
  EXPECT_EQ(train_rows, run.train_losses.size());
  EXPECT_EQ(val_rows, 2u);
}

// Checkpoints

TEST(Checkpoint, ResumeEqualsUninterruptedStep) {
  const auto table = separable_table(120, 3, 9);
  const auto cfg = small_config(HeadKind::kDqc, 3);
  TrainingSession a(cfg, table);
  const auto batches = a.epoch_batches(0);
  a.train_step(0, 0, batches[0]);
  const auto path = std::filesystem::temp_directory_path() / ("qtl_ckpt_" + std::to_string(::getpid()));
  save_checkpoint(a.checkpoint(0), path);
  a.train_step(0, 1, batches[1]);

  TrainingSession b(cfg, table);
  b.restore(load_checkpoint(path, cfg.config_hash()));
  b.train_step(0, 1, batches[1]);
  const auto pa = a.head().parameters();
  const auto pb = b.head().parameters();
  for (std::size_t i = 0; i < pa.size(); ++i) {
    EXPECT_TRUE(std::equal(pa[i].values.begin(), pa[i].values.end(), pb[i].values.begin())) << pa[i].name;
  }
  EXPECT_EQ(a.adam().step, b.adam().step);
  std::filesystem::remove(path);
}

TEST(Checkpoint, WrongLabelCountIsRefused) {
  const auto table = separable_table(60, 2, 10);
  const auto cfg = small_config(HeadKind::kDqc, 2);
  TrainingSession s(cfg, table);
  const auto path = std::filesystem::temp_directory_path() / ("qtl_ckpt_bad_" + std::to_string(::getpid()));
  save_checkpoint(s.checkpoint(0), path);
  auto other = cfg;
  other.num_labels = 3;
  EXPECT_THROW(load_checkpoint(path, other.config_hash()), qtl::CheckpointMismatchError);
  EXPECT_NO_THROW(load_checkpoint(path, cfg.config_hash()));
  std::filesystem::remove(path);
}

TEST(Checkpoint, EncodingRoundTripAndCorruption) {
  Checkpoint c;
  c.config_hash = "abc";
  c.epoch = 4;
  c.blocks = {{"w", {1.0, -2.5}}, {"b", {3.25}}};
  c.adam = qtl::ml::AdamState::for_blocks(std::vector<std::size_t>{2, 1});
  c.adam.step = 9;
  c.adam.first_moment[0][1] = 0.125;
  c.adam.second_moment[1][0] = 7.0;
  const auto bytes = encode_checkpoint(c);
  const auto d = decode_checkpoint(bytes);
  EXPECT_EQ(d.config_hash, "abc");
  EXPECT_EQ(d.epoch, 4u);
  EXPECT_EQ(d.blocks, c.blocks);
  EXPECT_EQ(d.adam.step, 9u);
  EXPECT_EQ(d.adam.first_moment, c.adam.first_moment);
  EXPECT_EQ(d.adam.second_moment, c.adam.second_moment);
  auto truncated = bytes;
  truncated.resize(truncated.size() - 3);
  EXPECT_THROW(decode_checkpoint(truncated), qtl::CorruptionError);
  auto bad = bytes;
  bad[1] = std::byte{'X'};
  EXPECT_THROW(decode_checkpoint(bad), qtl::CorruptionError);
}

// Seed pairing

TEST(Pairing, StreamsMatchAcrossHeadsAndExecutionOrder) {
  const auto table = separable_table(120, 3, 11);
  const auto cdl = small_config(HeadKind::kCdl, 3);
  const auto dqc = small_config(HeadKind::kDqc, 3);
  const auto runs = paired_seed_protocol(cdl, dqc, table, {1, 2});
  ASSERT_EQ(runs.size(), 2u);
  for (const auto& pr : runs) {
    EXPECT_EQ(pr.cdl.stream_hash, pr.dqc.stream_hash) << "seed " << pr.seed;
    EXPECT_EQ(pr.cdl.config.seed, pr.seed);
  }
  EXPECT_NE(runs[0].cdl.stream_hash, runs[1].cdl.stream_hash);

  auto d2 = dqc;
  d2.seed = 2;
  auto c2 = cdl;
  c2.seed = 2;
  const auto dqc_first = train(d2, table);
  const auto cdl_second = train(c2, table);
  EXPECT_EQ(dqc_first.stream_hash, runs[1].dqc.stream_hash);
  EXPECT_EQ(cdl_second.stream_hash, runs[1].cdl.stream_hash);
}

TEST(Pairing, FirstBatchIdenticalAcrossHeads) {
  const auto table = separable_table(120, 3, 12);
  TrainingSession c(small_config(HeadKind::kCdl, 3), table);
  TrainingSession d(small_config(HeadKind::kDqc, 3), table);
  EXPECT_EQ(c.epoch_batches(0), d.epoch_batches(0));
  EXPECT_EQ(c.epoch_batches(3), d.epoch_batches(3));
  c.train_step(0, 0, c.epoch_batches(0)[0]);
  d.train_step(0, 0, d.epoch_batches(0)[0]);
  EXPECT_EQ(c.stream_hash(), d.stream_hash());
}

TEST(Pairing, MismatchedSettingsAreRejected) {
  const auto table = separable_table(60, 2, 13);
  auto cdl = small_config(HeadKind::kCdl, 2);
  auto dqc = small_config(HeadKind::kDqc, 2);
  cdl.dataset_fingerprint = "a";
  dqc.dataset_fingerprint = "b";
  EXPECT_THROW(paired_seed_protocol(cdl, dqc, table, {1}), qtl::ArgumentError);
  dqc.dataset_fingerprint = "a";
  dqc.batch_size = 8;
  EXPECT_THROW(paired_seed_protocol(cdl, dqc, table, {1}), qtl::ArgumentError);
  EXPECT_THROW(paired_seed_protocol(dqc, cdl, table, {1}), qtl::ArgumentError);
}

}  // namespace
