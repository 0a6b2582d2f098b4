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

#include <cstddef>
#include <limits>
#include <span>
#include <string>

namespace qtl::train {

enum class StopReason { kEarly, kMaxEpochs };

std::string to_string(StopReason r);

/// Patience counter on validation loss. Epochs are 1-based. An epoch
/// improves only when its loss is strictly below the best so far.
class EarlyStopping {
 public:
  explicit EarlyStopping(std::size_t patience);

  /// Records the loss for the next epoch; true when training should stop.
  bool update(double validation_loss);

  std::size_t patience() const noexcept { return patience_; }
  std::size_t epochs_seen() const noexcept { return epochs_; }
  std::size_t best_epoch() const noexcept { return best_epoch_; }
  double best_loss() const noexcept { return best_loss_; }
  std::size_t epochs_since_best() const noexcept { return epochs_ - best_epoch_; }
  bool improved_last() const noexcept { return epochs_ != 0 && best_epoch_ == epochs_; }

 private:
  std::size_t patience_;
  std::size_t epochs_ = 0;
  std::size_t best_epoch_ = 0;
  double best_loss_ = std::numeric_limits<double>::infinity();
};

struct StopOutcome {
  std::size_t stop_epoch = 0;
  std::size_t best_epoch = 0;
  StopReason reason = StopReason::kMaxEpochs;
};

/// Replays a whole validation series, capped at max_epochs (0 = series length).
StopOutcome replay_early_stopping(std::span<const double> losses, std::size_t patience,
                                  std::size_t max_epochs = 0);

}  // namespace qtl::train
