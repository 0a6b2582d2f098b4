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

#include "qtl/trainer/early_stopping.hpp"

#include <algorithm>

#include "qtl/common/errors.hpp"

namespace qtl::train {

std::string to_string(StopReason r) {
  return r == StopReason::kEarly ? "early" : "max-epochs";
}

EarlyStopping::EarlyStopping(std::size_t patience) : patience_(patience) {
  if (patience == 0) throw ArgumentError("patience must be at least 1");
}

bool EarlyStopping::update(double validation_loss) {
  ++epochs_;
  if (validation_loss < best_loss_) {
    best_loss_ = validation_loss;
    best_epoch_ = epochs_;
  }
  return epochs_since_best() >= patience_;
}

StopOutcome replay_early_stopping(std::span<const double> losses, std::size_t patience,
                                  std::size_t max_epochs) {
  const std::size_t limit = max_epochs == 0 ? losses.size() : std::min(max_epochs, losses.size());
  EarlyStopping es(patience);
  StopOutcome out;
  for (std::size_t e = 0; e < limit; ++e) {
    if (es.update(losses[e])) {
      out.reason = StopReason::kEarly;
      break;
    }
  }
  out.stop_epoch = es.epochs_seen();
  out.best_epoch = es.best_epoch();
  return out;
}

}  // namespace qtl::train
