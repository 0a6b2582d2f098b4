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
#include <cstdint>
#include <string>
#include <vector>

#include "qtl/common/tensor.hpp"

namespace qtl::data {

enum class Split : std::uint8_t { kTrain = 0, kValidation = 1, kTest = 2 };

std::string to_string(Split s);
Split split_from_string(const std::string& s);

struct SplitFractions {
  double train = 0.7;
  double validation = 0.1;
  double test = 0.2;
};

struct LongTailSpec {
  std::size_t num_labels = 8;
  std::size_t num_samples = 4000;
  double head_frequency = 0.3;
  double decay = 0.6;
  double signal_strength = 1.0;
  std::uint64_t seed = 2024;
  std::size_t image_height = 72;
  std::size_t image_width = 80;
  std::size_t channels = 3;
  std::size_t min_positives_per_split = 10;
  SplitFractions splits;

  /// Target frequency of the label at `rank` (0 = most common).
  double frequency(std::size_t rank) const;
  /// Throws ValidationError; the message names the first infeasible rank.
  void validate() const;
  /// Non-empty when the settings are legal but degenerate (decay == 1).
  std::vector<std::string> warnings() const;
};

struct LongTailDataset {
  LongTailSpec spec;
  std::vector<std::string> label_names;
  std::vector<std::string> sample_ids;
  std::vector<Split> splits;
  /// Row-major num_samples x num_labels multi-hot.
  std::vector<std::uint8_t> labels;
  /// HWC uint8 images; empty when generated with images = false.
  std::vector<ByteTensor> images;

  std::size_t size() const { return sample_ids.size(); }
  std::size_t num_labels() const { return label_names.size(); }
  std::uint8_t label(std::size_t sample, std::size_t k) const {
    return labels[sample * label_names.size() + k];
  }
  std::vector<std::size_t> indices_of(Split s) const;
  std::vector<std::size_t> positive_counts(Split s) const;
  std::vector<std::size_t> positive_counts() const;
};

/// Label names in descending real-world prevalence; generic names past 19.
std::vector<std::string> default_label_names(std::size_t n);

std::string sample_id_for(std::size_t index);

/// Exact positive counts per split: for split size S and label rank r the
/// split receives max(round(S * f_r), min_positives_per_split) positives,
/// chosen uniformly and independently per label, so labels co-occur freely.
LongTailDataset generate_longtail(const LongTailSpec& spec, bool images = true);

/// The image for one sample. A pure function of (spec, sample_id, labels),
/// which is what lets a cache miss regenerate bytes deterministically.
///
/// Background: brightness 110 plus a per-sample offset and pixel noise.
/// Each positive label adds its own pair of Gaussian blobs mirrored about
/// the vertical axis, so horizontal flips keep the signal intact.
ByteTensor render_sample(const LongTailSpec& spec, const std::string& sample_id,
                         const std::uint8_t* labels);

}  // namespace qtl::data
