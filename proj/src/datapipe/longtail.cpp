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

#include "qtl/datapipe/longtail.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "qtl/common/errors.hpp"
#include "qtl/common/hash.hpp"
#include "qtl/mlcore/rng.hpp"

namespace qtl::data {

namespace {

constexpr std::uint64_t kPatternKey = 0xb10bULL;
constexpr double kBackground = 110.0;
constexpr double kSampleOffsetStd = 10.0;
constexpr double kPixelNoiseStd = 12.0;
constexpr double kBlobAmplitude = 45.0;

struct BlobPattern {
  double row, col, sigma, sign;
  double channel_gain[3];
};

BlobPattern pattern_for(const LongTailSpec& spec, std::size_t label) {
  auto rng = ml::Rng::derive(spec.seed, {ml::key(ml::Stream::kData), kPatternKey, label});
  const double h = static_cast<double>(spec.image_height);
  const double w = static_cast<double>(spec.image_width);
  BlobPattern p{};
  p.row = rng.uniform(0.2 * h, 0.8 * h);
  p.col = rng.uniform(0.2 * w, 0.45 * w);
  p.sigma = rng.uniform(0.06, 0.1) * std::min(h, w);
  p.sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
  for (double& g : p.channel_gain) g = rng.uniform(0.6, 1.0);
  return p;
}

std::size_t rounded(double x) { return static_cast<std::size_t>(std::llround(x)); }

}  // namespace

std::string to_string(Split s) {
  switch (s) {
    case Split::kTrain: return "train";
    case Split::kValidation: return "val";
    case Split::kTest: return "test";
  }
  return "?";
}

Split split_from_string(const std::string& s) {
  if (s == "train") return Split::kTrain;
  if (s == "val" || s == "validation") return Split::kValidation;
  if (s == "test") return Split::kTest;
  throw ArgumentError("unknown split '" + s + "'");
}

double LongTailSpec::frequency(std::size_t rank) const {
  return head_frequency * std::pow(decay, static_cast<double>(rank));
}

void LongTailSpec::validate() const {
  if (num_labels == 0) throw ValidationError("num_labels must be positive");
  if (num_samples == 0) throw ValidationError("num_samples must be positive");
  if (!(head_frequency > 0.0 && head_frequency <= 1.0)) {
    throw ValidationError("head_frequency must lie in (0, 1]");
  }
  if (!(decay > 0.0 && decay <= 1.0)) throw ValidationError("decay must lie in (0, 1]");
  if (!(signal_strength >= 0.0) || !std::isfinite(signal_strength)) {
    throw ValidationError("signal_strength must be finite and non-negative");
  }
  if (channels != 1 && channels != 3) throw ValidationError("channels must be 1 or 3");
  if (image_height < 8 || image_width < 8) throw ValidationError("image is smaller than 8x8");
  const double fsum = splits.train + splits.validation + splits.test;
  if (splits.train <= 0 || splits.validation <= 0 || splits.test <= 0 ||
      std::abs(fsum - 1.0) > 1e-9) {
    throw ValidationError("split fractions must be positive and sum to 1");
  }
  const std::size_t n_train = rounded(splits.train * num_samples);
  const std::size_t n_val = rounded(splits.validation * num_samples);
  const std::size_t n_test = num_samples - std::min(num_samples, n_train + n_val);
  for (std::size_t r = 0; r < num_labels; ++r) {
    const double expected = frequency(r) * static_cast<double>(num_samples);
    if (expected < 3.0 * static_cast<double>(min_positives_per_split)) {
      throw ValidationError("label rank " + std::to_string(r) + " expects " +
                            std::to_string(expected) + " positives, fewer than " +
                            std::to_string(min_positives_per_split) + " per split");
    }
    for (std::size_t size : {n_train, n_val, n_test}) {
      if (size < 2 * min_positives_per_split) {
        throw ValidationError("label rank " + std::to_string(r) + ": a split of " +
                              std::to_string(size) + " samples cannot hold " +
                              std::to_string(min_positives_per_split) +
                              " positives and negatives");
      }
    }
  }
}

std::vector<std::string> LongTailSpec::warnings() const {
  std::vector<std::string> out;
  if (decay == 1.0) out.push_back("decay = 1: all labels share one frequency");
  return out;
}

std::vector<std::string> default_label_names(std::size_t n) {
  static const char* const kNames[] = {
      "Infiltration", "Effusion", "Atelectasis", "Nodule", "Mass",
      "Pneumothorax", "Consolidation", "Pleural_Thickening", "Cardiomegaly", "Emphysema",
      "Edema", "Subcutaneous_Emphysema", "Fibrosis", "Pneumonia", "Tortuous_Aorta",
      "Calcification_of_the_Aorta", "Pneumoperitoneum", "Pneumomediastinum", "Hernia"};
  std::vector<std::string> out;
  for (std::size_t k = 0; k < n; ++k) {
    if (k < std::size(kNames)) {
      out.emplace_back(kNames[k]);
    } else {
      char buf[32];
      std::snprintf(buf, sizeof buf, "label_%02zu", k);
      out.emplace_back(buf);
    }
  }
  return out;
}

std::string sample_id_for(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "s%06zu", index);
  return buf;
}

std::vector<std::size_t> LongTailDataset::indices_of(Split s) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < splits.size(); ++i) {
    if (splits[i] == s) out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> LongTailDataset::positive_counts(Split s) const {
  std::vector<std::size_t> counts(num_labels(), 0);
  for (std::size_t i = 0; i < size(); ++i) {
    if (splits[i] != s) continue;
    for (std::size_t k = 0; k < num_labels(); ++k) counts[k] += label(i, k);
  }
  return counts;
}

std::vector<std::size_t> LongTailDataset::positive_counts() const {
  std::vector<std::size_t> counts(num_labels(), 0);
  for (std::size_t i = 0; i < size(); ++i) {
    for (std::size_t k = 0; k < num_labels(); ++k) counts[k] += label(i, k);
  }
  return counts;
}

LongTailDataset generate_longtail(const LongTailSpec& spec, bool images) {
  spec.validate();
  LongTailDataset ds;
  ds.spec = spec;
  ds.label_names = default_label_names(spec.num_labels);
  const std::size_t n = spec.num_labels;
  const std::size_t total = spec.num_samples;

  ds.sample_ids.reserve(total);
  for (std::size_t i = 0; i < total; ++i) ds.sample_ids.push_back(sample_id_for(i));

  std::vector<std::size_t> order(total);
  std::iota(order.begin(), order.end(), 0);
  auto split_rng = ml::Rng::derive(spec.seed, {ml::key(ml::Stream::kSplit)});
  for (std::size_t i = total; i > 1; --i) {
    std::swap(order[i - 1], order[split_rng.below(i)]);
  }
  const std::size_t n_train = rounded(spec.splits.train * total);
  const std::size_t n_val = rounded(spec.splits.validation * total);
  ds.splits.assign(total, Split::kTest);
  for (std::size_t j = 0; j < total; ++j) {
    if (j < n_train) {
      ds.splits[order[j]] = Split::kTrain;
    } else if (j < n_train + n_val) {
      ds.splits[order[j]] = Split::kValidation;
    }
  }

  ds.labels.assign(total * n, 0);
  for (Split s : {Split::kTrain, Split::kValidation, Split::kTest}) {
    std::vector<std::size_t> members = ds.indices_of(s);
    for (std::size_t r = 0; r < n; ++r) {
      const std::size_t want = std::min(
          members.size(),
          std::max(rounded(spec.frequency(r) * static_cast<double>(members.size())),
                   spec.min_positives_per_split));
      auto rng = ml::Rng::derive(
          spec.seed, {ml::key(ml::Stream::kData), static_cast<std::uint64_t>(s), r});
      // Partial Fisher-Yates: the first `want` entries are a uniform subset.
      for (std::size_t j = 0; j < want; ++j) {
        std::swap(members[j], members[j + rng.below(members.size() - j)]);
        ds.labels[members[j] * n + r] = 1;
      }
    }
  }

  if (images) {
    ds.images.reserve(total);
    for (std::size_t i = 0; i < total; ++i) {
      ds.images.push_back(render_sample(spec, ds.sample_ids[i], &ds.labels[i * n]));
    }
  }
  return ds;
}

ByteTensor render_sample(const LongTailSpec& spec, const std::string& sample_id,
                         const std::uint8_t* labels) {
  const std::size_t h = spec.image_height, w = spec.image_width, c = spec.channels;
  std::vector<double> canvas(h * w * c, kBackground);
  auto rng = ml::Rng::derive(spec.seed, {ml::key(ml::Stream::kData), fnv1a64(sample_id)});
  const double offset = rng.normal(0.0, kSampleOffsetStd);
  for (double& v : canvas) v += offset + rng.normal(0.0, kPixelNoiseStd);

  const double amplitude = kBlobAmplitude * spec.signal_strength;
  for (std::size_t k = 0; k < spec.num_labels; ++k) {
    if (!labels[k]) continue;
    const BlobPattern p = pattern_for(spec, k);
    const double mirror_col = static_cast<double>(w - 1) - p.col;
    const double inv = 1.0 / (2.0 * p.sigma * p.sigma);
    for (std::size_t y = 0; y < h; ++y) {
      const double dy = static_cast<double>(y) - p.row;
      for (std::size_t x = 0; x < w; ++x) {
        const double dx1 = static_cast<double>(x) - p.col;
        const double dx2 = static_cast<double>(x) - mirror_col;
        const double g = std::exp(-(dy * dy + dx1 * dx1) * inv) +
                         std::exp(-(dy * dy + dx2 * dx2) * inv);
        if (g < 1e-4) continue;
        for (std::size_t ch = 0; ch < c; ++ch) {
          canvas[(y * w + x) * c + ch] += p.sign * amplitude * p.channel_gain[ch % 3] * g;
        }
      }
    }
  }

  ByteTensor img = ByteTensor::zeros({h, w, c});
  for (std::size_t i = 0; i < canvas.size(); ++i) {
    img.data[i] = static_cast<std::uint8_t>(std::clamp(std::nearbyint(canvas[i]), 0.0, 255.0));
  }
  return img;
}

}  // namespace qtl::data
