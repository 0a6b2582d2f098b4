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
#include <filesystem>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "qtl/common/tensor.hpp"

namespace qtl::model {

enum class ExtractorKind { kFrozenRandomProjection, kPrecomputed };

std::string to_string(ExtractorKind k);
ExtractorKind extractor_kind_from_string(const std::string& s);

struct ExtractorConfig {
  ExtractorKind kind = ExtractorKind::kFrozenRandomProjection;
  std::size_t channels = 3;
  std::size_t height = 64;
  std::size_t width = 64;
  /// Average-pool window applied before the projection.
  std::size_t pool = 8;
  std::size_t feature_dim = 2048;
  /// Fixed across training runs: the extractor plays the role of a frozen
  /// pretrained backbone, not a per-seed component.
  std::uint64_t seed = 0x5eedba5eULL;
  /// Precomputed-feature table, for kind == kPrecomputed.
  std::string features_path;
};

/// Frozen feature map for CHW float images: p x p average pooling, a seeded
/// Gaussian projection (no bias) and tanh. Never trained.
class FrozenProjection {
 public:
  explicit FrozenProjection(const ExtractorConfig& config);

  std::size_t feature_dim() const noexcept { return feature_dim_; }
  std::size_t pooled_dim() const noexcept { return pooled_dim_; }
  std::vector<std::size_t> input_shape() const { return {channels_, height_, width_}; }

  std::vector<double> extract(const FloatTensor& image) const;
  void extract_into(const FloatTensor& image, std::span<double> out) const;

 private:
  std::size_t channels_, height_, width_, pool_;
  std::size_t pooled_dim_;
  std::size_t feature_dim_;
  std::vector<float> projection_;  // pooled_dim x feature_dim
};

/// Features computed elsewhere, keyed by sample id. Table format: one row
/// per sample, tab-separated: sample_id then feature_dim decimal floats. A
/// header row starting with "sample_id" is optional.
class PrecomputedFeatures {
 public:
  static PrecomputedFeatures load(const std::filesystem::path& path);
  static void save(const std::filesystem::path& path,
                   const std::vector<std::pair<std::string, std::vector<double>>>& rows);

  std::size_t feature_dim() const noexcept { return feature_dim_; }
  std::size_t size() const noexcept { return rows_.size(); }
  bool contains(const std::string& sample_id) const { return rows_.count(sample_id) != 0; }
  /// Throws LookupError for unknown ids.
  const std::vector<double>& lookup(const std::string& sample_id) const;

 private:
  std::size_t feature_dim_ = 0;
  std::unordered_map<std::string, std::vector<double>> rows_;
};

}  // namespace qtl::model
