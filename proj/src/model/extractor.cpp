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

#include "qtl/model/extractor.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "qtl/common/errors.hpp"
#include "qtl/mlcore/rng.hpp"

namespace qtl::model {

std::string to_string(ExtractorKind k) {
  return k == ExtractorKind::kPrecomputed ? "precomputed" : "frozen-random-projection";
}

ExtractorKind extractor_kind_from_string(const std::string& s) {
  if (s == "frozen-random-projection") return ExtractorKind::kFrozenRandomProjection;
  if (s == "precomputed") return ExtractorKind::kPrecomputed;
  throw ConfigError("unknown extractor kind '" + s + "'");
}

FrozenProjection::FrozenProjection(const ExtractorConfig& config)
    : channels_(config.channels),
      height_(config.height),
      width_(config.width),
      pool_(config.pool),
      feature_dim_(config.feature_dim) {
  if (channels_ == 0 || height_ == 0 || width_ == 0 || pool_ == 0 || feature_dim_ == 0) {
    throw ArgumentError("extractor dimensions must be positive");
  }
  if (height_ % pool_ != 0 || width_ % pool_ != 0) {
    throw ArgumentError("extractor pool window must divide the image size");
  }
  pooled_dim_ = channels_ * (height_ / pool_) * (width_ / pool_);
  projection_.resize(feature_dim_ * pooled_dim_);
  auto rng = ml::Rng::derive(config.seed, {ml::key(ml::Stream::kExtractor)});
  const double stddev = 1.0 / std::sqrt(static_cast<double>(pooled_dim_));
  for (auto& w : projection_) w = static_cast<float>(rng.normal(0.0, stddev));
}

std::vector<double> FrozenProjection::extract(const FloatTensor& image) const {
  std::vector<double> out(feature_dim_);
  extract_into(image, out);
  return out;
}

void FrozenProjection::extract_into(const FloatTensor& image, std::span<double> out) const {
  if (image.shape != input_shape()) {
    throw ArgumentError("extractor expects a " + std::to_string(channels_) + "x" +
                        std::to_string(height_) + "x" + std::to_string(width_) + " CHW tensor");
  }
  if (out.size() != feature_dim_) throw ArgumentError("extractor output length mismatch");
  const std::size_t ph = height_ / pool_, pw = width_ / pool_;
  std::vector<float> pooled(pooled_dim_, 0.0f);
  const float inv = 1.0f / static_cast<float>(pool_ * pool_);
  for (std::size_t c = 0; c < channels_; ++c) {
    for (std::size_t y = 0; y < height_; ++y) {
      const float* row = image.data.data() + (c * height_ + y) * width_;
      float* dst = pooled.data() + (c * ph + y / pool_) * pw;
      for (std::size_t x = 0; x < width_; ++x) dst[x / pool_] += row[x];
    }
  }
  for (auto& v : pooled) v *= inv;
  std::vector<float> acc(feature_dim_, 0.0f);
  for (std::size_t i = 0; i < pooled_dim_; ++i) {
    const float v = pooled[i];
    if (v == 0.0f) continue;
    const float* w = projection_.data() + i * feature_dim_;
    for (std::size_t f = 0; f < feature_dim_; ++f) acc[f] += w[f] * v;
  }
  for (std::size_t f = 0; f < feature_dim_; ++f) out[f] = std::tanh(static_cast<double>(acc[f]));
}

PrecomputedFeatures PrecomputedFeatures::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open feature table " + path.string());
  PrecomputedFeatures table;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line.rfind("sample_id", 0) == 0) continue;
    std::istringstream fields(line);
    std::string id, cell;
    std::getline(fields, id, '\t');
    std::vector<double> row;
    while (std::getline(fields, cell, '\t')) {
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (ec != std::errc() || ptr != cell.data() + cell.size()) {
        throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": bad number '" +
                          cell + "'");
      }
      row.push_back(v);
    }
    if (table.feature_dim_ == 0) table.feature_dim_ = row.size();
    if (row.size() != table.feature_dim_ || row.empty()) {
      throw ConfigError(path.string() + ":" + std::to_string(line_no) +
                        ": inconsistent feature count");
    }
    table.rows_[id] = std::move(row);
  }
  return table;
}

void PrecomputedFeatures::save(
    const std::filesystem::path& path,
    const std::vector<std::pair<std::string, std::vector<double>>>& rows) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write feature table " + path.string());
  out << "sample_id";
  const std::size_t dim = rows.empty() ? 0 : rows.front().second.size();
  for (std::size_t i = 0; i < dim; ++i) out << "\tf" << i;
  out << '\n';
  out.precision(17);
  for (const auto& [id, row] : rows) {
    out << id;
    for (double v : row) out << '\t' << v;
    out << '\n';
  }
}

const std::vector<double>& PrecomputedFeatures::lookup(const std::string& sample_id) const {
  auto it = rows_.find(sample_id);
  if (it == rows_.end()) throw LookupError("no precomputed features for sample '" + sample_id + "'");
  return it->second;
}

}  // namespace qtl::model
