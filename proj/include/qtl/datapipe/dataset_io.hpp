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

#include <filesystem>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "qtl/common/tensor.hpp"
#include "qtl/datapipe/cache.hpp"
#include "qtl/datapipe/image_ops.hpp"
#include "qtl/datapipe/longtail.hpp"

namespace qtl::data {

/// What the trainer sees: ids, labels, split membership and a way to fetch
/// the preprocessed CHW tensor for a row. `fingerprint` identifies the
/// dataset contents; runs that share it share the data.
struct SampleTable {
  std::vector<std::string> label_names;
  std::vector<std::string> sample_ids;
  std::vector<Split> splits;
  std::vector<std::uint8_t> labels;  // row-major size() x num_labels()
  std::string fingerprint;
  std::vector<std::size_t> tensor_shape;  // C, H, W after preprocessing
  std::function<FloatTensor(std::size_t)> load;

  std::size_t size() const { return sample_ids.size(); }
  std::size_t num_labels() const { return label_names.size(); }
  const std::uint8_t* label_row(std::size_t i) const { return &labels[i * num_labels()]; }
  std::vector<std::size_t> indices_of(Split s) const;
};

/// Manifest text, one sample per line after a header:
///   sample_id <TAB> split <TAB> labels
/// where split is train|val|test and labels is the multi-hot vector written
/// as a string of '0'/'1' characters in label order.
std::string manifest_text(const LongTailDataset& ds);

/// In-memory table; tensors are preprocessed on demand from the held images
/// (or rendered again when the dataset was generated without images).
SampleTable make_table(std::shared_ptr<const LongTailDataset> ds,
                       const PreprocessConfig& pre = {});

/// Writes dir/dataset.json (generator settings), dir/manifest.tsv and a
/// warm tensor cache under dir/cache.
void write_dataset_dir(const LongTailDataset& ds, const std::filesystem::path& dir,
                       const PreprocessConfig& pre = {});

/// Opens a directory written by write_dataset_dir. Tensors come from the
/// cache; a miss re-renders and re-preprocesses the sample and stores it.
SampleTable open_dataset_dir(const std::filesystem::path& dir);

LongTailSpec read_spec_json(const std::filesystem::path& path);
void write_spec_json(const LongTailSpec& spec, const PreprocessConfig& pre,
                     const std::filesystem::path& path);

}  // namespace qtl::data
