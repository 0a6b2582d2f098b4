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

#include "qtl/datapipe/dataset_io.hpp"

#include <fstream>
#include <json.hpp>
#include <sstream>

#include "qtl/common/errors.hpp"
#include "qtl/common/hash.hpp"

namespace qtl::data {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json spec_to_json(const LongTailSpec& s, const PreprocessConfig& pre) {
  return json{{"num_labels", s.num_labels},
              {"num_samples", s.num_samples},
              {"head_frequency", s.head_frequency},
              {"decay", s.decay},
              {"signal_strength", s.signal_strength},
              {"seed", s.seed},
              {"image_height", s.image_height},
              {"image_width", s.image_width},
              {"channels", s.channels},
              {"min_positives_per_split", s.min_positives_per_split},
              {"split_train", s.splits.train},
              {"split_validation", s.splits.validation},
              {"split_test", s.splits.test},
              {"resize_shortest", pre.resize_shortest},
              {"crop", pre.crop}};
}

PreprocessConfig pre_from_json(const json& j) {
  PreprocessConfig pre;
  pre.resize_shortest = j.value("resize_shortest", pre.resize_shortest);
  pre.crop = j.value("crop", pre.crop);
  return pre;
}

json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

std::vector<std::size_t> preprocessed_shape(const LongTailSpec& spec, const PreprocessConfig& pre) {
  return {spec.channels, pre.crop, pre.crop};
}

}  // namespace

std::vector<std::size_t> SampleTable::indices_of(Split s) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < splits.size(); ++i) {
    if (splits[i] == s) out.push_back(i);
  }
  return out;
}

std::string manifest_text(const LongTailDataset& ds) {
  std::ostringstream out;
  out << "sample_id\tsplit\tlabels\n";
  for (std::size_t i = 0; i < ds.size(); ++i) {
    out << ds.sample_ids[i] << '\t' << to_string(ds.splits[i]) << '\t';
    for (std::size_t k = 0; k < ds.num_labels(); ++k) out << (ds.label(i, k) ? '1' : '0');
    out << '\n';
  }
  return out.str();
}

SampleTable make_table(std::shared_ptr<const LongTailDataset> ds, const PreprocessConfig& pre) {
  SampleTable t;
  t.label_names = ds->label_names;
  t.sample_ids = ds->sample_ids;
  t.splits = ds->splits;
  t.labels = ds->labels;
  t.tensor_shape = preprocessed_shape(ds->spec, pre);
  Sha256 h;
  h.update(spec_to_json(ds->spec, pre).dump()).update(manifest_text(*ds));
  t.fingerprint = h.hex_digest();
  t.load = [ds, pre](std::size_t i) {
    if (!ds->images.empty()) return preprocess(ds->images[i], pre);
    return preprocess(
        render_sample(ds->spec, ds->sample_ids[i], &ds->labels[i * ds->num_labels()]), pre);
  };
  return t;
}

void write_spec_json(const LongTailSpec& spec, const PreprocessConfig& pre, const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << spec_to_json(spec, pre).dump(2) << '\n';
}

LongTailSpec read_spec_json(const fs::path& path) {
  const json j = read_json(path);
  LongTailSpec s;
  try {
    s.num_labels = j.value("num_labels", s.num_labels);
    s.num_samples = j.value("num_samples", s.num_samples);
    s.head_frequency = j.value("head_frequency", s.head_frequency);
    s.decay = j.value("decay", s.decay);
    s.signal_strength = j.value("signal_strength", s.signal_strength);
    s.seed = j.value("seed", s.seed);
    s.image_height = j.value("image_height", s.image_height);
    s.image_width = j.value("image_width", s.image_width);
    s.channels = j.value("channels", s.channels);
    s.min_positives_per_split = j.value("min_positives_per_split", s.min_positives_per_split);
    s.splits.train = j.value("split_train", s.splits.train);
    s.splits.validation = j.value("split_validation", s.splits.validation);
    s.splits.test = j.value("split_test", s.splits.test);
  } catch (const json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return s;
}

void write_dataset_dir(const LongTailDataset& ds, const fs::path& dir, const PreprocessConfig& pre) {
  fs::create_directories(dir);
  write_spec_json(ds.spec, pre, dir / "dataset.json");
  {
    std::ofstream out(dir / "manifest.tsv");
    if (!out) throw IoError("cannot write manifest in " + dir.string());
    out << manifest_text(ds);
  }
  TensorCache cache(dir / "cache");
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const ByteTensor raw = ds.images.empty()
                               ? render_sample(ds.spec, ds.sample_ids[i], &ds.labels[i * ds.num_labels()])
                               : ds.images[i];
    cache.put(ds.sample_ids[i], preprocess(raw, pre));
  }
}

SampleTable open_dataset_dir(const fs::path& dir) {
  const json j = read_json(dir / "dataset.json");
  const LongTailSpec spec = read_spec_json(dir / "dataset.json");
  const PreprocessConfig pre = pre_from_json(j);

  auto ds = std::make_shared<LongTailDataset>();
  ds->spec = spec;
  ds->label_names = default_label_names(spec.num_labels);
  std::ifstream in(dir / "manifest.tsv");
  if (!in) throw IoError("missing manifest.tsv in " + dir.string());
  std::string line;
  std::getline(in, line);
  if (line != "sample_id\tsplit\tlabels") throw CorruptionError("unexpected manifest header");
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string id, split, bits;
    if (!std::getline(row, id, '\t') || !std::getline(row, split, '\t') ||
        !std::getline(row, bits) || bits.size() != spec.num_labels) {
      throw CorruptionError("malformed manifest row: " + line);
    }
    ds->sample_ids.push_back(id);
    ds->splits.push_back(split_from_string(split));
    for (char b : bits) {
      if (b != '0' && b != '1') throw CorruptionError("malformed label bits: " + bits);
      ds->labels.push_back(b == '1');
    }
  }

  SampleTable t = make_table(ds, pre);
  auto cache = std::make_shared<TensorCache>(dir / "cache");
  auto regenerate = t.load;
  t.load = [cache, regenerate, ds](std::size_t i) {
    if (auto hit = cache->get(ds->sample_ids[i])) return std::move(*hit);
    FloatTensor fresh = regenerate(i);
    cache->put(ds->sample_ids[i], fresh);
    return fresh;
  };
  return t;
}

}  // namespace qtl::data
