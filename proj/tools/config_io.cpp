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

#include "config_io.hpp"

#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "qtl/common/errors.hpp"
#include "qtl/common/hash.hpp"

namespace qtl::cli {

namespace {

void reject_unknown(const json& j, const std::set<std::string>& known, const std::string& where) {
  for (const auto& [key, value] : j.items()) {
    if (!known.count(key)) throw ConfigError("unknown key '" + key + "' in " + where);
  }
}

}  // namespace

json to_json(const train::TrainConfig& c) {
  return json{{"head", model::to_string(c.head)},
              {"num_labels", c.num_labels},
              {"depth", c.depth},
              {"lr", c.adam.lr},
              {"beta1", c.adam.beta1},
              {"beta2", c.adam.beta2},
              {"epsilon", c.adam.epsilon},
              {"batch_size", c.batch_size},
              {"max_epochs", c.max_epochs},
              {"patience", c.patience},
              {"seed", c.seed},
              {"threads", c.threads},
              {"augment", c.augment},
              {"extractor",
               {{"kind", model::to_string(c.extractor.kind)},
                {"pool", c.extractor.pool},
                {"feature_dim", c.extractor.feature_dim},
                {"seed", c.extractor.seed},
                {"features_path", c.extractor.features_path}}}};
}

train::TrainConfig train_config_from_json(const json& j, train::TrainConfig c) {
  if (!j.is_object()) throw ConfigError("training config must be a JSON object");
  reject_unknown(j, {"head", "num_labels", "depth", "lr", "beta1", "beta2", "epsilon", "batch_size",
                     "max_epochs", "patience", "seed", "threads", "augment", "extractor"},
                 "training config");
  try {
    if (j.contains("head")) c.head = model::head_kind_from_string(j.at("head").get<std::string>());
    c.num_labels = j.value("num_labels", c.num_labels);
    c.depth = j.value("depth", c.depth);
    c.adam.lr = j.value("lr", c.adam.lr);
    c.adam.beta1 = j.value("beta1", c.adam.beta1);
    c.adam.beta2 = j.value("beta2", c.adam.beta2);
    c.adam.epsilon = j.value("epsilon", c.adam.epsilon);
    c.batch_size = j.value("batch_size", c.batch_size);
    c.max_epochs = j.value("max_epochs", c.max_epochs);
    c.patience = j.value("patience", c.patience);
    c.seed = j.value("seed", c.seed);
    c.threads = j.value("threads", c.threads);
    c.augment = j.value("augment", c.augment);
    if (j.contains("extractor")) {
      const json& e = j.at("extractor");
      reject_unknown(e, {"kind", "pool", "feature_dim", "seed", "features_path"}, "extractor");
      if (e.contains("kind")) {
        c.extractor.kind = model::extractor_kind_from_string(e.at("kind").get<std::string>());
      }
      c.extractor.pool = e.value("pool", c.extractor.pool);
      c.extractor.feature_dim = e.value("feature_dim", c.extractor.feature_dim);
      c.extractor.seed = e.value("seed", c.extractor.seed);
      c.extractor.features_path = e.value("features_path", c.extractor.features_path);
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("training config: ") + e.what());
  }
  return c;
}

json to_json(const data::LongTailSpec& s) {
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
              {"split_test", s.splits.test}};
}

data::LongTailSpec longtail_spec_from_json(const json& j, data::LongTailSpec s) {
  if (!j.is_object()) throw ConfigError("dataset config must be a JSON object");
  reject_unknown(j, {"num_labels", "num_samples", "head_frequency", "decay", "signal_strength", "seed",
                     "image_height", "image_width", "channels", "min_positives_per_split",
                     "split_train", "split_validation", "split_test"},
                 "dataset config");
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
    throw ConfigError(std::string("dataset config: ") + e.what());
  }
  return s;
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

void write_text_atomic(const std::filesystem::path& path, const std::string& text) {
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw IoError("cannot write " + tmp);
    out << text;
    if (!out) throw IoError("short write to " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

std::string file_sha256(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  Sha256 h;
  char buf[1 << 16];
  while (in.read(buf, sizeof buf) || in.gcount() > 0) {
    h.update(std::string_view(buf, static_cast<std::size_t>(in.gcount())));
  }
  return h.hex_digest();
}

std::filesystem::path cache_root() {
  if (const char* env = std::getenv("QTL_CACHE_ROOT"); env != nullptr && *env != '\0') return env;
  return "qtl-data";
}

}  // namespace qtl::cli
