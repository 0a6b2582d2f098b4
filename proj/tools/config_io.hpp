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
#include <json.hpp>
#include <string>

#include "qtl/bench/bench.hpp"
#include "qtl/datapipe/longtail.hpp"
#include "qtl/trainer/session.hpp"

namespace qtl::cli {

using nlohmann::json;

json to_json(const train::TrainConfig& c);
/// Missing keys keep their defaults; unknown keys are a ConfigError.
train::TrainConfig train_config_from_json(const json& j, train::TrainConfig base = {});

json to_json(const data::LongTailSpec& s);
data::LongTailSpec longtail_spec_from_json(const json& j, data::LongTailSpec base = {});

json read_json_file(const std::filesystem::path& path);
/// Temp file plus rename.
void write_text_atomic(const std::filesystem::path& path, const std::string& text);
std::string file_sha256(const std::filesystem::path& path);

/// $QTL_CACHE_ROOT when set, otherwise ./qtl-data.
std::filesystem::path cache_root();

}  // namespace qtl::cli
