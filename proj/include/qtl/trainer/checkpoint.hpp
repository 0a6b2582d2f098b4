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

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "qtl/mlcore/adam.hpp"

namespace qtl::train {

struct NamedBlock {
  std::string name;
  std::vector<double> values;
  bool operator==(const NamedBlock&) const = default;
};

/// Checkpoint file, little-endian:
///
///   magic "QTLC", u16 version (1)
///   u32 length + bytes   config hash (hex)
///   u64                  epoch
///   u32                  block count, then per block:
///                          u32 length + name bytes, u64 count, count x f64
///   u64                  Adam step
///   u32                  moment block count, then per block:
///                          u64 count, count x f64 first moment, count x f64 second moment
struct Checkpoint {
  std::string config_hash;
  std::uint64_t epoch = 0;
  std::vector<NamedBlock> blocks;
  ml::AdamState adam;
};

std::vector<std::byte> encode_checkpoint(const Checkpoint& ckpt);
Checkpoint decode_checkpoint(std::span<const std::byte> bytes);

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path);
/// Throws CheckpointMismatchError when the stored hash differs from
/// expected_config_hash.
Checkpoint load_checkpoint(const std::filesystem::path& path, const std::string& expected_config_hash);

}  // namespace qtl::train
