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
#include <span>
#include <string>
#include <vector>

#include "qtl/common/tensor.hpp"

namespace qtl::data {

/// Serialized tensor layout, all integers little-endian:
///
///   offset  size      field
///   0       4         magic "QTLT"
///   4       2         format version (1)
///   6       1         dtype code: 1 = uint8, 2 = float32, 3 = float64
///   7       1         rank r
///   8       8 * r     dims, uint64 each
///   8 + 8r  ...       row-major payload, prod(dims) elements of dtype
///
/// No code or object graphs are ever deserialized; readers only accept the
/// fixed layout above.
inline constexpr char kTensorMagic[4] = {'Q', 'T', 'L', 'T'};
inline constexpr std::uint16_t kTensorFormatVersion = 1;

enum class DType : std::uint8_t { kUint8 = 1, kFloat32 = 2, kFloat64 = 3 };

template <class T>
constexpr DType dtype_of();
template <>
constexpr DType dtype_of<std::uint8_t>() { return DType::kUint8; }
template <>
constexpr DType dtype_of<float>() { return DType::kFloat32; }
template <>
constexpr DType dtype_of<double>() { return DType::kFloat64; }

template <class T>
std::vector<std::byte> serialize_tensor(const Tensor<T>& tensor);

/// Throws CorruptionError on any layout violation or dtype mismatch.
template <class T>
Tensor<T> deserialize_tensor(std::span<const std::byte> bytes);

/// Compressed frame: magic "QTLZ", uint64 raw length, then a zlib stream.
std::vector<std::byte> compress_bytes(std::span<const std::byte> raw);
std::vector<std::byte> decompress_bytes(std::span<const std::byte> frame);

/// Codec identity recorded in the cache index, e.g. "zlib 1.2.11".
std::string codec_name();
std::string codec_version();

}  // namespace qtl::data
