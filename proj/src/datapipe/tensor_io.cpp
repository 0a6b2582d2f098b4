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

#include "qtl/datapipe/tensor_io.hpp"

#include <zlib.h>

#include <bit>
#include <cstring>
#include <string>

#include "qtl/common/errors.hpp"

static_assert(std::endian::native == std::endian::little,
              "tensor serialization assumes a little-endian host");

namespace qtl::data {

namespace {

template <class T>
void put(std::vector<std::byte>& out, T value) {
  const auto* p = reinterpret_cast<const std::byte*>(&value);
  out.insert(out.end(), p, p + sizeof(T));
}

template <class T>
T get(std::span<const std::byte> in, std::size_t& offset) {
  if (offset + sizeof(T) > in.size()) throw CorruptionError("tensor blob truncated");
  T value;
  std::memcpy(&value, in.data() + offset, sizeof(T));
  offset += sizeof(T);
  return value;
}

constexpr char kFrameMagic[4] = {'Q', 'T', 'L', 'Z'};

}  // namespace

template <class T>
std::vector<std::byte> serialize_tensor(const Tensor<T>& tensor) {
  if (tensor.shape.size() > 255) throw ArgumentError("tensor rank exceeds 255");
  if (Tensor<T>::element_count(tensor.shape) != tensor.data.size()) {
    throw ArgumentError("tensor data does not match its shape");
  }
  std::vector<std::byte> out;
  out.reserve(8 + 8 * tensor.shape.size() + tensor.data.size() * sizeof(T));
  for (char c : kTensorMagic) out.push_back(static_cast<std::byte>(c));
  put<std::uint16_t>(out, kTensorFormatVersion);
  put<std::uint8_t>(out, static_cast<std::uint8_t>(dtype_of<T>()));
  put<std::uint8_t>(out, static_cast<std::uint8_t>(tensor.shape.size()));
  for (std::size_t d : tensor.shape) put<std::uint64_t>(out, d);
  const auto* p = reinterpret_cast<const std::byte*>(tensor.data.data());
  out.insert(out.end(), p, p + tensor.data.size() * sizeof(T));
  return out;
}

template <class T>
Tensor<T> deserialize_tensor(std::span<const std::byte> bytes) {
  if (bytes.size() < 8 || std::memcmp(bytes.data(), kTensorMagic, 4) != 0) {
    throw CorruptionError("not a serialized tensor (bad magic)");
  }
  std::size_t offset = 4;
  const auto version = get<std::uint16_t>(bytes, offset);
  if (version != kTensorFormatVersion) {
    throw CorruptionError("unsupported tensor format version " + std::to_string(version));
  }
  const auto dtype = get<std::uint8_t>(bytes, offset);
  if (dtype != static_cast<std::uint8_t>(dtype_of<T>())) {
    throw CorruptionError("tensor dtype code " + std::to_string(dtype) + " does not match");
  }
  const auto rank = get<std::uint8_t>(bytes, offset);
  Tensor<T> tensor;
  for (std::uint8_t i = 0; i < rank; ++i) {
    tensor.shape.push_back(static_cast<std::size_t>(get<std::uint64_t>(bytes, offset)));
  }
  const std::size_t count = Tensor<T>::element_count(tensor.shape);
  if (bytes.size() - offset != count * sizeof(T)) {
    throw CorruptionError("tensor payload length does not match its dims");
  }
  tensor.data.resize(count);
  std::memcpy(tensor.data.data(), bytes.data() + offset, count * sizeof(T));
  return tensor;
}

template std::vector<std::byte> serialize_tensor(const Tensor<std::uint8_t>&);
template std::vector<std::byte> serialize_tensor(const Tensor<float>&);
template std::vector<std::byte> serialize_tensor(const Tensor<double>&);
template Tensor<std::uint8_t> deserialize_tensor(std::span<const std::byte>);
template Tensor<float> deserialize_tensor(std::span<const std::byte>);
template Tensor<double> deserialize_tensor(std::span<const std::byte>);

std::vector<std::byte> compress_bytes(std::span<const std::byte> raw) {
  uLongf bound = compressBound(static_cast<uLong>(raw.size()));
  std::vector<std::byte> out(12 + bound);
  std::memcpy(out.data(), kFrameMagic, 4);
  const std::uint64_t raw_len = raw.size();
  std::memcpy(out.data() + 4, &raw_len, 8);
  const int rc = compress2(reinterpret_cast<Bytef*>(out.data() + 12), &bound,
                           reinterpret_cast<const Bytef*>(raw.data()),
                           static_cast<uLong>(raw.size()), 6);
  if (rc != Z_OK) throw IoError("zlib compression failed (" + std::to_string(rc) + ")");
  out.resize(12 + bound);
  return out;
}

std::vector<std::byte> decompress_bytes(std::span<const std::byte> frame) {
  if (frame.size() < 12 || std::memcmp(frame.data(), kFrameMagic, 4) != 0) {
    throw CorruptionError("not a compressed frame (bad magic)");
  }
  std::uint64_t raw_len = 0;
  std::memcpy(&raw_len, frame.data() + 4, 8);
  std::vector<std::byte> out(raw_len);
  uLongf dest_len = static_cast<uLongf>(raw_len);
  const int rc = uncompress(reinterpret_cast<Bytef*>(out.data()), &dest_len,
                            reinterpret_cast<const Bytef*>(frame.data() + 12),
                            static_cast<uLong>(frame.size() - 12));
  if (rc != Z_OK || dest_len != raw_len) {
    throw CorruptionError("zlib stream is damaged (" + std::to_string(rc) + ")");
  }
  return out;
}

std::string codec_name() { return "zlib"; }
std::string codec_version() { return zlibVersion(); }

}  // namespace qtl::data
