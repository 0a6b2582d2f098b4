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

#include "qtl/trainer/checkpoint.hpp"

#include <cstring>
#include <fstream>

#include "qtl/common/errors.hpp"

namespace qtl::train {

namespace {

constexpr char kMagic[4] = {'Q', 'T', 'L', 'C'};
constexpr std::uint16_t kVersion = 1;

class Writer {
 public:
  template <class T>
  void pod(T v) {
    const auto* p = reinterpret_cast<const std::byte*>(&v);
    out_.insert(out_.end(), p, p + sizeof(T));
  }
  void text(const std::string& s) {
    pod(static_cast<std::uint32_t>(s.size()));
    const auto* p = reinterpret_cast<const std::byte*>(s.data());
    out_.insert(out_.end(), p, p + s.size());
  }
  void doubles(const std::vector<double>& v) {
    const auto* p = reinterpret_cast<const std::byte*>(v.data());
    out_.insert(out_.end(), p, p + v.size() * sizeof(double));
  }
  std::vector<std::byte> take() { return std::move(out_); }

 private:
  std::vector<std::byte> out_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::byte> in) : in_(in) {}
  template <class T>
  T pod() {
    T v;
    std::memcpy(&v, need(sizeof(T)), sizeof(T));
    return v;
  }
  std::string text() {
    const auto n = pod<std::uint32_t>();
    const auto* p = reinterpret_cast<const char*>(need(n));
    return std::string(p, n);
  }
  std::vector<double> doubles(std::uint64_t count) {
    if (count > (in_.size() - pos_) / sizeof(double)) throw CorruptionError("checkpoint truncated");
    std::vector<double> v(count);
    std::memcpy(v.data(), need(count * sizeof(double)), count * sizeof(double));
    return v;
  }
  bool done() const { return pos_ == in_.size(); }

 private:
  const std::byte* need(std::size_t n) {
    if (n > in_.size() - pos_) throw CorruptionError("checkpoint truncated");
    const std::byte* p = in_.data() + pos_;
    pos_ += n;
    return p;
  }
  std::span<const std::byte> in_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::byte> encode_checkpoint(const Checkpoint& ckpt) {
  Writer w;
  for (char c : kMagic) w.pod(c);
  w.pod(kVersion);
  w.text(ckpt.config_hash);
  w.pod(ckpt.epoch);
  w.pod(static_cast<std::uint32_t>(ckpt.blocks.size()));
  for (const auto& b : ckpt.blocks) {
    w.text(b.name);
    w.pod(static_cast<std::uint64_t>(b.values.size()));
    w.doubles(b.values);
  }
  w.pod(ckpt.adam.step);
  if (ckpt.adam.first_moment.size() != ckpt.adam.second_moment.size()) {
    throw ArgumentError("Adam moment block counts differ");
  }
  w.pod(static_cast<std::uint32_t>(ckpt.adam.first_moment.size()));
  for (std::size_t i = 0; i < ckpt.adam.first_moment.size(); ++i) {
    w.pod(static_cast<std::uint64_t>(ckpt.adam.first_moment[i].size()));
    w.doubles(ckpt.adam.first_moment[i]);
    w.doubles(ckpt.adam.second_moment[i]);
  }
  return w.take();
}

Checkpoint decode_checkpoint(std::span<const std::byte> bytes) {
  Reader r(bytes);
  for (char c : kMagic) {
    if (r.pod<char>() != c) throw CorruptionError("not a checkpoint file");
  }
  if (r.pod<std::uint16_t>() != kVersion) throw CorruptionError("unsupported checkpoint version");
  Checkpoint ckpt;
  ckpt.config_hash = r.text();
  ckpt.epoch = r.pod<std::uint64_t>();
  const auto blocks = r.pod<std::uint32_t>();
  for (std::uint32_t i = 0; i < blocks; ++i) {
    NamedBlock b;
    b.name = r.text();
    b.values = r.doubles(r.pod<std::uint64_t>());
    ckpt.blocks.push_back(std::move(b));
  }
  ckpt.adam.step = r.pod<std::uint64_t>();
  const auto moments = r.pod<std::uint32_t>();
  for (std::uint32_t i = 0; i < moments; ++i) {
    const auto n = r.pod<std::uint64_t>();
    ckpt.adam.first_moment.push_back(r.doubles(n));
    ckpt.adam.second_moment.push_back(r.doubles(n));
  }
  if (!r.done()) throw CorruptionError("trailing bytes after checkpoint");
  return ckpt;
}

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path) {
  const auto bytes = encode_checkpoint(ckpt);
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw IoError("cannot write " + tmp);
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("short write to " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

Checkpoint load_checkpoint(const std::filesystem::path& path, const std::string& expected_config_hash) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::vector<char> raw((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  Checkpoint ckpt = decode_checkpoint(std::as_bytes(std::span(raw)));
  if (ckpt.config_hash != expected_config_hash) {
    throw CheckpointMismatchError("checkpoint config hash " + ckpt.config_hash +
                                  " does not match " + expected_config_hash);
  }
  return ckpt;
}

}  // namespace qtl::train
