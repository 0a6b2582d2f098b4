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
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "qtl/common/tensor.hpp"

struct sqlite3;

namespace qtl::data {

/// Where a put() may be interrupted by the fault-injection hook.
enum class FaultPoint {
  kNone,
  kMidBlobWrite,   // half of the temp file written
  kBeforeRename,   // temp file complete, not yet published
  kBeforeIndex,    // blob published, index row not yet written
};

/// Thrown by put() when a fault point fires; simulates the process dying.
class InjectedFault : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CacheEntry {
  std::string sample_id;
  std::string path;      // relative to the cache root
  std::string checksum;  // sha256 hex of the blob bytes
  std::string codec;
};

/// On-disk cache of preprocessed tensors.
///
/// Layout under `root`:
///   index.sqlite          meta(key, value) and entries(sample_id, path, checksum, codec)
///   blobs/<aa>/<id hash>-<content hash>.qtz
///                         compressed serialized tensor (see tensor_io.hpp)
///
/// put() writes a temp file, fsyncs, renames it to a fresh content-addressed
/// name, upserts the index row and only then removes the previous blob.
/// Opening the cache removes temp files, blobs without an index row and rows
/// without a blob, so an interrupted put leaves the previous value (or no
/// entry) in place, never a partial one.
///
/// Safe for concurrent get() calls from many threads on one instance.
class TensorCache {
 public:
  explicit TensorCache(std::filesystem::path root);
  ~TensorCache();
  TensorCache(const TensorCache&) = delete;
  TensorCache& operator=(const TensorCache&) = delete;

  const std::filesystem::path& root() const noexcept { return root_; }

  void put(const std::string& sample_id, const FloatTensor& tensor);
  /// nullopt on a miss; CorruptionError on a checksum or layout failure.
  std::optional<FloatTensor> get(const std::string& sample_id) const;
  std::optional<CacheEntry> entry(const std::string& sample_id) const;
  bool contains(const std::string& sample_id) const { return entry(sample_id).has_value(); }
  std::size_t size() const;

  /// Codec recorded in the index header.
  std::string recorded_codec() const;

  void set_fault_injection(FaultPoint point) { fault_ = point; }

 private:
  void open_index();
  void recover();
  std::string relative_blob_path(const std::string& sample_id, const std::string& checksum) const;

  std::filesystem::path root_;
  sqlite3* db_ = nullptr;
  mutable std::mutex mutex_;
  FaultPoint fault_ = FaultPoint::kNone;
};

}  // namespace qtl::data
