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

#include "qtl/datapipe/cache.hpp"

#include <fcntl.h>
#include <sqlite3.h>
#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <fstream>
#include <set>

#include "qtl/common/errors.hpp"
#include "qtl/common/hash.hpp"
#include "qtl/datapipe/tensor_io.hpp"

namespace qtl::data {

namespace fs = std::filesystem;

namespace {

constexpr const char* kTempSuffix = ".partial";

class Statement {
 public:
  Statement(sqlite3* db, const char* sql) : db_(db) {
    if (sqlite3_prepare_v2(db, sql, -1, &stmt_, nullptr) != SQLITE_OK) {
      throw IoError(std::string("sqlite prepare failed: ") + sqlite3_errmsg(db));
    }
  }
  ~Statement() { sqlite3_finalize(stmt_); }
  Statement(const Statement&) = delete;
  Statement& operator=(const Statement&) = delete;

  Statement& bind(int i, const std::string& s) {
    sqlite3_bind_text(stmt_, i, s.c_str(), static_cast<int>(s.size()), SQLITE_TRANSIENT);
    return *this;
  }
  bool step() {
    const int rc = sqlite3_step(stmt_);
    if (rc == SQLITE_ROW) return true;
    if (rc == SQLITE_DONE) return false;
    throw IoError(std::string("sqlite step failed: ") + sqlite3_errmsg(db_));
  }
  std::string text(int col) const {
    const auto* p = sqlite3_column_text(stmt_, col);
    return p ? reinterpret_cast<const char*>(p) : "";
  }
  long long integer(int col) const { return sqlite3_column_int64(stmt_, col); }

 private:
  sqlite3* db_;
  sqlite3_stmt* stmt_ = nullptr;
};

void exec(sqlite3* db, const char* sql) {
  char* err = nullptr;
  if (sqlite3_exec(db, sql, nullptr, nullptr, &err) != SQLITE_OK) {
    std::string msg = err ? err : "unknown";
    sqlite3_free(err);
    throw IoError("sqlite: " + msg);
  }
}

void write_file_synced(const fs::path& path, std::span<const std::byte> bytes,
                       std::size_t stop_after) {
  const int fd = ::open(path.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
  if (fd < 0) throw IoError("cannot create " + path.string());
  std::size_t written = 0;
  const std::size_t limit = std::min(stop_after, bytes.size());
  while (written < limit) {
    const ssize_t n = ::write(fd, bytes.data() + written, limit - written);
    if (n <= 0) {
      ::close(fd);
      throw IoError("short write to " + path.string());
    }
    written += static_cast<std::size_t>(n);
  }
  ::fsync(fd);
  ::close(fd);
}

std::vector<std::byte> read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CorruptionError("index references missing blob " + path.string());
  in.seekg(0, std::ios::end);
  std::vector<std::byte> bytes(static_cast<std::size_t>(in.tellg()));
  in.seekg(0);
  in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  return bytes;
}

std::atomic<unsigned> g_temp_counter{0};

}  // namespace

TensorCache::TensorCache(fs::path root) : root_(std::move(root)) {
  fs::create_directories(root_ / "blobs");
  open_index();
  recover();
}

TensorCache::~TensorCache() {
  if (db_ != nullptr) sqlite3_close(db_);
}

void TensorCache::open_index() {
  const auto path = (root_ / "index.sqlite").string();
  if (sqlite3_open_v2(path.c_str(), &db_,
                      SQLITE_OPEN_READWRITE | SQLITE_OPEN_CREATE | SQLITE_OPEN_FULLMUTEX,
                      nullptr) != SQLITE_OK) {
    throw IoError("cannot open cache index " + path);
  }
  sqlite3_busy_timeout(db_, 5000);
  exec(db_, "PRAGMA journal_mode=WAL;");
  exec(db_,
       "CREATE TABLE IF NOT EXISTS meta (key TEXT PRIMARY KEY, value TEXT NOT NULL);"
       "CREATE TABLE IF NOT EXISTS entries ("
       "  sample_id TEXT PRIMARY KEY, path TEXT NOT NULL,"
       "  checksum TEXT NOT NULL, codec TEXT NOT NULL);");
  const std::string codec = codec_name() + " " + codec_version();
  Statement existing(db_, "SELECT value FROM meta WHERE key = 'codec'");
  if (existing.step()) {
    if (existing.text(0) != codec) {
      throw CorruptionError("cache was written with codec '" + existing.text(0) +
                            "', this build uses '" + codec + "'");
    }
  } else {
    Statement ins(db_, "INSERT INTO meta (key, value) VALUES ('codec', ?1), ('format', ?2)");
    ins.bind(1, codec).bind(2, "qtl-tensor-v" + std::to_string(kTensorFormatVersion));
    ins.step();
  }
}

void TensorCache::recover() {
  std::lock_guard lock(mutex_);
  std::set<std::string> indexed;
  std::vector<std::string> dangling;
  {
    Statement rows(db_, "SELECT sample_id, path FROM entries");
    while (rows.step()) {
      const std::string path = rows.text(1);
      if (fs::exists(root_ / path)) {
        indexed.insert(path);
      } else {
        dangling.push_back(rows.text(0));
      }
    }
  }
  for (const auto& id : dangling) {
    Statement del(db_, "DELETE FROM entries WHERE sample_id = ?1");
    del.bind(1, id).step();
  }
  for (const auto& item : fs::recursive_directory_iterator(root_ / "blobs")) {
    if (!item.is_regular_file()) continue;
    const std::string rel = fs::relative(item.path(), root_).generic_string();
    if (!indexed.count(rel)) fs::remove(item.path());
  }
}

std::string TensorCache::relative_blob_path(const std::string& sample_id,
                                            const std::string& checksum) const {
  const std::string h = sha256_hex(sample_id);
  return "blobs/" + h.substr(0, 2) + "/" + h.substr(0, 24) + "-" + checksum.substr(0, 16) + ".qtz";
}

void TensorCache::put(const std::string& sample_id, const FloatTensor& tensor) {
  const auto blob = compress_bytes(serialize_tensor(tensor));
  const std::string checksum = sha256_hex(blob);
  const std::string rel = relative_blob_path(sample_id, checksum);
  const fs::path final_path = root_ / rel;
  fs::create_directories(final_path.parent_path());
  const fs::path temp_path =
      final_path.string() + "." + std::to_string(::getpid()) + "." +
      std::to_string(g_temp_counter.fetch_add(1)) + kTempSuffix;

  if (fault_ == FaultPoint::kMidBlobWrite) {
    write_file_synced(temp_path, blob, blob.size() / 2);
    throw InjectedFault("fault injected mid blob write");
  }
  write_file_synced(temp_path, blob, blob.size());
  if (fault_ == FaultPoint::kBeforeRename) throw InjectedFault("fault injected before rename");

  std::lock_guard lock(mutex_);
  // The new blob gets its own content-addressed name, so the previous entry
  // stays readable until the row switches over.
  std::optional<std::string> previous;
  {
    Statement q(db_, "SELECT path FROM entries WHERE sample_id = ?1");
    q.bind(1, sample_id);
    if (q.step()) previous = q.text(0);
  }
  fs::rename(temp_path, final_path);
  if (fault_ == FaultPoint::kBeforeIndex) throw InjectedFault("fault injected before index");
  Statement up(db_,
               "INSERT OR REPLACE INTO entries (sample_id, path, checksum, codec) "
               "VALUES (?1, ?2, ?3, ?4)");
  up.bind(1, sample_id).bind(2, rel).bind(3, checksum).bind(4, codec_name()).step();
  if (previous && *previous != rel) {
    std::error_code ec;
    fs::remove(root_ / *previous, ec);
  }
}

std::optional<CacheEntry> TensorCache::entry(const std::string& sample_id) const {
  std::lock_guard lock(mutex_);
  Statement q(db_, "SELECT path, checksum, codec FROM entries WHERE sample_id = ?1");
  q.bind(1, sample_id);
  if (!q.step()) return std::nullopt;
  return CacheEntry{sample_id, q.text(0), q.text(1), q.text(2)};
}

std::optional<FloatTensor> TensorCache::get(const std::string& sample_id) const {
  const auto e = entry(sample_id);
  if (!e) return std::nullopt;
  auto e_now = *e;
  if (!fs::exists(root_ / e_now.path)) {
    // A concurrent put may have replaced the entry between lookup and read.
    const auto again = entry(sample_id);
    if (!again) return std::nullopt;
    e_now = *again;
  }
  const auto blob = read_file(root_ / e_now.path);
  if (sha256_hex(blob) != e_now.checksum) {
    throw CorruptionError("checksum mismatch for cached sample '" + sample_id + "'");
  }
  return deserialize_tensor<float>(decompress_bytes(blob));
}

std::size_t TensorCache::size() const {
  std::lock_guard lock(mutex_);
  Statement q(db_, "SELECT COUNT(*) FROM entries");
  q.step();
  return static_cast<std::size_t>(q.integer(0));
}

std::string TensorCache::recorded_codec() const {
  std::lock_guard lock(mutex_);
  Statement q(db_, "SELECT value FROM meta WHERE key = 'codec'");
  return q.step() ? q.text(0) : "";
}

}  // namespace qtl::data
