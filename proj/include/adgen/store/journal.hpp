// Copyright 2026 The adgen Authors.
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
#include <map>
#include <mutex>
#include <string>
#include <vector>

#include "adgen/store/cache_key.hpp"

namespace adgen::store {

/// One journal line. Each line carries the full record state after a
/// transition, so replay is a fold of "last line wins" per key.
///
///   {"ts":<unix ms>,"key":{...},"status":"ready","object_ref":"...",
///    "attempts":1,"reason":"...","revision":0,"review":true,"snap":false}
///
/// `snap` marks lines written by compaction; those are applied without
/// transition checks.
struct JournalEntry {
  TimePoint ts;
  CreativeRecord record;
  bool snapshot = false;
};

std::string encode_journal_line(const JournalEntry& entry);
/// Throws Error(kInvalidArgument) for a malformed line.
JournalEntry decode_journal_line(const std::string& line);

struct ReplayResult {
  std::map<CacheKey, CreativeRecord> records;
  std::vector<CacheKey> queue;  // Queued keys in FIFO order
  std::size_t lines_applied = 0;
  std::size_t lines_skipped = 0;  // torn, malformed or illegal lines
};

/// Folds journal lines into records. A torn trailing line (crash mid-write)
/// and illegal transitions are skipped with a warning.
ReplayResult replay_journal(const std::filesystem::path& path);

/// Append-only JSON-lines journal. Every append is a single write(2) of a
/// complete line; `durable` additionally fdatasyncs.
class Journal {
 public:
  explicit Journal(std::filesystem::path path, bool durable = false);
  ~Journal();
  Journal(const Journal&) = delete;
  Journal& operator=(const Journal&) = delete;

  /// Throws Error(kStorageFailure).
  void append(const JournalEntry& entry);
  /// Rewrites the journal as snapshot lines (atomically via rename).
  /// Queued records must appear in `entries` in FIFO order after all others.
  void rewrite(const std::vector<JournalEntry>& entries);

  const std::filesystem::path& path() const { return path_; }
  std::size_t lines_written() const;

 private:
  void open_locked();

  std::filesystem::path path_;
  bool durable_;
  int fd_ = -1;
  std::size_t lines_written_ = 0;
  mutable std::mutex mu_;
};

}  // namespace adgen::store
