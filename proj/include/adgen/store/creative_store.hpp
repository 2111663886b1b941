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

#include <chrono>
#include <condition_variable>
#include <deque>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "adgen/common/clock.hpp"
#include "adgen/store/cache_key.hpp"
#include "adgen/store/journal.hpp"

namespace adgen::store {

struct StoreConfig {
  std::size_t max_queue = 10'000;
  int max_attempts = 3;
  Millis lease{std::chrono::minutes(10)};
  bool durable = false;
};

enum class LookupKind { kHit, kEnqueued, kInFlight, kRejected, kFailed };
const char* to_string(LookupKind k);

struct Lookup {
  LookupKind kind;
  std::optional<std::string> object_ref;  // set for kHit
  bool review_pending = false;
};

/// Handed to a worker by dequeue(). `attempt` is 1-based within the revision.
struct GenerationJob {
  CacheKey key;
  int attempt = 1;
  int revision = 0;
};

/// Per-job seed: stable hash of the key, salted with the revision once a
/// human has asked for regeneration.
std::uint64_t job_seed(const CacheKey& key, int revision);

/// The creative index, lifecycle state machine and FIFO generation queue.
/// Every operation is an atomic check-and-act under one mutex and is
/// journaled before the in-memory state changes.
class CreativeStore {
 public:
  CreativeStore(std::filesystem::path journal_path, const Clock& clock, StoreConfig config = {});

  /// Ready -> Hit, none -> Enqueued, Queued/Generating -> InFlight,
  /// Rejected -> Rejected, terminal Failed -> Failed (not re-enqueued).
  /// Throws Error(kQueueFull) or Error(kStorageFailure).
  Lookup get_or_enqueue(const CacheKey& key);

  std::optional<GenerationJob> dequeue();
  /// Blocks until a job is available, `timeout` elapses or shutdown().
  std::optional<GenerationJob> wait_dequeue(Millis timeout);

  /// Generating -> Ready. `review_pending` marks it for the review queue.
  CreativeRecord complete_ready(const CacheKey& key, const std::string& object_ref,
                                bool review_pending);
  /// Generating -> Queued (retryable and attempts < max) or terminal Failed.
  CreativeRecord complete_failed(const CacheKey& key, const std::string& reason, bool retryable = true);

  /// Ready -> Rejected.
  CreativeRecord reject(const CacheKey& key);
  /// Clears the review flag of a Ready record.
  CreativeRecord approve(const CacheKey& key);
  /// Rejected | Failed -> Queued with a bumped revision.
  CreativeRecord regenerate(const CacheKey& key);

  /// Re-queues (or fails) Generating records whose lease has expired.
  /// Returns the affected keys.
  std::vector<CacheKey> sweep_stale();

  std::optional<CreativeRecord> get(const CacheKey& key) const;
  std::vector<CreativeRecord> list() const;
  /// Ready records awaiting review and terminal failures, oldest first.
  std::vector<CreativeRecord> pending_review(std::size_t limit) const;
  std::size_t queue_length() const;
  std::size_t size() const;

  /// Rewrites the journal as one snapshot line per record.
  void compact();
  void shutdown();

 private:
  void commit_locked(const CreativeRecord& next);
  CreativeRecord& require_locked(const CacheKey& key);
  CreativeRecord fail_attempt_locked(CreativeRecord rec, const std::string& reason, bool retryable);
  std::optional<GenerationJob> pop_locked();

  const Clock& clock_;
  StoreConfig config_;
  Journal journal_;
  mutable std::mutex mu_;
  std::condition_variable cv_;
  std::map<CacheKey, CreativeRecord> records_;
  std::deque<CacheKey> queue_;
  bool shutdown_ = false;
};

}  // namespace adgen::store
