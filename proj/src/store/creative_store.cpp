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

#include "adgen/store/creative_store.hpp"

#include <algorithm>

#include <spdlog/spdlog.h>

#include "adgen/common/error.hpp"
#include "adgen/common/hash.hpp"

namespace adgen::store {

using S = CreativeStatus;

const char* to_string(LookupKind k) {
  switch (k) {
    case LookupKind::kHit: return "hit";
    case LookupKind::kEnqueued: return "enqueued";
    case LookupKind::kInFlight: return "in_flight";
    case LookupKind::kRejected: return "rejected";
    case LookupKind::kFailed: return "failed";
  }
  return "unknown";
}

std::uint64_t job_seed(const CacheKey& key, int revision) {
  std::string material = key.to_string();
  if (revision > 0) material += "#" + std::to_string(revision);
  return stable_hash64(material);
}

CreativeStore::CreativeStore(std::filesystem::path journal_path, const Clock& clock,
                             StoreConfig config)
    : clock_(clock), config_(config), journal_(journal_path, config.durable) {
  if (config_.max_attempts < 1) throw Error(ErrorCode::kInvalidArgument, "max_attempts must be >= 1");
  auto replayed = replay_journal(journal_path);
  records_ = std::move(replayed.records);
  queue_.assign(replayed.queue.begin(), replayed.queue.end());
  if (!records_.empty()) {
    spdlog::info("creative store: replayed {} records ({} queued, {} lines skipped)",
                 records_.size(), queue_.size(), replayed.lines_skipped);
  }
}

void CreativeStore::commit_locked(const CreativeRecord& next) {
  journal_.append({next.updated, next, false});
  records_[next.key] = next;
}

CreativeRecord& CreativeStore::require_locked(const CacheKey& key) {
  auto it = records_.find(key);
  if (it == records_.end()) throw Error(ErrorCode::kNotFound, "no creative " + key.to_string());
  return it->second;
}

Lookup CreativeStore::get_or_enqueue(const CacheKey& key) {
  key.validate();
  std::unique_lock lock(mu_);
  if (auto it = records_.find(key); it != records_.end()) {
    const auto& rec = it->second;
    switch (rec.status) {
      case S::kReady: return {LookupKind::kHit, rec.object_ref, rec.review_pending};
      case S::kQueued:
      case S::kGenerating: return {LookupKind::kInFlight, std::nullopt, false};
      case S::kRejected: return {LookupKind::kRejected, std::nullopt, false};
      case S::kFailed: return {LookupKind::kFailed, std::nullopt, false};
    }
  }
  if (queue_.size() >= config_.max_queue) {
    throw Error(ErrorCode::kQueueFull, "generation queue at capacity " + std::to_string(config_.max_queue));
  }
  CreativeRecord rec;
  rec.key = key;
  rec.status = S::kQueued;
  rec.created = rec.updated = clock_.now();
  commit_locked(rec);
  queue_.push_back(key);
  lock.unlock();
  cv_.notify_one();
  return {LookupKind::kEnqueued, std::nullopt, false};
}

std::optional<GenerationJob> CreativeStore::pop_locked() {
  while (!queue_.empty()) {
    const CacheKey key = queue_.front();
    auto it = records_.find(key);
    if (it == records_.end() || it->second.status != S::kQueued) {
      queue_.pop_front();
      continue;
    }
    CreativeRecord next = it->second;
    next.status = S::kGenerating;
    next.attempts += 1;
    next.updated = clock_.now();
    commit_locked(next);
    queue_.pop_front();
    return GenerationJob{key, next.attempts, next.revision};
  }
  return std::nullopt;
}

std::optional<GenerationJob> CreativeStore::dequeue() {
  std::lock_guard lock(mu_);
  return pop_locked();
}

std::optional<GenerationJob> CreativeStore::wait_dequeue(Millis timeout) {
  std::unique_lock lock(mu_);
  cv_.wait_for(lock, timeout, [&] { return shutdown_ || !queue_.empty(); });
  if (shutdown_) return std::nullopt;
  return pop_locked();
}

CreativeRecord CreativeStore::complete_ready(const CacheKey& key, const std::string& object_ref,
                                             bool review_pending) {
  if (!is_sha256_hex(object_ref)) throw Error(ErrorCode::kInvalidArgument, "malformed object ref");
  std::lock_guard lock(mu_);
  CreativeRecord next = require_locked(key);
  if (next.status != S::kGenerating) {
    throw Error(ErrorCode::kIllegalTransition,
                std::string(to_string(next.status)) + " -> ready for " + key.to_string());
  }
  next.status = S::kReady;
  next.object_ref = object_ref;
  next.failure_reason.reset();
  next.review_pending = review_pending;
  next.updated = clock_.now();
  commit_locked(next);
  return next;
}

CreativeRecord CreativeStore::fail_attempt_locked(CreativeRecord next, const std::string& reason,
                                                  bool retryable) {
  next.failure_reason = reason;
  next.updated = clock_.now();
  if (retryable && next.attempts < config_.max_attempts) {
    next.status = S::kQueued;
    commit_locked(next);
    queue_.push_back(next.key);
    cv_.notify_one();
  } else {
    next.status = S::kFailed;
    commit_locked(next);
  }
  return next;
}

CreativeRecord CreativeStore::complete_failed(const CacheKey& key, const std::string& reason,
                                             bool retryable) {
  std::lock_guard lock(mu_);
  const CreativeRecord& rec = require_locked(key);
  if (rec.status != S::kGenerating) {
    throw Error(ErrorCode::kIllegalTransition,
                std::string(to_string(rec.status)) + " -> failed for " + key.to_string());
  }
  return fail_attempt_locked(rec, reason, retryable);
}

CreativeRecord CreativeStore::reject(const CacheKey& key) {
  std::lock_guard lock(mu_);
  CreativeRecord next = require_locked(key);
  if (next.status != S::kReady) {
    throw Error(ErrorCode::kIllegalTransition,
                std::string(to_string(next.status)) + " -> rejected for " + key.to_string());
  }
  next.status = S::kRejected;
  next.review_pending = false;
  next.updated = clock_.now();
  commit_locked(next);
  return next;
}

CreativeRecord CreativeStore::approve(const CacheKey& key) {
  std::lock_guard lock(mu_);
  CreativeRecord next = require_locked(key);
  if (next.status != S::kReady) {
    throw Error(ErrorCode::kIllegalTransition,
                std::string("approve requires ready, record is ") + to_string(next.status));
  }
  if (!next.review_pending) return next;
  next.review_pending = false;
  next.updated = clock_.now();
  commit_locked(next);
  return next;
}

CreativeRecord CreativeStore::regenerate(const CacheKey& key) {
  std::lock_guard lock(mu_);
  CreativeRecord next = require_locked(key);
  if (next.status != S::kRejected && next.status != S::kFailed) {
    throw Error(ErrorCode::kIllegalTransition,
                std::string("regenerate requires rejected or failed, record is ") + to_string(next.status));
  }
  next.status = S::kQueued;
  next.revision += 1;
  next.attempts = 0;
  next.object_ref.reset();
  next.failure_reason.reset();
  next.review_pending = false;
  next.updated = clock_.now();
  commit_locked(next);
  queue_.push_back(key);
  cv_.notify_one();
  return next;
}

std::vector<CacheKey> CreativeStore::sweep_stale() {
  std::lock_guard lock(mu_);
  const auto now = clock_.now();
  std::vector<CacheKey> stale;
  for (const auto& [key, rec] : records_) {
    if (rec.status == S::kGenerating && now - rec.updated >= config_.lease) stale.push_back(key);
  }
  for (const auto& key : stale) {
    spdlog::warn("lease expired for {}; treating attempt as failed", key.to_string());
    fail_attempt_locked(records_.at(key), "lease expired", true);
  }
  return stale;
}

std::optional<CreativeRecord> CreativeStore::get(const CacheKey& key) const {
  std::lock_guard lock(mu_);
  auto it = records_.find(key);
  if (it == records_.end()) return std::nullopt;
  return it->second;
}

std::vector<CreativeRecord> CreativeStore::list() const {
  std::lock_guard lock(mu_);
  std::vector<CreativeRecord> out;
  out.reserve(records_.size());
  for (const auto& [key, rec] : records_) out.push_back(rec);
  return out;
}

std::vector<CreativeRecord> CreativeStore::pending_review(std::size_t limit) const {
  std::vector<CreativeRecord> out;
  for (auto& rec : list()) {
    if ((rec.status == S::kReady && rec.review_pending) || rec.status == S::kFailed) {
      out.push_back(std::move(rec));
    }
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const CreativeRecord& a, const CreativeRecord& b) { return a.updated < b.updated; });
  if (out.size() > limit) out.resize(limit);
  return out;
}

std::size_t CreativeStore::queue_length() const {
  std::lock_guard lock(mu_);
  return queue_.size();
}

std::size_t CreativeStore::size() const {
  std::lock_guard lock(mu_);
  return records_.size();
}

void CreativeStore::compact() {
  std::lock_guard lock(mu_);
  std::vector<JournalEntry> entries;
  entries.reserve(records_.size());
  for (const auto& [key, rec] : records_) {
    if (rec.status != S::kQueued) entries.push_back({rec.updated, rec, true});
  }
  for (const auto& key : queue_) {
    const auto& rec = records_.at(key);
    if (rec.status == S::kQueued) entries.push_back({rec.updated, rec, true});
  }
  journal_.rewrite(entries);
}

void CreativeStore::shutdown() {
  {
    std::lock_guard lock(mu_);
    shutdown_ = true;
  }
  cv_.notify_all();
}

}  // namespace adgen::store
