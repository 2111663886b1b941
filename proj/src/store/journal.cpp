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

#include "adgen/store/journal.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <fstream>

#include <spdlog/spdlog.h>

#include "adgen/common/error.hpp"

namespace adgen::store {

namespace fs = std::filesystem;

std::string encode_journal_line(const JournalEntry& entry) {
  const auto& r = entry.record;
  nlohmann::json j = {
      {"ts", to_unix_millis(entry.ts)},
      {"key", to_json(r.key)},
      {"status", to_string(r.status)},
      {"attempts", r.attempts},
      {"revision", r.revision},
      {"created", to_unix_millis(r.created)},
      {"review", r.review_pending},
      {"snap", entry.snapshot},
  };
  if (r.object_ref) j["object_ref"] = *r.object_ref;
  if (r.failure_reason) j["reason"] = *r.failure_reason;
  return j.dump() + "\n";
}

JournalEntry decode_journal_line(const std::string& line) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kInvalidArgument, std::string("journal line: ") + e.what());
  }
  try {
    JournalEntry e;
    e.ts = from_unix_millis(j.at("ts").get<std::int64_t>());
    e.snapshot = j.value("snap", false);
    auto& r = e.record;
    r.key = key_from_json(j.at("key"));
    r.status = status_from_string(j.at("status").get<std::string>());
    r.attempts = j.at("attempts").get<int>();
    r.revision = j.value("revision", 0);
    r.created = from_unix_millis(j.value("created", to_unix_millis(e.ts)));
    r.updated = e.ts;
    r.review_pending = j.value("review", false);
    if (j.contains("object_ref")) r.object_ref = j["object_ref"].get<std::string>();
    if (j.contains("reason")) r.failure_reason = j["reason"].get<std::string>();
    return e;
  } catch (const nlohmann::json::exception& ex) {
    throw Error(ErrorCode::kInvalidArgument, std::string("journal line: ") + ex.what());
  }
}

ReplayResult replay_journal(const fs::path& path) {
  ReplayResult out;
  std::ifstream in(path, std::ios::binary);
  if (!in) return out;

  std::map<CacheKey, std::size_t> queued_at;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const bool complete = !in.eof();
    JournalEntry e;
    try {
      e = decode_journal_line(line);
    } catch (const Error& err) {
      spdlog::warn("journal {}:{} skipped ({}){}", path.string(), lineno, err.what(),
                   complete ? "" : " torn tail");
      ++out.lines_skipped;
      continue;
    }

    auto it = out.records.find(e.record.key);
    if (!e.snapshot) {
      const bool ok = it == out.records.end()
                          ? e.record.status == CreativeStatus::kQueued
                          : is_legal_transition(it->second.status, e.record.status) ||
                                (it->second.status == e.record.status &&
                                 e.record.status == CreativeStatus::kReady);
      if (!ok) {
        spdlog::warn("journal {}:{} illegal transition for {} skipped", path.string(), lineno,
                     e.record.key.to_string());
        ++out.lines_skipped;
        continue;
      }
    }

    if (e.record.status == CreativeStatus::kQueued) {
      const bool requeue = it == out.records.end() || it->second.status != CreativeStatus::kQueued;
      if (requeue) queued_at[e.record.key] = lineno;
    } else {
      queued_at.erase(e.record.key);
    }
    out.records[e.record.key] = e.record;
    ++out.lines_applied;
  }

  std::vector<std::pair<std::size_t, CacheKey>> order;
  order.reserve(queued_at.size());
  for (const auto& [key, seq] : queued_at) order.emplace_back(seq, key);
  std::sort(order.begin(), order.end());
  for (auto& [seq, key] : order) out.queue.push_back(key);
  return out;
}

Journal::Journal(fs::path path, bool durable) : path_(std::move(path)), durable_(durable) {
  std::lock_guard lock(mu_);
  open_locked();
}

Journal::~Journal() {
  if (fd_ >= 0) ::close(fd_);
}

void Journal::open_locked() {
  std::error_code ec;
  if (path_.has_parent_path()) fs::create_directories(path_.parent_path(), ec);
  fd_ = ::open(path_.c_str(), O_WRONLY | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
  if (fd_ < 0) {
    throw Error(ErrorCode::kStorageFailure, "open " + path_.string() + ": " + std::strerror(errno));
  }
  // A torn tail from a previous crash must not swallow the next line.
  const auto size = fs::file_size(path_, ec);
  if (!ec && size > 0) {
    std::ifstream in(path_, std::ios::binary);
    in.seekg(static_cast<std::streamoff>(size) - 1);
    char last = '\n';
    in.get(last);
    if (last != '\n' && ::write(fd_, "\n", 1) != 1) {
      throw Error(ErrorCode::kStorageFailure, "repair " + path_.string() + ": " + std::strerror(errno));
    }
  }
}

void Journal::append(const JournalEntry& entry) {
  const std::string line = encode_journal_line(entry);
  std::lock_guard lock(mu_);
  std::size_t off = 0;
  while (off < line.size()) {
    const auto n = ::write(fd_, line.data() + off, line.size() - off);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw Error(ErrorCode::kStorageFailure, "append " + path_.string() + ": " + std::strerror(errno));
    }
    off += static_cast<std::size_t>(n);
  }
  if (durable_ && ::fdatasync(fd_) != 0) {
    throw Error(ErrorCode::kStorageFailure, "fdatasync " + path_.string() + ": " + std::strerror(errno));
  }
  ++lines_written_;
}

void Journal::rewrite(const std::vector<JournalEntry>& entries) {
  std::lock_guard lock(mu_);
  const auto tmp = path_.string() + ".compact";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    for (auto e : entries) {
      e.snapshot = true;
      out << encode_journal_line(e);
    }
    out.flush();
    if (!out) throw Error(ErrorCode::kStorageFailure, "write " + tmp);
  }
  if (durable_) {
    const int tfd = ::open(tmp.c_str(), O_RDONLY | O_CLOEXEC);
    if (tfd >= 0) {
      ::fsync(tfd);
      ::close(tfd);
    }
  }
  std::error_code ec;
  fs::rename(tmp, path_, ec);
  if (ec) throw Error(ErrorCode::kStorageFailure, "rename " + tmp + ": " + ec.message());
  ::close(fd_);
  fd_ = -1;
  open_locked();
}

std::size_t Journal::lines_written() const {
  std::lock_guard lock(mu_);
  return lines_written_;
}

}  // namespace adgen::store
