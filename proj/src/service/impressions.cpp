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

#include "adgen/service/impressions.hpp"

#include <spdlog/spdlog.h>

#include "adgen/common/error.hpp"

namespace adgen::service {

using nlohmann::json;

FeedbackEvent feedback_event_from_string(const std::string& s) {
  if (s == "impression") return FeedbackEvent::kImpression;
  if (s == "click") return FeedbackEvent::kClick;
  throw Error(ErrorCode::kBadRequest, "event must be impression or click, got '" + s + "'");
}

const char* to_string(RewardState s) {
  switch (s) {
    case RewardState::kPending: return "pending";
    case RewardState::kRewarded: return "rewarded";
    case RewardState::kExpired: return "expired";
  }
  return "unknown";
}

const char* to_string(Variant v) { return v == Variant::kGenerated ? "generated" : "original"; }

const char* to_string(FeedbackOutcome o) {
  switch (o) {
    case FeedbackOutcome::kImpressionLogged: return "impression_logged";
    case FeedbackOutcome::kRewarded: return "rewarded";
    case FeedbackOutcome::kLateClick: return "late_click";
    case FeedbackOutcome::kDuplicate: return "duplicate";
    case FeedbackOutcome::kUnknownRequest: return "unknown_request";
  }
  return "unknown";
}

FeedbackLog::FeedbackLog(std::filesystem::path path) : path_(std::move(path)) {
  std::error_code ec;
  if (path_.has_parent_path()) std::filesystem::create_directories(path_.parent_path(), ec);
  out_.open(path_, std::ios::app | std::ios::binary);
  if (!out_) throw Error(ErrorCode::kStorageFailure, "cannot open feedback journal " + path_.string());
}

void FeedbackLog::append(const json& line) {
  const std::string text = line.dump() + "\n";
  std::lock_guard lock(mu_);
  out_.write(text.data(), static_cast<std::streamsize>(text.size()));
  out_.flush();
  if (!out_) spdlog::error("feedback journal write failed: {}", path_.string());
}

AttributionTracker::AttributionTracker(const Clock& clock, Millis window, FeedbackLog& log, RewardSink sink)
    : clock_(clock), window_(window), log_(log), sink_(std::move(sink)) {
  if (window_ <= Millis(0)) throw Error(ErrorCode::kInvalidArgument, "attribution window must be positive");
}

void AttributionTracker::log_locked(const Entry& e, const char* event, TimePoint ts) {
  log_.append({{"ts", to_unix_millis(ts)},
               {"request_id", e.req.request_id},
               {"group", to_string(e.req.group)},
               {"prompt_id", e.req.prompt_id ? json(*e.req.prompt_id) : json()},
               {"variant", to_string(e.req.variant)},
               {"event", event}});
}

void AttributionTracker::settle_locked(Entry& e, RewardState s, TimePoint now) {
  e.state = s;
  if (s == RewardState::kRewarded) {
    ++counters_.rewarded;
  } else {
    ++counters_.expired;
  }
  if (e.req.trainable && e.req.prompt_id && sink_) {
    sink_(*e.req.prompt_id, e.req.context, s == RewardState::kRewarded ? 1 : 0);
    ++counters_.updates;
  }
  e.retire_at = now + window_;
  retirements_.emplace(e.retire_at, e.req.request_id);
}

void AttributionTracker::record_request(ServedRequest req) {
  if (req.trainable && (!req.prompt_id || req.context.size() == 0)) {
    throw Error(ErrorCode::kInvalidArgument, "trainable request needs a prompt and a context");
  }
  const auto now = clock_.now();
  std::lock_guard lock(mu_);
  Entry e{std::move(req), now, std::nullopt, std::nullopt, now + 2 * window_};
  const std::string id = e.req.request_id;
  log_locked(e, "request", now);
  retirements_.emplace(e.retire_at, id);
  entries_.insert_or_assign(id, std::move(e));
}

FeedbackOutcome AttributionTracker::on_event(const std::string& request_id, FeedbackEvent event) {
  const auto now = clock_.now();
  std::lock_guard lock(mu_);
  auto it = entries_.find(request_id);
  if (it == entries_.end()) {
    ++counters_.unknown;
    spdlog::warn("feedback for unknown request_id '{}' ignored", request_id);
    return FeedbackOutcome::kUnknownRequest;
  }
  Entry& e = it->second;
  if (event == FeedbackEvent::kImpression) {
    if (e.impression) {
      ++counters_.duplicates;
      return FeedbackOutcome::kDuplicate;
    }
    e.impression = now;
    e.state = RewardState::kPending;
    deadlines_.emplace(now + window_, request_id);
    log_locked(e, "impression", now);
    return FeedbackOutcome::kImpressionLogged;
  }

  if (!e.impression) {
    e.impression = now;
    e.state = RewardState::kPending;
    log_locked(e, "impression", now);
  }
  if (*e.state != RewardState::kPending) {
    ++counters_.duplicates;
    return FeedbackOutcome::kDuplicate;
  }
  if (now - *e.impression > window_) {
    log_locked(e, "expired", now);
    settle_locked(e, RewardState::kExpired, now);
    return FeedbackOutcome::kLateClick;
  }
  log_locked(e, "click", now);
  settle_locked(e, RewardState::kRewarded, now);
  return FeedbackOutcome::kRewarded;
}

std::size_t AttributionTracker::expire_due() {
  const auto now = clock_.now();
  std::lock_guard lock(mu_);
  std::size_t expired = 0;
  while (!deadlines_.empty() && deadlines_.begin()->first < now) {
    const std::string id = deadlines_.begin()->second;
    deadlines_.erase(deadlines_.begin());
    auto it = entries_.find(id);
    if (it == entries_.end() || it->second.state != RewardState::kPending) continue;
    log_locked(it->second, "expired", now);
    settle_locked(it->second, RewardState::kExpired, now);
    ++expired;
  }
  while (!retirements_.empty() && retirements_.begin()->first <= now) {
    const auto [at, id] = *retirements_.begin();
    retirements_.erase(retirements_.begin());
    auto it = entries_.find(id);
    if (it == entries_.end() || it->second.retire_at != at) continue;
    if (it->second.state == RewardState::kPending) continue;
    entries_.erase(it);
  }
  return expired;
}

std::optional<RewardState> AttributionTracker::state(const std::string& request_id) const {
  std::lock_guard lock(mu_);
  auto it = entries_.find(request_id);
  if (it == entries_.end()) return std::nullopt;
  return it->second.state;
}

AttributionTracker::Counters AttributionTracker::counters() const {
  std::lock_guard lock(mu_);
  return counters_;
}

std::size_t AttributionTracker::tracked() const {
  std::lock_guard lock(mu_);
  return entries_.size();
}

}  // namespace adgen::service
