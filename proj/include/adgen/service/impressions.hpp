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

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>

#include "adgen/bandit/features.hpp"
#include "adgen/common/clock.hpp"
#include "adgen/service/config.hpp"
#include "json.hpp"

namespace adgen::service {

enum class FeedbackEvent { kImpression, kClick };
/// Throws Error(kBadRequest).
FeedbackEvent feedback_event_from_string(const std::string& s);

enum class RewardState { kPending, kRewarded, kExpired };
const char* to_string(RewardState s);

enum class Variant { kOriginal, kGenerated };
const char* to_string(Variant v);

/// What the serving path remembers about one response, for the feedback join.
struct ServedRequest {
  std::string request_id;
  AbGroup group = AbGroup::kBandit;
  std::optional<std::string> prompt_id;
  Variant variant = Variant::kOriginal;
  bandit::ContextVector context;
  /// Bandit group and a generated creative was shown. Only these train the model.
  bool trainable = false;
};

enum class FeedbackOutcome {
  kImpressionLogged,
  kRewarded,
  kLateClick,  // click after the window closed; recorded as expired
  kDuplicate,
  kUnknownRequest,
};
const char* to_string(FeedbackOutcome o);

/// Append-only JSONL writer for the feedback journal read by the A/B report.
class FeedbackLog {
 public:
  explicit FeedbackLog(std::filesystem::path path);

  void append(const nlohmann::json& line);
  const std::filesystem::path& path() const noexcept { return path_; }

 private:
  std::filesystem::path path_;
  std::mutex mu_;
  std::ofstream out_;
};

using RewardSink = std::function<void(const std::string& prompt_id, const bandit::ContextVector& x, int reward)>;

/// Delayed-reward attribution. An impression opens a window; a click inside
/// it (inclusive) is reward 1, expiry is reward 0, and each request_id is
/// settled at most once. A click with no prior impression implies one.
class AttributionTracker {
 public:
  struct Counters {
    std::uint64_t updates = 0;  // calls into the sink
    std::uint64_t rewarded = 0;
    std::uint64_t expired = 0;
    std::uint64_t duplicates = 0;
    std::uint64_t unknown = 0;
  };

  AttributionTracker(const Clock& clock, Millis window, FeedbackLog& log, RewardSink sink);

  /// Remembers the response and logs a "request" line.
  void record_request(ServedRequest req);
  FeedbackOutcome on_event(const std::string& request_id, FeedbackEvent event);
  /// Settles every impression whose window has passed and forgets old
  /// requests. Returns the number expired.
  std::size_t expire_due();

  std::optional<RewardState> state(const std::string& request_id) const;
  Counters counters() const;
  std::size_t tracked() const;

 private:
  struct Entry {
    ServedRequest req;
    TimePoint served;
    std::optional<TimePoint> impression;
    std::optional<RewardState> state;
    TimePoint retire_at;
  };

  void log_locked(const Entry& e, const char* event, TimePoint ts);
  void settle_locked(Entry& e, RewardState s, TimePoint now);

  const Clock& clock_;
  Millis window_;
  FeedbackLog& log_;
  RewardSink sink_;
  mutable std::mutex mu_;
  std::unordered_map<std::string, Entry> entries_;
  std::multimap<TimePoint, std::string> deadlines_;
  std::multimap<TimePoint, std::string> retirements_;
  Counters counters_;
};

}  // namespace adgen::service
