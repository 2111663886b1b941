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

#include "adgen/common/clock.hpp"

namespace adgen {

std::int64_t to_unix_millis(TimePoint t) {
  return std::chrono::duration_cast<Millis>(t.time_since_epoch()).count();
}

TimePoint from_unix_millis(std::int64_t ms) {
  return TimePoint(std::chrono::duration_cast<TimePoint::duration>(Millis(ms)));
}

ManualClock::ManualClock(TimePoint start) : now_ms_(to_unix_millis(start)) {}

TimePoint ManualClock::now() const { return from_unix_millis(now_ms_.load()); }

void ManualClock::advance(Millis delta) { now_ms_.fetch_add(delta.count()); }

void ManualClock::set(TimePoint t) { now_ms_.store(to_unix_millis(t)); }

}  // namespace adgen
