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

#include <atomic>
#include <chrono>
#include <cstdint>

namespace adgen {

using TimePoint = std::chrono::system_clock::time_point;
using Millis = std::chrono::milliseconds;

std::int64_t to_unix_millis(TimePoint t);
TimePoint from_unix_millis(std::int64_t ms);

/// Injectable time source. Lease sweeps and attribution windows read time
/// only through this so tests can drive them with ManualClock.
class Clock {
 public:
  virtual ~Clock() = default;
  virtual TimePoint now() const = 0;
};

class SystemClock final : public Clock {
 public:
  TimePoint now() const override { return std::chrono::system_clock::now(); }
};

class ManualClock final : public Clock {
 public:
  explicit ManualClock(TimePoint start = from_unix_millis(1'700'000'000'000));

  TimePoint now() const override;
  void advance(Millis delta);
  void set(TimePoint t);

 private:
  std::atomic<std::int64_t> now_ms_;
};

}  // namespace adgen
