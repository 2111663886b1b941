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
#include <functional>
#include <semaphore>
#include <string>

#include "adgen/common/clock.hpp"
#include "adgen/generation/backend.hpp"

namespace adgen::generation {

struct RemoteConfig {
  std::string endpoint;  // e.g. http://127.0.0.1:7860 or http://host/prefix
  Millis timeout{std::chrono::seconds(60)};
  int retries = 3;  // extra attempts after the first
  Millis backoff_base{std::chrono::milliseconds(200)};
  int max_in_flight = 4;
};

/// Client for POST {endpoint}/generate. Transport errors, timeouts and 5xx
/// responses are retried with delays backoff_base * 2^(n-1).
class RemoteBackend final : public GenerationBackend {
 public:
  using Sleeper = std::function<void(Millis)>;

  explicit RemoteBackend(RemoteConfig config, Sleeper sleeper = {});

  /// Throws Error(kBackendTimeout | kBackendFailure | kMalformedResponse |
  /// kDimensionMismatch).
  BackendResponse generate(const BackendRequest& request) override;
  std::string id() const override { return "remote:" + config_.endpoint; }

  /// Attempts used by the most recent generate() call on this thread.
  static int last_attempts();

 private:
  RemoteConfig config_;
  Sleeper sleeper_;
  std::string host_;
  std::string path_prefix_;
  std::counting_semaphore<1024> slots_;
};

}  // namespace adgen::generation
