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

#include <condition_variable>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <thread>

#include "adgen/common/clock.hpp"
#include "adgen/store/cache_key.hpp"
#include "json.hpp"

namespace adgen::service {

struct CallbackConfig {
  int retries = 3;  // extra attempts after the first
  Millis timeout{std::chrono::seconds(5)};
  Millis backoff{std::chrono::milliseconds(200)};  // doubled per retry
};

using Sleeper = std::function<void(Millis)>;

struct DeliveryResult {
  bool delivered = false;
  int attempts = 0;
  std::string last_error;
};

/// {image_hash, prompt_id, bucket, status, image_ref}; image_ref is null
/// unless the creative is ready.
nlohmann::json callback_body(const store::CreativeRecord& rec, const std::optional<std::string>& image_ref);

/// POSTs `body` until a 2xx answer or the retries run out. Never throws;
/// the final failure is logged as CallbackFailure.
DeliveryResult deliver_callback(const std::string& url, const nlohmann::json& body,
                                const CallbackConfig& cfg, const Sleeper& sleeper);

/// Per-key callback subscriptions and one background delivery thread.
/// Subscriptions live in memory only.
class CallbackDispatcher {
 public:
  struct Stats {
    std::uint64_t delivered = 0;
    std::uint64_t failed = 0;
    std::uint64_t attempts = 0;
  };

  explicit CallbackDispatcher(CallbackConfig cfg, Sleeper sleeper = {});
  ~CallbackDispatcher();
  CallbackDispatcher(const CallbackDispatcher&) = delete;
  CallbackDispatcher& operator=(const CallbackDispatcher&) = delete;

  void subscribe(const store::CacheKey& key, const std::string& url);
  /// Queues one delivery per subscriber of `key` and drops the subscriptions.
  std::size_t notify(const store::CacheKey& key, const nlohmann::json& body);
  /// Blocks until nothing is queued or being delivered.
  void wait_idle();
  void stop();

  Stats stats() const;
  std::size_t subscriptions() const;

 private:
  struct Delivery {
    std::string url;
    nlohmann::json body;
  };

  void run();

  CallbackConfig cfg_;
  Sleeper sleeper_;
  mutable std::mutex mu_;
  std::condition_variable cv_;
  std::condition_variable idle_cv_;
  std::map<store::CacheKey, std::set<std::string>> subs_;
  std::deque<Delivery> queue_;
  bool busy_ = false;
  bool stop_ = false;
  Stats stats_;
  std::thread thread_;
};

}  // namespace adgen::service
