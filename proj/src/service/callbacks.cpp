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

#include "adgen/service/callbacks.hpp"

#include <spdlog/spdlog.h>

#include "adgen/common/error.hpp"
#include "adgen/service/fetcher.hpp"
#include "httplib.h"

namespace adgen::service {

using nlohmann::json;

json callback_body(const store::CreativeRecord& rec, const std::optional<std::string>& image_ref) {
  return {{"image_hash", rec.key.image_hash},
          {"prompt_id", rec.key.prompt_id},
          {"bucket", rec.key.bucket},
          {"status", store::to_string(rec.status)},
          {"image_ref", image_ref ? json(*image_ref) : json()}};
}

DeliveryResult deliver_callback(const std::string& url, const json& body, const CallbackConfig& cfg,
                                const Sleeper& sleeper) {
  DeliveryResult result;
  HttpUrl target;
  try {
    target = parse_http_url(url);
  } catch (const Error& e) {
    result.last_error = e.what();
    spdlog::error("CallbackFailure: {}", result.last_error);
    return result;
  }
  const std::string payload = body.dump();
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(cfg.timeout);
  const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(cfg.timeout - secs);
  for (int attempt = 0; attempt <= cfg.retries; ++attempt) {
    if (attempt > 0) sleeper(cfg.backoff * (1 << (attempt - 1)));
    ++result.attempts;
    httplib::Client client(target.origin);
    client.set_connection_timeout(secs.count(), usecs.count());
    client.set_read_timeout(secs.count(), usecs.count());
    auto res = client.Post(target.path, payload, "application/json");
    if (res && res->status >= 200 && res->status < 300) {
      result.delivered = true;
      return result;
    }
    result.last_error = res ? "HTTP " + std::to_string(res->status) : httplib::to_string(res.error());
    spdlog::warn("callback to {} attempt {} failed: {}", url, result.attempts, result.last_error);
  }
  spdlog::error("CallbackFailure: {} gave up after {} attempts: {}", url, result.attempts, result.last_error);
  return result;
}

CallbackDispatcher::CallbackDispatcher(CallbackConfig cfg, Sleeper sleeper)
    : cfg_(cfg),
      sleeper_(sleeper ? std::move(sleeper) : Sleeper([](Millis d) { std::this_thread::sleep_for(d); })) {
  if (cfg_.retries < 0) throw Error(ErrorCode::kInvalidArgument, "callback retries must be >= 0");
  thread_ = std::thread([this] { run(); });
}

CallbackDispatcher::~CallbackDispatcher() { stop(); }

void CallbackDispatcher::subscribe(const store::CacheKey& key, const std::string& url) {
  parse_http_url(url);
  std::lock_guard lock(mu_);
  subs_[key].insert(url);
}

std::size_t CallbackDispatcher::notify(const store::CacheKey& key, const json& body) {
  std::size_t queued = 0;
  {
    std::lock_guard lock(mu_);
    auto it = subs_.find(key);
    if (it == subs_.end()) return 0;
    for (const auto& url : it->second) {
      queue_.push_back({url, body});
      ++queued;
    }
    subs_.erase(it);
  }
  cv_.notify_one();
  return queued;
}

void CallbackDispatcher::run() {
  std::unique_lock lock(mu_);
  while (true) {
    cv_.wait(lock, [&] { return stop_ || !queue_.empty(); });
    if (queue_.empty()) break;
    Delivery d = std::move(queue_.front());
    queue_.pop_front();
    busy_ = true;
    lock.unlock();
    const auto r = deliver_callback(d.url, d.body, cfg_, sleeper_);
    lock.lock();
    busy_ = false;
    stats_.attempts += static_cast<std::uint64_t>(r.attempts);
    if (r.delivered) {
      ++stats_.delivered;
    } else {
      ++stats_.failed;
    }
    if (queue_.empty()) idle_cv_.notify_all();
  }
  idle_cv_.notify_all();
}

void CallbackDispatcher::wait_idle() {
  std::unique_lock lock(mu_);
  idle_cv_.wait(lock, [&] { return queue_.empty() && !busy_; });
}

void CallbackDispatcher::stop() {
  {
    std::lock_guard lock(mu_);
    stop_ = true;
  }
  cv_.notify_all();
  if (thread_.joinable()) thread_.join();
}

CallbackDispatcher::Stats CallbackDispatcher::stats() const {
  std::lock_guard lock(mu_);
  return stats_;
}

std::size_t CallbackDispatcher::subscriptions() const {
  std::lock_guard lock(mu_);
  std::size_t n = 0;
  for (const auto& [key, urls] : subs_) n += urls.size();
  return n;
}

}  // namespace adgen::service
