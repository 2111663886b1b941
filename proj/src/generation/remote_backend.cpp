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

#include "adgen/generation/remote_backend.hpp"

#include <algorithm>
#include <thread>

#include <spdlog/spdlog.h>

#include "adgen/common/error.hpp"
#include "httplib.h"

namespace adgen::generation {

namespace {

thread_local int tls_last_attempts = 0;

class SlotGuard {
 public:
  explicit SlotGuard(std::counting_semaphore<1024>& s) : s_(s) { s_.acquire(); }
  ~SlotGuard() { s_.release(); }
  SlotGuard(const SlotGuard&) = delete;
  SlotGuard& operator=(const SlotGuard&) = delete;

 private:
  std::counting_semaphore<1024>& s_;
};

}  // namespace

RemoteBackend::RemoteBackend(RemoteConfig config, Sleeper sleeper)
    : config_(std::move(config)),
      sleeper_(sleeper ? std::move(sleeper) : Sleeper([](Millis d) { std::this_thread::sleep_for(d); })),
      slots_(std::clamp(config_.max_in_flight, 1, 1024)) {
  const std::string scheme = "http://";
  if (config_.endpoint.rfind(scheme, 0) != 0) {
    throw Error(ErrorCode::kInvalidArgument, "backend endpoint must start with http://: " + config_.endpoint);
  }
  if (config_.retries < 0) throw Error(ErrorCode::kInvalidArgument, "retries must be >= 0");
  const auto slash = config_.endpoint.find('/', scheme.size());
  host_ = config_.endpoint.substr(0, slash);
  path_prefix_ = slash == std::string::npos ? "" : config_.endpoint.substr(slash);
  while (!path_prefix_.empty() && path_prefix_.back() == '/') path_prefix_.pop_back();
}

int RemoteBackend::last_attempts() { return tls_last_attempts; }

BackendResponse RemoteBackend::generate(const BackendRequest& request) {
  request.validate();
  const std::string body = request_to_json(request).dump();
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(config_.timeout);
  const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(config_.timeout - secs);

  SlotGuard slot(slots_);
  httplib::Client client(host_);
  client.set_connection_timeout(secs.count(), usecs.count());
  client.set_read_timeout(secs.count(), usecs.count());
  client.set_write_timeout(secs.count(), usecs.count());

  ErrorCode last_code = ErrorCode::kBackendFailure;
  std::string last_detail;
  const int total = 1 + config_.retries;
  for (int attempt = 1; attempt <= total; ++attempt) {
    tls_last_attempts = attempt;
    if (attempt > 1) sleeper_(config_.backoff_base * (1LL << (attempt - 2)));

    auto res = client.Post(path_prefix_ + "/generate", body, "application/json");
    if (!res) {
      const auto err = res.error();
      last_code = err == httplib::Error::Read || err == httplib::Error::ConnectionTimeout
                      ? ErrorCode::kBackendTimeout
                      : ErrorCode::kBackendFailure;
      last_detail = httplib::to_string(err);
    } else if (res->status >= 500) {
      last_code = ErrorCode::kBackendFailure;
      last_detail = "HTTP " + std::to_string(res->status);
    } else if (res->status != 200) {
      throw Error(ErrorCode::kBackendFailure, "backend rejected request: HTTP " + std::to_string(res->status));
    } else {
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(res->body);
      } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::kMalformedResponse, std::string("backend body: ") + e.what());
      }
      auto resp = response_from_json(j);
      if (resp.image.width() != request.width || resp.image.height() != request.height) {
        throw Error(ErrorCode::kDimensionMismatch,
                    "backend returned " + std::to_string(resp.image.width()) + "x" +
                        std::to_string(resp.image.height()) + ", requested " +
                        std::to_string(request.width) + "x" + std::to_string(request.height));
      }
      return resp;
    }
    spdlog::warn("backend {} attempt {}/{} failed: {}", config_.endpoint, attempt, total, last_detail);
  }
  throw Error(last_code, "backend " + config_.endpoint + " failed after " + std::to_string(total) +
                             " attempts: " + last_detail);
}

}  // namespace adgen::generation
