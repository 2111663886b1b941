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

#include "adgen/service/workers.hpp"

#include <spdlog/spdlog.h>

namespace adgen::service {

BackgroundRunner::BackgroundRunner(CreativeService& service, int workers, Millis maintenance_interval)
    : service_(service), workers_(std::max(workers, 1)), interval_(maintenance_interval) {}

BackgroundRunner::~BackgroundRunner() { stop(); }

void BackgroundRunner::start() {
  std::lock_guard lock(mu_);
  if (!threads_.empty()) return;
  stopping_ = false;
  for (int i = 0; i < workers_; ++i) threads_.emplace_back([this] { worker_loop(); });
  threads_.emplace_back([this] { maintenance_loop(); });
}

void BackgroundRunner::worker_loop() {
  while (true) {
    {
      std::lock_guard lock(mu_);
      if (stopping_) return;
    }
    try {
      service_.run_one_job(std::chrono::milliseconds(100));
    } catch (const std::exception& e) {
      spdlog::error("worker: {}", e.what());
    }
  }
}

void BackgroundRunner::maintenance_loop() {
  std::unique_lock lock(mu_);
  while (!stopping_) {
    cv_.wait_for(lock, interval_, [&] { return stopping_; });
    if (stopping_) break;
    lock.unlock();
    try {
      service_.maintenance_tick();
    } catch (const std::exception& e) {
      spdlog::error("maintenance: {}", e.what());
    }
    lock.lock();
  }
}

void BackgroundRunner::stop() {
  std::vector<std::thread> threads;
  {
    std::lock_guard lock(mu_);
    stopping_ = true;
    threads.swap(threads_);
  }
  cv_.notify_all();
  for (auto& t : threads) t.join();
}

}  // namespace adgen::service
