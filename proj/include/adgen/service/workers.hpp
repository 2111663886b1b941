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
#include <mutex>
#include <thread>
#include <vector>

#include "adgen/service/creative_service.hpp"

namespace adgen::service {

/// Generation workers blocked on the queue plus one maintenance thread
/// that ticks every `maintenance_interval` of wall time.
class BackgroundRunner {
 public:
  BackgroundRunner(CreativeService& service, int workers, Millis maintenance_interval);
  ~BackgroundRunner();
  BackgroundRunner(const BackgroundRunner&) = delete;
  BackgroundRunner& operator=(const BackgroundRunner&) = delete;

  void start();
  /// Joins every thread. Jobs in progress finish first.
  void stop();

 private:
  void worker_loop();
  void maintenance_loop();

  CreativeService& service_;
  int workers_;
  Millis interval_;
  std::mutex mu_;
  std::condition_variable cv_;
  bool stopping_ = false;
  std::vector<std::thread> threads_;
};

}  // namespace adgen::service
