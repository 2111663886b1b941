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

#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "adgen/common/clock.hpp"
#include "adgen/imaging/png.hpp"
#include "adgen/service/creative_service.hpp"
#include "json.hpp"
#include "support/generators.hpp"
#include "support/stub_server.hpp"
#include "support/temp_dir.hpp"

namespace adgen::testing {

/// PNG of a product on white; `variant` changes the product color.
inline Bytes product_png(int variant = 0) {
  const imaging::Rgba color{static_cast<std::uint8_t>(200 - 17 * (variant % 10)),
                            static_cast<std::uint8_t>(40 + 13 * (variant % 7)), 40, 255};
  return imaging::encode_png(product_on_white(200, 160, {50, 30, 100, 100}, color));
}

inline service::CreativeRequest creative_request(const Bytes& png, int width, int height,
                                                 std::optional<service::AbGroup> group = service::AbGroup::kBandit,
                                                 const std::string& user = "user-1",
                                                 const std::string& category = "apparel") {
  service::CreativeRequest req;
  req.product.id = "sku-1";
  req.product.category = category;
  req.product.image_bytes = png;
  req.placement = {"slot", width, height};
  req.user_id = user;
  req.user_features = {{"segment", "s1"}, {"device", "mobile"}};
  req.ab_override = group;
  return req;
}

/// A service over a temporary data dir, a manual clock and the mock backend.
/// Jobs only run when the test calls run_pending_jobs().
struct ServiceHarness {
  TempDir dir;
  std::shared_ptr<ManualClock> clock = std::make_shared<ManualClock>();
  service::ServiceConfig cfg;
  std::unique_ptr<service::CreativeService> svc;

  explicit ServiceHarness(const std::function<void(service::ServiceConfig&)>& tweak = {}) {
    cfg.data_dir = dir.path();
    cfg.public_base_url = "http://cdn.test";
    cfg.callback_backoff = Millis(1);
    cfg.callback_timeout = Millis(2000);
    if (tweak) tweak(cfg);
    restart();
  }

  void restart() {
    svc.reset();
    service::ServiceDeps deps;
    deps.clock = clock;
    deps.callback_sleeper = [](Millis) {};
    svc = std::make_unique<service::CreativeService>(cfg, std::move(deps));
  }

  service::CreativeService& operator*() { return *svc; }
  service::CreativeService* operator->() { return svc.get(); }
};

/// Records POSTs to /cb. The first `fail_first` deliveries answer 500.
struct CallbackReceiver {
  StubServer stub;
  std::mutex mu;
  std::vector<nlohmann::json> bodies;
  int fail_first = 0;
  int received = 0;

  explicit CallbackReceiver(int failures = 0) : fail_first(failures) {
    stub.server().Post("/cb", [this](const httplib::Request& req, httplib::Response& res) {
      std::lock_guard lock(mu);
      ++received;
      if (received <= fail_first) {
        res.status = 500;
        return;
      }
      bodies.push_back(nlohmann::json::parse(req.body));
      res.status = 200;
    });
    stub.start();
  }

  std::string url() const { return stub.url() + "/cb"; }
  int deliveries() {
    std::lock_guard lock(mu);
    return received;
  }
  std::vector<nlohmann::json> accepted() {
    std::lock_guard lock(mu);
    return bodies;
  }
};

}  // namespace adgen::testing
