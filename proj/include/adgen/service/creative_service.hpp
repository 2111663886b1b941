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
#include <list>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "adgen/bandit/linucb.hpp"
#include "adgen/bandit/random_policy.hpp"
#include "adgen/common/clock.hpp"
#include "adgen/generation/backend.hpp"
#include "adgen/generation/pipeline.hpp"
#include "adgen/generation/prompt.hpp"
#include "adgen/service/callbacks.hpp"
#include "adgen/service/config.hpp"
#include "adgen/service/fetcher.hpp"
#include "adgen/service/impressions.hpp"
#include "adgen/store/creative_store.hpp"
#include "adgen/store/mask_cache.hpp"
#include "adgen/store/object_store.hpp"
#include "json.hpp"

namespace adgen::service {

struct ProductRef {
  std::string id;
  std::string category;
  std::optional<std::string> image_url;
  std::optional<Bytes> image_bytes;  // inline image, decoded from base64
  bandit::FeatureMap attributes;
};

struct CreativeRequest {
  ProductRef product;
  imaging::PlacementSpec placement;
  std::string user_id;
  bandit::FeatureMap user_features;
  std::optional<std::string> callback_url;
  std::optional<AbGroup> ab_override;

  /// Exactly one image source, a valid placement, an http:// callback.
  /// Throws Error(kBadRequest).
  void validate() const;
};

/// Request body of POST /v1/creative:
///   {"product":{"id","category","image_url"|"image_base64","attributes":{}},
///    "placement":{"id","width","height"},
///    "user":{"user_id","features":{}},
///    "callback_url"?, "ab_override"?}
/// Feature and attribute values may be strings, numbers or booleans.
CreativeRequest creative_request_from_json(const nlohmann::json& j);
nlohmann::json to_json(const CreativeRequest& req);

struct CreativeResponse {
  std::string request_id;
  Variant variant = Variant::kOriginal;
  std::string image_ref;
  std::optional<std::string> prompt_id;
  AbGroup ab_group = AbGroup::kBandit;
  /// Cache outcome: hit, enqueued, in_flight, rejected, failed, pending_review,
  /// or none when no generation applies (original_only, unknown category,
  /// fetch failure, storage trouble).
  std::string cache = "none";
  std::optional<store::CacheKey> key;
};

nlohmann::json to_json(const CreativeResponse& resp);

/// Marks the current thread as serving a creative request.
class RequestScope {
 public:
  RequestScope();
  ~RequestScope();
  RequestScope(const RequestScope&) = delete;
  RequestScope& operator=(const RequestScope&) = delete;

  static bool active() noexcept;

 private:
  bool previous_;
};

/// Counts backend calls and refuses any made inside a RequestScope.
class InstrumentedBackend final : public generation::GenerationBackend {
 public:
  explicit InstrumentedBackend(std::shared_ptr<generation::GenerationBackend> inner)
      : inner_(std::move(inner)) {}

  generation::BackendResponse generate(const generation::BackendRequest& request) override;
  std::string id() const override { return inner_->id(); }

  std::uint64_t calls() const noexcept { return calls_.load(); }
  std::uint64_t inline_calls() const noexcept { return inline_calls_.load(); }

 private:
  std::shared_ptr<generation::GenerationBackend> inner_;
  std::atomic<std::uint64_t> calls_{0};
  std::atomic<std::uint64_t> inline_calls_{0};
};

/// Builds the configured backend: the mock or a RemoteBackend.
std::shared_ptr<generation::GenerationBackend> make_backend(const ServiceConfig& cfg);

/// Collaborators a caller may replace; empty members get the defaults.
struct ServiceDeps {
  std::shared_ptr<const Clock> clock;
  std::shared_ptr<generation::GenerationBackend> backend;
  std::shared_ptr<ImageFetcher> fetcher;
  std::shared_ptr<const imaging::Masker> masker;
  std::optional<generation::PromptPool> prompts;
  Sleeper callback_sleeper;
  std::uint64_t control_seed = 0x5eed;
};

/// Serving, feedback, review and reporting over one data directory.
/// Thread-safe. Generation happens only in process_job(), which the
/// background workers call.
class CreativeService {
 public:
  CreativeService(ServiceConfig cfg, ServiceDeps deps = {});
  ~CreativeService();

  CreativeResponse handle_creative(const CreativeRequest& req);
  FeedbackOutcome handle_feedback(const std::string& request_id, FeedbackEvent event);

  std::vector<store::CreativeRecord> pending_review(std::size_t limit) const;
  store::CreativeRecord approve(const store::CacheKey& key);
  store::CreativeRecord reject(const store::CacheKey& key);
  store::CreativeRecord regenerate(const store::CacheKey& key);
  nlohmann::json review_item(const store::CreativeRecord& rec) const;

  nlohmann::json bandit_stats() const;
  /// Per-group counts from the feedback journal, bandit vs random_control
  /// statistics. `window` limits it to the most recent span.
  nlohmann::json ab_report(std::optional<Millis> window = std::nullopt) const;

  /// Throws Error(kNotFound).
  Bytes object_bytes(const std::string& ref) const;
  std::string image_ref_for(const std::string& object_ref) const;

  /// Blocks up to `timeout` for a queued job and runs it. False if none came.
  bool run_one_job(Millis timeout = Millis(0));
  /// Runs jobs on the calling thread until the queue is empty.
  std::size_t run_pending_jobs();
  void process_job(const store::GenerationJob& job);

  /// Lease sweep, attribution expiry and the periodic bandit snapshot.
  void maintenance_tick();
  void save_bandit_snapshot() const;
  /// Wakes blocked workers for good and saves the bandit.
  void shutdown();

  AbGroup assign_group(const std::string& user_id) const;

  const ServiceConfig& config() const noexcept { return cfg_; }
  const Clock& clock() const noexcept { return *clock_; }
  store::CreativeStore& store() noexcept { return creatives_; }
  InstrumentedBackend& backend() noexcept { return *backend_; }
  CallbackDispatcher& callbacks() noexcept { return callbacks_; }
  AttributionTracker& attribution() noexcept { return attribution_; }
  bandit::SharedLinUcb& bandit() noexcept { return *bandit_; }
  const generation::PromptPool& prompts() const noexcept { return prompts_; }
  std::uint64_t bandit_updates() const noexcept { return bandit_updates_.load(); }

 private:
  struct Source {
    std::string image_hash;
    std::string original_ref;  // served when no creative is available
  };

  Source resolve_source(const ProductRef& product);
  std::optional<std::string> sized_creative(const std::string& object_ref, int width, int height);
  void finish_job(const store::CreativeRecord& rec);
  std::string new_request_id();

  ServiceConfig cfg_;
  std::shared_ptr<const Clock> clock_;
  store::ObjectStore objects_;
  store::MaskCache masks_;
  store::CreativeStore creatives_;
  generation::PromptPool prompts_;
  std::shared_ptr<InstrumentedBackend> backend_;
  std::shared_ptr<ImageFetcher> fetcher_;
  std::shared_ptr<const imaging::Masker> masker_;
  std::unique_ptr<bandit::SharedLinUcb> bandit_;
  bandit::RandomPolicy control_policy_;
  std::atomic<std::uint64_t> bandit_updates_{0};
  FeedbackLog feedback_log_;
  AttributionTracker attribution_;
  CallbackDispatcher callbacks_;

  std::mutex url_mu_;
  std::unordered_map<std::string, std::string> url_hashes_;  // image_url -> sha256

  std::mutex resize_mu_;
  std::list<std::pair<std::string, std::string>> resize_lru_;  // "ref/wxh" -> ref
  std::unordered_map<std::string, decltype(resize_lru_)::iterator> resize_index_;

  std::mutex id_mu_;
  std::uint64_t id_state_;

  std::mutex snapshot_mu_;
  TimePoint last_snapshot_;
};

}  // namespace adgen::service
