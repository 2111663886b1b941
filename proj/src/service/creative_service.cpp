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

#include "adgen/service/creative_service.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <random>
#include <set>

#include <spdlog/spdlog.h>

#include "adgen/bandit/snapshot.hpp"
#include "adgen/common/error.hpp"
#include "adgen/common/hash.hpp"
#include "adgen/evalsim/report.hpp"
#include "adgen/generation/mock_backend.hpp"
#include "adgen/generation/remote_backend.hpp"
#include "adgen/imaging/png.hpp"

namespace adgen::service {

using nlohmann::json;
using store::CacheKey;
using store::CreativeRecord;
using store::CreativeStatus;
using store::LookupKind;

namespace {

thread_local bool tls_in_request = false;

constexpr std::size_t kUrlCacheEntries = 10'000;

bool looks_like_png(std::span<const std::uint8_t> bytes) {
  static constexpr std::uint8_t kSig[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
  return bytes.size() >= 8 && std::equal(std::begin(kSig), std::end(kSig), bytes.begin());
}

std::string feature_value(const json& v, const std::string& name) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number()) return v.dump();
  throw Error(ErrorCode::kBadRequest, name + " values must be strings, numbers or booleans");
}

bandit::FeatureMap feature_map(const json& j, const std::string& name) {
  bandit::FeatureMap out;
  if (j.is_null()) return out;
  if (!j.is_object()) throw Error(ErrorCode::kBadRequest, name + " must be an object");
  for (const auto& [k, v] : j.items()) out[k] = feature_value(v, name);
  return out;
}

ServiceConfig prepared(ServiceConfig cfg) {
  cfg.validate();
  std::error_code ec;
  std::filesystem::create_directories(cfg.data_dir, ec);
  if (ec) throw Error(ErrorCode::kStorageFailure, "cannot create data dir " + cfg.data_dir.string() + ": " + ec.message());
  return cfg;
}

generation::PromptPool load_prompts(const ServiceConfig& cfg, std::optional<generation::PromptPool> given) {
  generation::PromptPool pool;
  if (given) {
    pool = std::move(*given);
  } else if (cfg.prompts_file) {
    std::ifstream in(*cfg.prompts_file);
    if (!in) throw Error(ErrorCode::kNotFound, "cannot open prompts file " + cfg.prompts_file->string());
    try {
      pool = generation::prompt_pool_from_json(json::parse(in));
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kInvalidArgument, "prompts file: " + std::string(e.what()));
    }
  } else {
    pool = generation::default_prompt_pool();
  }
  pool.validate(cfg.feature_spec.categories, 1);
  for (const auto& cat : cfg.feature_spec.categories) {
    if (pool.for_category(cat).size() < 2) {
      spdlog::warn("category '{}' has a single prompt; nothing to personalize", cat);
    }
  }
  return pool;
}

std::unique_ptr<bandit::SharedLinUcb> load_bandit(const ServiceConfig& cfg) {
  bandit::LinUcbModel model(cfg.feature_spec.dimension, cfg.alpha);
  const auto path = cfg.snapshot_path();
  if (std::filesystem::exists(path)) {
    try {
      auto loaded = bandit::load_snapshot(path);
      if (loaded.spec != cfg.feature_spec) {
        spdlog::warn("bandit snapshot {} was built for a different feature spec; starting fresh", path.string());
      } else {
        for (const auto& [id, state] : loaded.model.arms()) model.restore_arm(id, state);
        spdlog::info("bandit restored from {} ({} arms)", path.string(), model.arms().size());
      }
    } catch (const std::exception& e) {
      spdlog::warn("ignoring unreadable bandit snapshot {}: {}", path.string(), e.what());
    }
  }
  return std::make_unique<bandit::SharedLinUcb>(std::move(model));
}

std::uint64_t random_seed() {
  std::random_device rd;
  return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

}  // namespace

void CreativeRequest::validate() const {
  if (product.image_url.has_value() == product.image_bytes.has_value()) {
    throw Error(ErrorCode::kBadRequest, "product needs exactly one of image_url and image_base64");
  }
  if (product.image_url && product.image_url->empty()) throw Error(ErrorCode::kBadRequest, "empty image_url");
  if (product.image_bytes && product.image_bytes->empty()) throw Error(ErrorCode::kBadRequest, "empty inline image");
  try {
    placement.validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::kBadRequest, e.what());
  }
  if (callback_url) parse_http_url(*callback_url);
}

CreativeRequest creative_request_from_json(const json& j) {
  if (!j.is_object()) throw Error(ErrorCode::kBadRequest, "request body must be a JSON object");
  CreativeRequest req;
  try {
    const auto& p = j.at("product");
    req.product.id = p.value("id", std::string());
    req.product.category = p.value("category", std::string());
    if (p.contains("image_url") && !p["image_url"].is_null()) req.product.image_url = p["image_url"].get<std::string>();
    if (p.contains("image_base64") && !p["image_base64"].is_null()) {
      try {
        req.product.image_bytes = base64_decode(p["image_base64"].get<std::string>());
      } catch (const Error& e) {
        throw Error(ErrorCode::kBadRequest, std::string("image_base64: ") + e.what());
      }
    }
    req.product.attributes = feature_map(p.value("attributes", json()), "product.attributes");

    const auto& pl = j.at("placement");
    req.placement.placement_id = pl.value("id", std::string());
    req.placement.width = pl.at("width").get<int>();
    req.placement.height = pl.at("height").get<int>();

    if (j.contains("user") && !j["user"].is_null()) {
      const auto& u = j["user"];
      req.user_id = u.value("user_id", std::string());
      req.user_features = feature_map(u.value("features", json()), "user.features");
    }
    if (j.contains("callback_url") && !j["callback_url"].is_null()) {
      req.callback_url = j["callback_url"].get<std::string>();
    }
    if (j.contains("ab_override") && !j["ab_override"].is_null()) {
      req.ab_override = ab_group_from_string(j["ab_override"].get<std::string>());
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kBadRequest, std::string("malformed creative request: ") + e.what());
  }
  req.validate();
  return req;
}

json to_json(const CreativeRequest& req) {
  json product = {{"id", req.product.id}, {"category", req.product.category}, {"attributes", req.product.attributes}};
  if (req.product.image_url) product["image_url"] = *req.product.image_url;
  if (req.product.image_bytes) product["image_base64"] = base64_encode(*req.product.image_bytes);
  json out = {{"product", product},
              {"placement",
               {{"id", req.placement.placement_id}, {"width", req.placement.width}, {"height", req.placement.height}}},
              {"user", {{"user_id", req.user_id}, {"features", req.user_features}}}};
  if (req.callback_url) out["callback_url"] = *req.callback_url;
  if (req.ab_override) out["ab_override"] = to_string(*req.ab_override);
  return out;
}

json to_json(const CreativeResponse& resp) {
  json out = {{"request_id", resp.request_id},
              {"variant", to_string(resp.variant)},
              {"image_ref", resp.image_ref},
              {"ab_group", to_string(resp.ab_group)},
              {"cache", resp.cache}};
  if (resp.prompt_id) out["prompt_id"] = *resp.prompt_id;
  if (resp.key) out["bucket"] = resp.key->bucket;
  return out;
}

RequestScope::RequestScope() : previous_(tls_in_request) { tls_in_request = true; }
RequestScope::~RequestScope() { tls_in_request = previous_; }
bool RequestScope::active() noexcept { return tls_in_request; }

generation::BackendResponse InstrumentedBackend::generate(const generation::BackendRequest& request) {
  ++calls_;
  if (RequestScope::active()) {
    ++inline_calls_;
    throw Error(ErrorCode::kBackendFailure, "generation backend called on a request thread");
  }
  return inner_->generate(request);
}

std::shared_ptr<generation::GenerationBackend> make_backend(const ServiceConfig& cfg) {
  if (cfg.backend == "mock") return std::make_shared<generation::MockBackend>();
  generation::RemoteConfig rc;
  rc.endpoint = cfg.backend;
  rc.timeout = cfg.backend_timeout;
  rc.retries = cfg.backend_retries;
  rc.max_in_flight = cfg.backend_max_in_flight;
  return std::make_shared<generation::RemoteBackend>(rc);
}

CreativeService::CreativeService(ServiceConfig cfg, ServiceDeps deps)
    : cfg_(prepared(std::move(cfg))),
      clock_(deps.clock ? deps.clock : std::make_shared<SystemClock>()),
      objects_(cfg_.objects_dir()),
      masks_(cfg_.masks_dir(), cfg_.mask_cache_entries),
      creatives_(cfg_.journal_path(), *clock_,
                 store::StoreConfig{cfg_.max_queue, cfg_.max_attempts, cfg_.lease, cfg_.durable_journal}),
      prompts_(load_prompts(cfg_, std::move(deps.prompts))),
      backend_(std::make_shared<InstrumentedBackend>(deps.backend ? deps.backend : make_backend(cfg_))),
      fetcher_(deps.fetcher ? deps.fetcher : std::make_shared<DefaultImageFetcher>()),
      masker_(deps.masker ? deps.masker : std::make_shared<imaging::HeuristicMasker>()),
      bandit_(load_bandit(cfg_)),
      control_policy_(deps.control_seed),
      feedback_log_(cfg_.feedback_path()),
      attribution_(*clock_, cfg_.attribution_window, feedback_log_,
                   [this](const std::string& prompt_id, const bandit::ContextVector& x, int reward) {
                     bandit_->update(prompt_id, x, reward);
                     ++bandit_updates_;
                   }),
      callbacks_(CallbackConfig{cfg_.callback_retries, cfg_.callback_timeout, cfg_.callback_backoff},
                 std::move(deps.callback_sleeper)),
      id_state_(random_seed()),
      last_snapshot_(clock_->now()) {}

CreativeService::~CreativeService() {
  try {
    shutdown();
  } catch (const std::exception& e) {
    spdlog::error("shutdown: {}", e.what());
  }
}

AbGroup CreativeService::assign_group(const std::string& user_id) const {
  const auto slot = static_cast<int>(stable_hash64(user_id + "|" + cfg_.experiment_salt) % 100);
  if (slot < cfg_.split_bandit) return AbGroup::kBandit;
  if (slot < cfg_.split_bandit + cfg_.split_random_control) return AbGroup::kRandomControl;
  return AbGroup::kOriginalOnly;
}

std::string CreativeService::new_request_id() {
  std::uint64_t a = 0;
  std::uint64_t b = 0;
  {
    std::lock_guard lock(id_mu_);
    a = mix64(id_state_++);
    b = mix64(id_state_++);
  }
  std::array<std::uint8_t, 16> raw{};
  for (int i = 0; i < 8; ++i) {
    raw[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(a >> (8 * i));
    raw[static_cast<std::size_t>(8 + i)] = static_cast<std::uint8_t>(b >> (8 * i));
  }
  return to_hex(raw);
}

std::string CreativeService::image_ref_for(const std::string& object_ref) const {
  return cfg_.public_base_url + "/v1/objects/" + object_ref + ".png";
}

CreativeService::Source CreativeService::resolve_source(const ProductRef& product) {
  if (product.image_bytes) {
    if (!looks_like_png(*product.image_bytes)) throw Error(ErrorCode::kBadRequest, "inline image is not a PNG");
    const std::string hash = sha256_hex(*product.image_bytes);
    if (!objects_.contains(hash)) objects_.put(*product.image_bytes);
    return {hash, image_ref_for(hash)};
  }
  const std::string& url = *product.image_url;
  {
    std::lock_guard lock(url_mu_);
    auto it = url_hashes_.find(url);
    if (it != url_hashes_.end()) return {it->second, url};
  }
  if (url.rfind("file://", 0) == 0 && !cfg_.allow_file_urls) {
    throw Error(ErrorCode::kImageFetchFailure, "file:// image URLs are disabled");
  }
  Bytes bytes = fetcher_->fetch(url);
  if (!looks_like_png(bytes)) throw Error(ErrorCode::kImageFetchFailure, "image at " + url + " is not a PNG");
  const std::string hash = objects_.put(bytes);
  std::lock_guard lock(url_mu_);
  if (url_hashes_.size() >= kUrlCacheEntries) url_hashes_.clear();
  url_hashes_[url] = hash;
  return {hash, url};
}

std::optional<std::string> CreativeService::sized_creative(const std::string& object_ref, int width, int height) {
  const std::string cache_key = object_ref + "/" + std::to_string(width) + "x" + std::to_string(height);
  {
    std::lock_guard lock(resize_mu_);
    auto it = resize_index_.find(cache_key);
    if (it != resize_index_.end()) {
      resize_lru_.splice(resize_lru_.begin(), resize_lru_, it->second);
      return it->second->second;
    }
  }
  std::string ref;
  try {
    const auto canonical = imaging::decode_png(objects_.get(object_ref));
    if (canonical.width() == width && canonical.height() == height) {
      ref = object_ref;
    } else {
      ref = objects_.put(imaging::encode_png(imaging::resize_bilinear(canonical, width, height)));
    }
  } catch (const Error& e) {
    spdlog::error("cannot prepare creative {} at {}x{}: {}", object_ref, width, height, e.what());
    return std::nullopt;
  }
  std::lock_guard lock(resize_mu_);
  if (!resize_index_.count(cache_key)) {
    resize_lru_.emplace_front(cache_key, ref);
    resize_index_[cache_key] = resize_lru_.begin();
    while (resize_lru_.size() > std::max<std::size_t>(cfg_.resize_cache_entries, 1)) {
      resize_index_.erase(resize_lru_.back().first);
      resize_lru_.pop_back();
    }
  }
  return ref;
}

CreativeResponse CreativeService::handle_creative(const CreativeRequest& req) {
  RequestScope scope;
  req.validate();

  CreativeResponse resp;
  resp.request_id = new_request_id();
  resp.ab_group = req.ab_override.value_or(assign_group(req.user_id));
  ServedRequest served;
  served.request_id = resp.request_id;
  served.group = resp.ab_group;
  auto finish = [&]() {
    served.prompt_id = resp.prompt_id;
    served.variant = resp.variant;
    if (!served.trainable) served.context = {};
    attribution_.record_request(std::move(served));
    return resp;
  };

  Source src;
  try {
    src = resolve_source(req.product);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kImageFetchFailure) throw;
    spdlog::warn("serving original for product '{}': {}", req.product.id, e.what());
    resp.image_ref = *req.product.image_url;
    return finish();
  }
  resp.image_ref = src.original_ref;
  if (resp.ab_group == AbGroup::kOriginalOnly) return finish();

  std::vector<std::string> eligible;
  try {
    for (const auto& p : prompts_.for_category(req.product.category)) eligible.push_back(p.prompt_id);
  } catch (const Error&) {
    spdlog::warn("no prompts for category '{}'; serving original", req.product.category);
    return finish();
  }

  const auto bucket = imaging::aspect_bucket(req.placement, cfg_.bucket);
  served.context = bandit::build_context(req.user_features, {req.product.category, req.product.attributes},
                                         bucket.index, cfg_.feature_spec);
  const std::string prompt_id = resp.ab_group == AbGroup::kBandit
                                    ? bandit_->select(served.context, eligible).prompt_id
                                    : control_policy_.choose(eligible);
  const CacheKey key{src.image_hash, prompt_id, bucket.index};

  store::Lookup lookup{LookupKind::kFailed, std::nullopt, false};
  try {
    lookup = creatives_.get_or_enqueue(key);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kQueueFull && e.code() != ErrorCode::kStorageFailure) throw;
    spdlog::warn("serving original, could not enqueue {}: {}", key.to_string(), e.what());
    return finish();
  }
  resp.key = key;
  resp.cache = store::to_string(lookup.kind);

  switch (lookup.kind) {
    case LookupKind::kHit: {
      resp.prompt_id = prompt_id;
      if (cfg_.moderation == ModerationMode::kPre && lookup.review_pending) {
        resp.cache = "pending_review";
        break;
      }
      if (auto sized = sized_creative(*lookup.object_ref, req.placement.width, req.placement.height)) {
        resp.variant = Variant::kGenerated;
        resp.image_ref = image_ref_for(*sized);
        served.trainable = resp.ab_group == AbGroup::kBandit;
      }
      break;
    }
    case LookupKind::kEnqueued:
    case LookupKind::kInFlight:
      resp.prompt_id = prompt_id;
      if (req.callback_url) {
        callbacks_.subscribe(key, *req.callback_url);
        if (auto rec = creatives_.get(key);
            rec && (rec->status == CreativeStatus::kReady || rec->status == CreativeStatus::kFailed)) {
          finish_job(*rec);
        }
      }
      break;
    case LookupKind::kRejected:
    case LookupKind::kFailed:
      break;
  }
  return finish();
}

FeedbackOutcome CreativeService::handle_feedback(const std::string& request_id, FeedbackEvent event) {
  if (request_id.empty()) throw Error(ErrorCode::kBadRequest, "request_id is required");
  return attribution_.on_event(request_id, event);
}

void CreativeService::finish_job(const CreativeRecord& rec) {
  if (rec.status == CreativeStatus::kReady) {
    if (cfg_.moderation == ModerationMode::kPre && rec.review_pending) return;
    callbacks_.notify(rec.key, callback_body(rec, image_ref_for(*rec.object_ref)));
  } else if (rec.status == CreativeStatus::kFailed) {
    callbacks_.notify(rec.key, callback_body(rec, std::nullopt));
  }
}

void CreativeService::process_job(const store::GenerationJob& job) {
  const CacheKey& key = job.key;
  std::string reason;
  bool retryable = true;
  try {
    const auto product = imaging::decode_png(objects_.get(key.image_hash));
    const auto mask = generation::obtain_mask(key.image_hash, product, *masker_, &masks_);
    const auto& prompt = prompts_.by_id(key.prompt_id);
    const auto bucket = imaging::bucket_from_index(key.bucket, cfg_.bucket);
    generation::PipelineConfig pc{cfg_.layout, cfg_.bucket, cfg_.reinforce_edges, cfg_.condition_on_product};
    const auto canonical = generation::generate_canonical(product, mask, prompt, bucket, pc, *backend_,
                                                          store::job_seed(key, job.revision));
    const std::string ref = objects_.put(imaging::encode_png(canonical.composite));
    const auto rec = creatives_.complete_ready(key, ref, cfg_.moderation != ModerationMode::kOff);
    spdlog::info("creative {} ready (attempt {}, revision {})", key.to_string(), job.attempt, job.revision);
    finish_job(rec);
    return;
  } catch (const Error& e) {
    reason = std::string(e.what());
    switch (e.code()) {
      case ErrorCode::kEmptyMask:
      case ErrorCode::kImageDecode:
      case ErrorCode::kNotFound:
      case ErrorCode::kInvalidArgument:
      case ErrorCode::kDegenerateScale:
        retryable = false;
        break;
      case ErrorCode::kIllegalTransition:
        spdlog::warn("creative {} changed state while generating: {}", key.to_string(), reason);
        return;
      default:
        break;
    }
  } catch (const std::exception& e) {
    reason = e.what();
  }
  spdlog::warn("generation of {} failed (attempt {}): {}", key.to_string(), job.attempt, reason);
  try {
    const auto rec = creatives_.complete_failed(key, reason, retryable);
    finish_job(rec);
  } catch (const Error& e) {
    spdlog::warn("could not record failure of {}: {}", key.to_string(), e.what());
  }
}

bool CreativeService::run_one_job(Millis timeout) {
  auto job = timeout > Millis(0) ? creatives_.wait_dequeue(timeout) : creatives_.dequeue();
  if (!job) return false;
  process_job(*job);
  return true;
}

std::size_t CreativeService::run_pending_jobs() {
  std::size_t n = 0;
  while (run_one_job()) ++n;
  return n;
}

void CreativeService::maintenance_tick() {
  for (const auto& key : creatives_.sweep_stale()) {
    if (auto rec = creatives_.get(key); rec && rec->status == CreativeStatus::kFailed) finish_job(*rec);
  }
  attribution_.expire_due();
  bool due = false;
  {
    std::lock_guard lock(snapshot_mu_);
    const auto now = clock_->now();
    if (now - last_snapshot_ >= cfg_.snapshot_interval) {
      last_snapshot_ = now;
      due = true;
    }
  }
  if (due) {
    try {
      save_bandit_snapshot();
    } catch (const std::exception& e) {
      spdlog::error("bandit snapshot failed: {}", e.what());
    }
  }
}

void CreativeService::save_bandit_snapshot() const {
  bandit::save_snapshot(cfg_.snapshot_path(), bandit_->snapshot(), cfg_.feature_spec);
}

void CreativeService::shutdown() {
  creatives_.shutdown();
  save_bandit_snapshot();
}

std::vector<CreativeRecord> CreativeService::pending_review(std::size_t limit) const {
  return creatives_.pending_review(limit);
}

CreativeRecord CreativeService::approve(const CacheKey& key) {
  const bool was_pending = [&] {
    auto rec = creatives_.get(key);
    return rec && rec->review_pending;
  }();
  auto rec = creatives_.approve(key);
  if (was_pending && cfg_.moderation == ModerationMode::kPre) finish_job(rec);
  return rec;
}

CreativeRecord CreativeService::reject(const CacheKey& key) { return creatives_.reject(key); }

CreativeRecord CreativeService::regenerate(const CacheKey& key) { return creatives_.regenerate(key); }

json CreativeService::review_item(const CreativeRecord& rec) const {
  json prompt_text;
  json category;
  if (prompts_.contains(rec.key.prompt_id)) {
    const auto& p = prompts_.by_id(rec.key.prompt_id);
    prompt_text = p.text;
    category = p.category;
  }
  return {{"key", rec.key.to_string()},
          {"image_hash", rec.key.image_hash},
          {"prompt_id", rec.key.prompt_id},
          {"bucket", rec.key.bucket},
          {"status", store::to_string(rec.status)},
          {"review_pending", rec.review_pending},
          {"attempts", rec.attempts},
          {"revision", rec.revision},
          {"failure_reason", rec.failure_reason ? json(*rec.failure_reason) : json()},
          {"creative_url", rec.object_ref ? json(image_ref_for(*rec.object_ref)) : json()},
          {"original_url", image_ref_for(rec.key.image_hash)},
          {"prompt_text", prompt_text},
          {"category", category},
          {"created", to_unix_millis(rec.created)},
          {"updated", to_unix_millis(rec.updated)}};
}

json CreativeService::bandit_stats() const {
  std::map<std::string, bandit::ArmStats> by_arm;
  for (auto& s : bandit_->stats()) by_arm[s.prompt_id] = s;
  const double fresh_trace = static_cast<double>(cfg_.feature_spec.dimension);

  json categories = json::array();
  std::uint64_t total_pulls = 0;
  for (const auto& cat : prompts_.categories()) {
    json arms = json::array();
    for (const auto& p : prompts_.for_category(cat)) {
      bandit::ArmStats s;
      s.prompt_id = p.prompt_id;
      s.trace_a = fresh_trace;
      if (auto it = by_arm.find(p.prompt_id); it != by_arm.end()) s = it->second;
      total_pulls += s.pulls;
      arms.push_back({{"prompt_id", p.prompt_id},
                      {"text", p.text},
                      {"pulls", s.pulls},
                      {"reward_sum", s.reward_sum},
                      {"estimated_ctr", s.pulls > 0 ? json(s.reward_sum / static_cast<double>(s.pulls)) : json()},
                      {"mean_reward_estimate", s.mean_reward_estimate ? json(*s.mean_reward_estimate) : json()},
                      {"trace_a", s.trace_a}});
    }
    categories.push_back({{"category", cat}, {"arms", arms}});
  }
  return {{"dimension", cfg_.feature_spec.dimension},
          {"alpha", cfg_.alpha},
          {"total_updates", bandit_updates_.load()},
          {"total_pulls", total_pulls},
          {"categories", categories}};
}

namespace {

/// Cumulative CTR per group at up to `bins` points across the journal span.
json feedback_timeline(const std::filesystem::path& path, std::int64_t since_ms, int bins) {
  struct Event {
    std::int64_t ts;
    bool bandit;
    bool click;
  };
  std::vector<Event> events;
  std::set<std::pair<std::string, std::string>> seen;
  std::ifstream in(path);
  std::string line;
  while (std::getline(in, line)) {
    try {
      const auto j = json::parse(line);
      const auto ts = j.at("ts").get<std::int64_t>();
      const auto group = j.at("group").get<std::string>();
      const auto event = j.at("event").get<std::string>();
      if (ts < since_ms || (group != "bandit" && group != "random_control")) continue;
      if (event != "impression" && event != "click") continue;
      if (!seen.emplace(j.at("request_id").get<std::string>(), event).second) continue;
      events.push_back({ts, group == "bandit", event == "click"});
    } catch (const json::exception&) {
      continue;
    }
  }
  json out = json::array();
  if (events.empty()) return out;
  std::stable_sort(events.begin(), events.end(), [](const Event& a, const Event& b) { return a.ts < b.ts; });
  const std::int64_t first = events.front().ts;
  const std::int64_t span = std::max<std::int64_t>(events.back().ts - first, 1);
  std::int64_t counts[2][2] = {{0, 0}, {0, 0}};  // [bandit][click]
  std::size_t i = 0;
  for (int b = 1; b <= bins; ++b) {
    const std::int64_t edge = first + span * b / bins;
    while (i < events.size() && events[i].ts <= edge) {
      ++counts[events[i].bandit ? 1 : 0][events[i].click ? 1 : 0];
      ++i;
    }
    auto ctr = [&](int g) {
      return counts[g][0] > 0 ? json(static_cast<double>(counts[g][1]) / static_cast<double>(counts[g][0])) : json();
    };
    json lift;
    if (counts[0][0] > 0 && counts[1][0] > 0 && counts[0][1] > 0) {
      lift = (static_cast<double>(counts[1][1]) / counts[1][0]) / (static_cast<double>(counts[0][1]) / counts[0][0]) - 1.0;
    }
    out.push_back({{"ts", edge}, {"bandit_ctr", ctr(1)}, {"control_ctr", ctr(0)}, {"lift", lift}});
  }
  return out;
}

}  // namespace

json CreativeService::ab_report(std::optional<Millis> window) const {
  const std::int64_t since = window ? to_unix_millis(clock_->now() - *window) : 0;
  std::map<std::string, evalsim::FeedbackTally> tally;
  try {
    tally = evalsim::tally_feedback_journal(cfg_.feedback_path(), since);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kNotFound) throw;
  }
  std::int64_t total = 0;
  for (const auto& [g, t] : tally) total += t.requests;

  json groups = json::object();
  for (AbGroup g : {AbGroup::kBandit, AbGroup::kRandomControl, AbGroup::kOriginalOnly}) {
    const auto t = tally.count(to_string(g)) ? tally.at(to_string(g)) : evalsim::FeedbackTally{};
    groups[to_string(g)] = {
        {"requests", t.requests},
        {"request_share", total > 0 ? static_cast<double>(t.requests) / static_cast<double>(total) : 0.0},
        {"impressions", t.impressions},
        {"clicks", t.clicks},
        {"ctr", t.impressions > 0 ? json(static_cast<double>(t.clicks) / static_cast<double>(t.impressions)) : json()}};
  }
  auto summary_of = [&](const char* g) {
    const auto t = tally.count(g) ? tally.at(g) : evalsim::FeedbackTally{};
    return evalsim::GroupSummary{t.impressions, t.clicks};
  };
  const auto report = evalsim::summarize(summary_of("bandit"), summary_of("random_control"));
  auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(); };
  return {{"window_minutes", window ? json(static_cast<double>(window->count()) / 60'000.0) : json()},
          {"since_ms", since},
          {"total_requests", total},
          {"groups", groups},
          {"treatment", "bandit"},
          {"control", "random_control"},
          {"relative_gain", opt(report.relative_gain)},
          {"z", opt(report.z)},
          {"p", opt(report.p)},
          {"timeline", feedback_timeline(cfg_.feedback_path(), since, 20)}};
}

Bytes CreativeService::object_bytes(const std::string& ref) const {
  if (!is_sha256_hex(ref)) throw Error(ErrorCode::kNotFound, "no object " + ref);
  return objects_.get(ref);
}

}  // namespace adgen::service
