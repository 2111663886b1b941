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

#include "adgen/service/config.hpp"

#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "adgen/bandit/snapshot.hpp"
#include "adgen/common/error.hpp"

namespace adgen::service {

using nlohmann::json;

const char* to_string(AbGroup g) {
  switch (g) {
    case AbGroup::kBandit: return "bandit";
    case AbGroup::kRandomControl: return "random_control";
    case AbGroup::kOriginalOnly: return "original_only";
  }
  return "unknown";
}

AbGroup ab_group_from_string(const std::string& s) {
  if (s == "bandit") return AbGroup::kBandit;
  if (s == "random_control") return AbGroup::kRandomControl;
  if (s == "original_only") return AbGroup::kOriginalOnly;
  throw Error(ErrorCode::kBadRequest, "unknown ab group '" + s + "'");
}

const char* to_string(ModerationMode m) {
  switch (m) {
    case ModerationMode::kOff: return "off";
    case ModerationMode::kPost: return "post";
    case ModerationMode::kPre: return "pre";
  }
  return "unknown";
}

ModerationMode moderation_from_string(const std::string& s) {
  if (s == "off") return ModerationMode::kOff;
  if (s == "post") return ModerationMode::kPost;
  if (s == "pre") return ModerationMode::kPre;
  throw Error(ErrorCode::kInvalidArgument, "moderation_mode must be off, post or pre, got '" + s + "'");
}

void ServiceConfig::validate() const {
  auto fail = [](const std::string& msg) { throw Error(ErrorCode::kInvalidArgument, msg); };
  if (split_bandit < 0 || split_random_control < 0 || split_original_only < 0 ||
      split_bandit + split_random_control + split_original_only != 100) {
    fail("A/B splits must be non-negative and sum to 100");
  }
  if (port < 0 || port > 65535) fail("port out of range");
  if (!(alpha >= 0.0)) fail("alpha must be >= 0");
  feature_spec.validate();
  if (attribution_window <= Millis(0)) fail("attribution window must be positive");
  layout.validate();
  if (!(bucket.log2_step > 0.0) || bucket.min_width < 8 || bucket.min_width > bucket.max_width ||
      bucket.canonical_height < 16) {
    fail("invalid bucket config");
  }
  if (backend != "mock" && backend.rfind("http://", 0) != 0) fail("backend must be 'mock' or an http:// endpoint");
  if (workers < 1) fail("workers must be >= 1");
  if (max_queue < 1) fail("max_queue must be >= 1");
  if (max_attempts < 1) fail("max_attempts must be >= 1");
  if (lease <= Millis(0)) fail("lease must be positive");
  if (callback_retries < 0 || backend_retries < 0) fail("retries must be >= 0");
  if (backend_max_in_flight < 1) fail("backend_max_in_flight must be >= 1");
}

namespace {

const std::set<std::string> kKnownKeys = {
    "data_dir", "host", "port", "public_base_url", "splits", "experiment_salt", "alpha", "dimension",
    "feature_spec", "attribution_window_minutes", "bucket", "layout", "reinforce_edges",
    "condition_on_product", "backend", "backend_timeout_ms", "backend_retries", "backend_max_in_flight",
    "moderation_mode", "workers", "max_queue", "max_attempts", "lease_minutes", "durable_journal",
    "callback_retries", "callback_timeout_ms", "callback_backoff_ms", "prompts_file", "allow_file_urls", "mask_cache_entries",
    "resize_cache_entries", "snapshot_interval_s", "maintenance_interval_ms"};

void apply_splits(ServiceConfig& cfg, const json& j) {
  for (const auto& [k, v] : j.items()) {
    switch (ab_group_from_string(k)) {
      case AbGroup::kBandit: cfg.split_bandit = v.get<int>(); break;
      case AbGroup::kRandomControl: cfg.split_random_control = v.get<int>(); break;
      case AbGroup::kOriginalOnly: cfg.split_original_only = v.get<int>(); break;
    }
  }
}

}  // namespace

ServiceConfig config_from_json(const json& j) {
  ServiceConfig cfg;
  if (!j.is_object()) throw Error(ErrorCode::kInvalidArgument, "config must be a JSON object");
  for (const auto& [k, v] : j.items()) {
    if (!kKnownKeys.count(k)) throw Error(ErrorCode::kInvalidArgument, "unknown config key '" + k + "'");
  }
  try {
    cfg.data_dir = j.value("data_dir", cfg.data_dir.string());
    cfg.host = j.value("host", cfg.host);
    cfg.port = j.value("port", cfg.port);
    cfg.public_base_url = j.value("public_base_url", cfg.public_base_url);
    if (j.contains("splits")) apply_splits(cfg, j["splits"]);
    cfg.experiment_salt = j.value("experiment_salt", cfg.experiment_salt);
    cfg.alpha = j.value("alpha", cfg.alpha);
    if (j.contains("feature_spec")) cfg.feature_spec = bandit::feature_spec_from_json(j["feature_spec"]);
    if (j.contains("dimension")) cfg.feature_spec.dimension = j["dimension"].get<int>();
    if (j.contains("attribution_window_minutes")) {
      cfg.attribution_window = Millis(static_cast<std::int64_t>(j["attribution_window_minutes"].get<double>() * 60'000));
    }
    if (j.contains("bucket")) {
      const auto& b = j["bucket"];
      cfg.bucket.log2_step = b.value("log2_step", cfg.bucket.log2_step);
      cfg.bucket.canonical_height = b.value("canonical_height", cfg.bucket.canonical_height);
      cfg.bucket.min_width = b.value("min_width", cfg.bucket.min_width);
      cfg.bucket.max_width = b.value("max_width", cfg.bucket.max_width);
    }
    if (j.contains("layout")) {
      const auto& l = j["layout"];
      cfg.layout.max_fill_fraction = l.value("max_fill_fraction", cfg.layout.max_fill_fraction);
      cfg.layout.anchor_x = l.value("anchor_x", cfg.layout.anchor_x);
      cfg.layout.baseline_y = l.value("baseline_y", cfg.layout.baseline_y);
      cfg.layout.max_upscale = l.value("max_upscale", cfg.layout.max_upscale);
      if (l.contains("background")) {
        const auto bg = l["background"].get<std::string>();
        if (bg == "transparent") {
          cfg.layout.background = imaging::Background::kTransparent;
        } else if (bg == "white") {
          cfg.layout.background = imaging::Background::kWhite;
        } else {
          throw Error(ErrorCode::kInvalidArgument, "layout.background must be transparent or white");
        }
      }
    }
    cfg.reinforce_edges = j.value("reinforce_edges", cfg.reinforce_edges);
    cfg.condition_on_product = j.value("condition_on_product", cfg.condition_on_product);
    cfg.backend = j.value("backend", cfg.backend);
    cfg.backend_timeout = Millis(j.value("backend_timeout_ms", cfg.backend_timeout.count()));
    cfg.backend_retries = j.value("backend_retries", cfg.backend_retries);
    cfg.backend_max_in_flight = j.value("backend_max_in_flight", cfg.backend_max_in_flight);
    if (j.contains("moderation_mode")) cfg.moderation = moderation_from_string(j["moderation_mode"].get<std::string>());
    cfg.workers = j.value("workers", cfg.workers);
    cfg.max_queue = j.value("max_queue", cfg.max_queue);
    cfg.max_attempts = j.value("max_attempts", cfg.max_attempts);
    if (j.contains("lease_minutes")) {
      cfg.lease = Millis(static_cast<std::int64_t>(j["lease_minutes"].get<double>() * 60'000));
    }
    cfg.durable_journal = j.value("durable_journal", cfg.durable_journal);
    cfg.callback_retries = j.value("callback_retries", cfg.callback_retries);
    cfg.callback_timeout = Millis(j.value("callback_timeout_ms", cfg.callback_timeout.count()));
    cfg.callback_backoff = Millis(j.value("callback_backoff_ms", cfg.callback_backoff.count()));
    if (j.contains("prompts_file") && !j["prompts_file"].is_null()) {
      cfg.prompts_file = j["prompts_file"].get<std::string>();
    }
    cfg.allow_file_urls = j.value("allow_file_urls", cfg.allow_file_urls);
    cfg.mask_cache_entries = j.value("mask_cache_entries", cfg.mask_cache_entries);
    cfg.resize_cache_entries = j.value("resize_cache_entries", cfg.resize_cache_entries);
    if (j.contains("snapshot_interval_s")) {
      cfg.snapshot_interval = Millis(static_cast<std::int64_t>(j["snapshot_interval_s"].get<double>() * 1000));
    }
    cfg.maintenance_interval = Millis(j.value("maintenance_interval_ms", cfg.maintenance_interval.count()));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kInvalidArgument, std::string("config: ") + e.what());
  }
  return cfg;
}

json to_json(const ServiceConfig& cfg) {
  return {
      {"data_dir", cfg.data_dir.string()},
      {"host", cfg.host},
      {"port", cfg.port},
      {"public_base_url", cfg.public_base_url},
      {"splits",
       {{"bandit", cfg.split_bandit},
        {"random_control", cfg.split_random_control},
        {"original_only", cfg.split_original_only}}},
      {"experiment_salt", cfg.experiment_salt},
      {"alpha", cfg.alpha},
      {"feature_spec", bandit::feature_spec_to_json(cfg.feature_spec)},
      {"attribution_window_minutes", static_cast<double>(cfg.attribution_window.count()) / 60'000.0},
      {"bucket",
       {{"log2_step", cfg.bucket.log2_step},
        {"canonical_height", cfg.bucket.canonical_height},
        {"min_width", cfg.bucket.min_width},
        {"max_width", cfg.bucket.max_width}}},
      {"layout",
       {{"max_fill_fraction", cfg.layout.max_fill_fraction},
        {"anchor_x", cfg.layout.anchor_x},
        {"baseline_y", cfg.layout.baseline_y},
        {"max_upscale", cfg.layout.max_upscale},
        {"background", cfg.layout.background == imaging::Background::kWhite ? "white" : "transparent"}}},
      {"reinforce_edges", cfg.reinforce_edges},
      {"condition_on_product", cfg.condition_on_product},
      {"backend", cfg.backend},
      {"backend_timeout_ms", cfg.backend_timeout.count()},
      {"backend_retries", cfg.backend_retries},
      {"backend_max_in_flight", cfg.backend_max_in_flight},
      {"moderation_mode", to_string(cfg.moderation)},
      {"workers", cfg.workers},
      {"max_queue", cfg.max_queue},
      {"max_attempts", cfg.max_attempts},
      {"lease_minutes", static_cast<double>(cfg.lease.count()) / 60'000.0},
      {"durable_journal", cfg.durable_journal},
      {"callback_retries", cfg.callback_retries},
      {"callback_timeout_ms", cfg.callback_timeout.count()},
      {"callback_backoff_ms", cfg.callback_backoff.count()},
      {"prompts_file", cfg.prompts_file ? json(cfg.prompts_file->string()) : json()},
      {"allow_file_urls", cfg.allow_file_urls},
      {"mask_cache_entries", cfg.mask_cache_entries},
      {"resize_cache_entries", cfg.resize_cache_entries},
      {"snapshot_interval_s", static_cast<double>(cfg.snapshot_interval.count()) / 1000.0},
      {"maintenance_interval_ms", cfg.maintenance_interval.count()},
  };
}

EnvLookup process_env() {
  return [](const std::string& name) -> std::optional<std::string> {
    const char* v = std::getenv(name.c_str());
    if (!v) return std::nullopt;
    return std::string(v);
  };
}

namespace {

template <typename T>
T parse_number(const std::string& name, const std::string& text) {
  std::istringstream in(text);
  T v{};
  in >> v;
  if (!in || !in.eof()) throw Error(ErrorCode::kInvalidArgument, name + ": not a number: '" + text + "'");
  return v;
}

}  // namespace

void apply_env_overrides(ServiceConfig& cfg, const EnvLookup& env) {
  if (auto v = env("ADGEN_DATA_DIR")) cfg.data_dir = *v;
  if (auto v = env("ADGEN_HOST")) cfg.host = *v;
  if (auto v = env("ADGEN_PORT")) cfg.port = parse_number<int>("ADGEN_PORT", *v);
  if (auto v = env("ADGEN_BACKEND")) cfg.backend = *v;
  if (auto v = env("ADGEN_ALPHA")) cfg.alpha = parse_number<double>("ADGEN_ALPHA", *v);
  if (auto v = env("ADGEN_DIMENSION")) cfg.feature_spec.dimension = parse_number<int>("ADGEN_DIMENSION", *v);
  if (auto v = env("ADGEN_MODERATION")) cfg.moderation = moderation_from_string(*v);
  if (auto v = env("ADGEN_WORKERS")) cfg.workers = parse_number<int>("ADGEN_WORKERS", *v);
  if (auto v = env("ADGEN_SALT")) cfg.experiment_salt = *v;
  if (auto v = env("ADGEN_WINDOW_MINUTES")) {
    cfg.attribution_window = Millis(static_cast<std::int64_t>(parse_number<double>("ADGEN_WINDOW_MINUTES", *v) * 60'000));
  }
  if (auto v = env("ADGEN_SPLITS")) {
    json splits = json::object();
    std::istringstream in(*v);
    std::string item;
    while (std::getline(in, item, ',')) {
      const auto eq = item.find('=');
      if (eq == std::string::npos) throw Error(ErrorCode::kInvalidArgument, "ADGEN_SPLITS entry without '='");
      splits[item.substr(0, eq)] = parse_number<int>("ADGEN_SPLITS", item.substr(eq + 1));
    }
    try {
      apply_splits(cfg, splits);
    } catch (const Error& e) {
      throw Error(ErrorCode::kInvalidArgument, std::string("ADGEN_SPLITS: ") + e.what());
    }
  }
}

ServiceConfig load_config(const std::optional<std::filesystem::path>& path, const EnvLookup& env) {
  ServiceConfig cfg;
  if (path) {
    std::ifstream in(*path);
    if (!in) throw Error(ErrorCode::kNotFound, "cannot open config " + path->string());
    json j;
    try {
      j = json::parse(in);
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kInvalidArgument, "config " + path->string() + ": " + e.what());
    }
    cfg = config_from_json(j);
  }
  apply_env_overrides(cfg, env);
  cfg.validate();
  return cfg;
}

}  // namespace adgen::service
