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

#include <chrono>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>

#include "adgen/bandit/features.hpp"
#include "adgen/common/clock.hpp"
#include "adgen/imaging/types.hpp"
#include "json.hpp"

namespace adgen::service {

enum class AbGroup { kBandit, kRandomControl, kOriginalOnly };
const char* to_string(AbGroup g);
/// Throws Error(kBadRequest).
AbGroup ab_group_from_string(const std::string& s);

enum class ModerationMode { kOff, kPost, kPre };
const char* to_string(ModerationMode m);
ModerationMode moderation_from_string(const std::string& s);

struct ServiceConfig {
  std::filesystem::path data_dir = "data";
  std::string host = "0.0.0.0";
  int port = 8080;
  std::string public_base_url;  // prefix for image refs, e.g. http://cdn.local

  // A/B split in percent, summing to 100.
  int split_bandit = 50;
  int split_random_control = 50;
  int split_original_only = 0;
  std::string experiment_salt = "adgen-ab-1";

  double alpha = 1.0;
  bandit::FeatureSpec feature_spec = bandit::default_feature_spec();
  Millis attribution_window{std::chrono::hours(1)};

  imaging::BucketConfig bucket;
  imaging::LayoutConfig layout;
  bool reinforce_edges = true;
  bool condition_on_product = true;

  std::string backend = "mock";  // "mock" or an http:// endpoint
  Millis backend_timeout{std::chrono::seconds(60)};
  int backend_retries = 3;
  int backend_max_in_flight = 4;

  ModerationMode moderation = ModerationMode::kPost;
  int workers = 2;
  std::size_t max_queue = 10'000;
  int max_attempts = 3;
  Millis lease{std::chrono::minutes(10)};
  bool durable_journal = false;

  int callback_retries = 3;
  Millis callback_timeout{std::chrono::seconds(5)};
  Millis callback_backoff{std::chrono::milliseconds(200)};

  std::optional<std::filesystem::path> prompts_file;
  bool allow_file_urls = false;  // accept file:// product image URLs
  std::size_t mask_cache_entries = 256;
  std::size_t resize_cache_entries = 1024;
  Millis snapshot_interval{std::chrono::seconds(60)};
  Millis maintenance_interval{std::chrono::seconds(1)};

  /// Throws Error(kInvalidArgument).
  void validate() const;

  std::filesystem::path journal_path() const { return data_dir / "journal.jsonl"; }
  std::filesystem::path objects_dir() const { return data_dir / "objects"; }
  std::filesystem::path masks_dir() const { return data_dir / "masks"; }
  std::filesystem::path feedback_path() const { return data_dir / "feedback.jsonl"; }
  std::filesystem::path snapshot_path() const { return data_dir / "bandit.json"; }
};

/// Fields present in `j` override the defaults; unknown keys are rejected.
ServiceConfig config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ServiceConfig& cfg);

using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;
EnvLookup process_env();

/// ADGEN_DATA_DIR, ADGEN_HOST, ADGEN_PORT, ADGEN_BACKEND, ADGEN_ALPHA,
/// ADGEN_DIMENSION, ADGEN_MODERATION, ADGEN_WORKERS, ADGEN_SALT,
/// ADGEN_WINDOW_MINUTES and ADGEN_SPLITS ("bandit=50,random_control=50,original_only=0").
void apply_env_overrides(ServiceConfig& cfg, const EnvLookup& env);

/// Defaults, then the JSON file (if given), then the environment.
ServiceConfig load_config(const std::optional<std::filesystem::path>& path, const EnvLookup& env = process_env());

}  // namespace adgen::service
