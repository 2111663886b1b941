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

#include <compare>
#include <optional>
#include <string>

#include "adgen/common/clock.hpp"
#include "json.hpp"

namespace adgen::store {

/// Identity of one creative: (original image, prompt, aspect bucket).
/// Ordered lexicographically by (image_hash, prompt_id, bucket).
struct CacheKey {
  std::string image_hash;  // SHA-256 hex of the original product image bytes
  std::string prompt_id;
  int bucket = 0;

  auto operator<=>(const CacheKey&) const = default;

  /// "image_hash/prompt_id/bucket", the form used in review URLs.
  std::string to_string() const;
  /// Throws Error(kInvalidArgument) for a malformed hash or prompt id.
  void validate() const;
};

nlohmann::json to_json(const CacheKey& key);
CacheKey key_from_json(const nlohmann::json& j);

enum class CreativeStatus { kQueued, kGenerating, kReady, kFailed, kRejected };

const char* to_string(CreativeStatus s);
CreativeStatus status_from_string(const std::string& s);

/// Automatic and human transitions allowed by the lifecycle:
///   Queued -> Generating
///   Generating -> Ready | Failed | Queued (retry)
///   Ready -> Rejected (human)
///   Failed | Rejected -> Queued (human regenerate only)
bool is_legal_transition(CreativeStatus from, CreativeStatus to);

struct CreativeRecord {
  CacheKey key;
  CreativeStatus status = CreativeStatus::kQueued;
  std::optional<std::string> object_ref;  // present iff Ready or Rejected
  TimePoint created;
  TimePoint updated;
  int attempts = 0;   // generation attempts in the current revision
  int revision = 0;   // bumped by every human regenerate; feeds the seed
  std::optional<std::string> failure_reason;
  bool review_pending = false;
};

}  // namespace adgen::store
