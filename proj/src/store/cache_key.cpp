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

#include "adgen/store/cache_key.hpp"

#include "adgen/common/error.hpp"
#include "adgen/common/hash.hpp"

namespace adgen::store {

std::string CacheKey::to_string() const {
  return image_hash + "/" + prompt_id + "/" + std::to_string(bucket);
}

void CacheKey::validate() const {
  if (!is_sha256_hex(image_hash)) {
    throw Error(ErrorCode::kInvalidArgument, "image_hash is not a lowercase sha256 hex digest");
  }
  if (prompt_id.empty() || prompt_id.find('/') != std::string::npos) {
    throw Error(ErrorCode::kInvalidArgument, "prompt_id must be non-empty and free of '/'");
  }
}

nlohmann::json to_json(const CacheKey& key) {
  return {{"image_hash", key.image_hash}, {"prompt_id", key.prompt_id}, {"bucket", key.bucket}};
}

CacheKey key_from_json(const nlohmann::json& j) {
  try {
    return {j.at("image_hash").get<std::string>(), j.at("prompt_id").get<std::string>(),
            j.at("bucket").get<int>()};
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kInvalidArgument, std::string("cache key: ") + e.what());
  }
}

const char* to_string(CreativeStatus s) {
  switch (s) {
    case CreativeStatus::kQueued: return "queued";
    case CreativeStatus::kGenerating: return "generating";
    case CreativeStatus::kReady: return "ready";
    case CreativeStatus::kFailed: return "failed";
    case CreativeStatus::kRejected: return "rejected";
  }
  return "unknown";
}

CreativeStatus status_from_string(const std::string& s) {
  if (s == "queued") return CreativeStatus::kQueued;
  if (s == "generating") return CreativeStatus::kGenerating;
  if (s == "ready") return CreativeStatus::kReady;
  if (s == "failed") return CreativeStatus::kFailed;
  if (s == "rejected") return CreativeStatus::kRejected;
  throw Error(ErrorCode::kInvalidArgument, "unknown creative status '" + s + "'");
}

bool is_legal_transition(CreativeStatus from, CreativeStatus to) {
  using S = CreativeStatus;
  switch (from) {
    case S::kQueued: return to == S::kGenerating;
    case S::kGenerating: return to == S::kReady || to == S::kFailed || to == S::kQueued;
    case S::kReady: return to == S::kRejected;
    case S::kFailed: return to == S::kQueued;
    case S::kRejected: return to == S::kQueued;
  }
  return false;
}

}  // namespace adgen::store
