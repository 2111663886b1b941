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

#include "adgen/store/mask_cache.hpp"

#include <spdlog/spdlog.h>

#include "adgen/common/error.hpp"
#include "adgen/common/hash.hpp"
#include "adgen/imaging/png.hpp"
#include "adgen/store/object_store.hpp"

namespace adgen::store {

namespace fs = std::filesystem;

MaskCache::MaskCache(fs::path dir, std::size_t memory_entries)
    : dir_(std::move(dir)), capacity_(memory_entries) {
  std::error_code ec;
  fs::create_directories(dir_, ec);
  if (ec) throw Error(ErrorCode::kStorageFailure, "cannot create " + dir_.string());
}

std::optional<imaging::MaskResult> MaskCache::get(const std::string& image_hash) {
  if (!is_sha256_hex(image_hash)) return std::nullopt;
  {
    std::lock_guard lock(mu_);
    if (auto it = index_.find(image_hash); it != index_.end()) {
      lru_.splice(lru_.begin(), lru_, it->second);
      ++hits_;
      return it->second->second;
    }
  }

  const auto path = dir_ / (image_hash + ".png");
  std::error_code ec;
  if (!fs::exists(path, ec)) {
    std::lock_guard lock(mu_);
    ++misses_;
    return std::nullopt;
  }
  try {
    auto mask = imaging::decode_mask_png(read_file(path));
    imaging::MaskResult entry{mask, imaging::bounding_box(mask)};
    std::lock_guard lock(mu_);
    ++hits_;
    remember(image_hash, entry);
    return entry;
  } catch (const Error& e) {
    spdlog::warn("mask cache entry {} unreadable ({}); recomputing", image_hash, e.what());
    fs::remove(path, ec);
    std::lock_guard lock(mu_);
    ++misses_;
    return std::nullopt;
  }
}

void MaskCache::put(const std::string& image_hash, const imaging::MaskResult& entry) {
  if (!is_sha256_hex(image_hash)) throw Error(ErrorCode::kInvalidArgument, "malformed image hash");
  try {
    write_file_atomic(dir_ / (image_hash + ".png"), imaging::encode_mask_png(entry.mask));
  } catch (const Error& e) {
    // The cache is an optimization; a failed write only costs a recompute.
    spdlog::warn("mask cache write failed for {}: {}", image_hash, e.what());
  }
  std::lock_guard lock(mu_);
  remember(image_hash, entry);
}

void MaskCache::remember(const std::string& image_hash, const imaging::MaskResult& entry) {
  if (capacity_ == 0) return;
  if (auto it = index_.find(image_hash); it != index_.end()) {
    it->second->second = entry;
    lru_.splice(lru_.begin(), lru_, it->second);
    return;
  }
  lru_.emplace_front(image_hash, entry);
  index_[image_hash] = lru_.begin();
  while (lru_.size() > capacity_) {
    index_.erase(lru_.back().first);
    lru_.pop_back();
  }
}

std::uint64_t MaskCache::hits() const {
  std::lock_guard lock(mu_);
  return hits_;
}

std::uint64_t MaskCache::misses() const {
  std::lock_guard lock(mu_);
  return misses_;
}

}  // namespace adgen::store
