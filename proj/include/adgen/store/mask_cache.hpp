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

#include <cstdint>
#include <filesystem>
#include <list>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>

#include "adgen/imaging/ops.hpp"

namespace adgen::store {

/// Masks keyed by original image hash only, so every prompt and size of one
/// product reuses a single extraction. Disk layout: <dir>/<sha256>.png
/// (single-channel, 0/255), fronted by an in-memory LRU bounded by count.
/// Unreadable entries are treated as misses and removed.
class MaskCache {
 public:
  explicit MaskCache(std::filesystem::path dir, std::size_t memory_entries = 256);

  std::optional<imaging::MaskResult> get(const std::string& image_hash);
  void put(const std::string& image_hash, const imaging::MaskResult& entry);

  std::uint64_t hits() const;
  std::uint64_t misses() const;

 private:
  void remember(const std::string& image_hash, const imaging::MaskResult& entry);

  std::filesystem::path dir_;
  std::size_t capacity_;
  mutable std::mutex mu_;
  std::list<std::pair<std::string, imaging::MaskResult>> lru_;
  std::unordered_map<std::string, decltype(lru_)::iterator> index_;
  std::uint64_t hits_ = 0;
  std::uint64_t misses_ = 0;
};

}  // namespace adgen::store
