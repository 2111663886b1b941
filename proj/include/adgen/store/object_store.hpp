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

#include <filesystem>
#include <span>
#include <string>

#include "adgen/common/hash.hpp"

namespace adgen::store {

/// Content-addressed blob store: <root>/<first 2 hex>/<sha256>.png.
/// Writes are atomic (temp file + rename) and idempotent.
class ObjectStore {
 public:
  explicit ObjectStore(std::filesystem::path root);

  /// Returns the SHA-256 hex ref. Throws Error(kStorageFailure).
  std::string put(std::span<const std::uint8_t> bytes);
  /// Throws Error(kNotFound) or Error(kStorageFailure) (including digest mismatch).
  Bytes get(const std::string& ref) const;
  bool contains(const std::string& ref) const;
  std::filesystem::path path_for(const std::string& ref) const;

 private:
  std::filesystem::path root_;
};

Bytes read_file(const std::filesystem::path& path);
/// Writes through a sibling temp file and renames into place.
void write_file_atomic(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

}  // namespace adgen::store
