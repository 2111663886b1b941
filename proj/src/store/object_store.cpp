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

#include "adgen/store/object_store.hpp"

#include <atomic>
#include <fstream>
#include <iterator>
#include <thread>

#include "adgen/common/error.hpp"

namespace adgen::store {

namespace fs = std::filesystem;

Bytes read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kNotFound, "cannot open " + path.string());
  Bytes data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw Error(ErrorCode::kStorageFailure, "read failed: " + path.string());
  return data;
}

void write_file_atomic(const fs::path& path, std::span<const std::uint8_t> bytes) {
  static std::atomic<std::uint64_t> counter{0};
  std::error_code ec;
  fs::create_directories(path.parent_path(), ec);
  if (ec) throw Error(ErrorCode::kStorageFailure, "mkdir " + path.parent_path().string() + ": " + ec.message());

  const auto tmp = path.string() + ".tmp." +
                   std::to_string(std::hash<std::thread::id>{}(std::this_thread::get_id())) + "." +
                   std::to_string(counter.fetch_add(1));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) throw Error(ErrorCode::kStorageFailure, "write failed: " + tmp);
  }
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw Error(ErrorCode::kStorageFailure, "rename into " + path.string() + " failed");
  }
}

ObjectStore::ObjectStore(fs::path root) : root_(std::move(root)) {
  std::error_code ec;
  fs::create_directories(root_, ec);
  if (ec) throw Error(ErrorCode::kStorageFailure, "cannot create " + root_.string());
}

fs::path ObjectStore::path_for(const std::string& ref) const {
  if (!is_sha256_hex(ref)) throw Error(ErrorCode::kInvalidArgument, "malformed object ref '" + ref + "'");
  return root_ / ref.substr(0, 2) / (ref + ".png");
}

std::string ObjectStore::put(std::span<const std::uint8_t> bytes) {
  std::string ref = sha256_hex(bytes);
  const auto path = path_for(ref);
  if (!fs::exists(path)) write_file_atomic(path, bytes);
  return ref;
}

Bytes ObjectStore::get(const std::string& ref) const {
  const auto path = path_for(ref);
  if (!fs::exists(path)) throw Error(ErrorCode::kNotFound, "no object " + ref);
  Bytes data = read_file(path);
  if (sha256_hex(data) != ref) throw Error(ErrorCode::kStorageFailure, "object " + ref + " is corrupt");
  return data;
}

bool ObjectStore::contains(const std::string& ref) const {
  return is_sha256_hex(ref) && fs::exists(path_for(ref));
}

}  // namespace adgen::store
