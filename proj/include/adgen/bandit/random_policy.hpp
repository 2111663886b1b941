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
#include <mutex>
#include <random>
#include <span>
#include <string>

namespace adgen::bandit {

/// Uniform pick for a single seed. Throws Error(kEmptyPool).
const std::string& random_policy(std::span<const std::string> eligible, std::uint64_t seed);

/// Control-group policy: a seeded stream of uniform picks. Thread-safe.
class RandomPolicy {
 public:
  explicit RandomPolicy(std::uint64_t seed) : rng_(seed) {}

  /// Throws Error(kEmptyPool).
  const std::string& choose(std::span<const std::string> eligible);

 private:
  std::mutex mu_;
  std::mt19937_64 rng_;
};

}  // namespace adgen::bandit
