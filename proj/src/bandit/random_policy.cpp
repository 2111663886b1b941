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

#include "adgen/bandit/random_policy.hpp"

#include "adgen/common/error.hpp"

namespace adgen::bandit {

const std::string& random_policy(std::span<const std::string> eligible, std::uint64_t seed) {
  if (eligible.empty()) throw Error(ErrorCode::kEmptyPool, "no eligible prompts");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, eligible.size() - 1);
  return eligible[pick(rng)];
}

const std::string& RandomPolicy::choose(std::span<const std::string> eligible) {
  if (eligible.empty()) throw Error(ErrorCode::kEmptyPool, "no eligible prompts");
  std::uniform_int_distribution<std::size_t> pick(0, eligible.size() - 1);
  std::lock_guard lock(mu_);
  return eligible[pick(rng_)];
}

}  // namespace adgen::bandit
