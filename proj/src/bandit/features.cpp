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

#include "adgen/bandit/features.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <charconv>
#include <cmath>

#include "adgen/common/error.hpp"
#include "adgen/common/hash.hpp"

namespace adgen::bandit {

void FeatureSpec::validate() const {
  if (bucket_max < bucket_min) {
    throw Error(ErrorCode::kInvalidArgument, "bucket_max < bucket_min");
  }
  for (const auto& f : numeric) {
    if (!(f.max > f.min)) {
      throw Error(ErrorCode::kInvalidArgument, "numeric feature '" + f.name + "' has empty range");
    }
  }
  if (hashed_slots() < 1) {
    throw Error(ErrorCode::kInvalidArgument,
                "dimension " + std::to_string(dimension) + " leaves no hashed slots");
  }
}

double FeatureSpec::norm_bound(std::size_t hashed_tokens) const {
  const double n = static_cast<double>(hashed_tokens);
  return std::sqrt(3.0 + static_cast<double>(numeric.size()) + n * n);
}

FeatureSpec default_feature_spec() {
  FeatureSpec spec;
  spec.categories = {"apparel", "footwear", "accessories", "home"};
  return spec;
}

int hashed_index(const FeatureSpec& spec, std::string_view token) {
  const auto slots = static_cast<std::uint64_t>(spec.hashed_slots());
  return spec.hashed_offset() + static_cast<int>(fnv1a64(token) % slots);
}

namespace {

bool parse_double(const std::string& text, double& out) {
  const char* begin = text.data();
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc() && ptr == end && std::isfinite(out);
}

}  // namespace

ContextVector build_context(const FeatureMap& user, const ItemFeatures& item, int bucket_index,
                            const FeatureSpec& spec) {
  spec.validate();
  ContextVector x;
  x.values.assign(static_cast<std::size_t>(spec.dimension), 0.0);
  x.values[0] = 1.0;

  auto cat = std::find(spec.categories.begin(), spec.categories.end(), item.category);
  if (cat != spec.categories.end()) {
    x.values[static_cast<std::size_t>(spec.category_offset() + (cat - spec.categories.begin()))] = 1.0;
  } else {
    spdlog::warn("unknown product category '{}', category block left empty", item.category);
  }

  const int bucket = std::clamp(bucket_index, spec.bucket_min, spec.bucket_max);
  x.values[static_cast<std::size_t>(spec.bucket_offset() + bucket - spec.bucket_min)] = 1.0;

  for (const auto& [key, value] : user) {
    auto num = std::find_if(spec.numeric.begin(), spec.numeric.end(),
                            [&](const NumericFeature& f) { return f.name == key; });
    if (num != spec.numeric.end()) {
      double v = 0.0;
      if (!parse_double(value, v)) {
        spdlog::warn("numeric feature '{}' has non-numeric value '{}'", key, value);
        continue;
      }
      const double scaled = std::clamp((v - num->min) / (num->max - num->min), 0.0, 1.0);
      x.values[static_cast<std::size_t>(spec.numeric_offset() + (num - spec.numeric.begin()))] = scaled;
      continue;
    }
    x.values[static_cast<std::size_t>(hashed_index(spec, "u:" + key + "=" + value))] += 1.0;
  }
  for (const auto& [key, value] : item.attributes) {
    x.values[static_cast<std::size_t>(hashed_index(spec, "i:" + key + "=" + value))] += 1.0;
  }
  return x;
}

}  // namespace adgen::bandit
