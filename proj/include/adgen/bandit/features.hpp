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

#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace adgen::bandit {

struct NumericFeature {
  std::string name;
  double min = 0.0;
  double max = 1.0;

  bool operator==(const NumericFeature&) const = default;
};

/// Fixed layout of a context vector:
///
///   [0]                       constant 1.0
///   [category block]          one-hot product category
///   [bucket block]            one-hot aspect bucket, clamped to [bucket_min, bucket_max]
///   [numeric block]           min-max scaled numeric features, clipped to [0, 1]
///   [hashed block]            user / item key=value tokens, FNV-1a hashed, additive
///
/// The layout is frozen when a model is created; changing it invalidates
/// every trained arm.
struct FeatureSpec {
  int dimension = 32;
  std::vector<std::string> categories;
  int bucket_min = -5;
  int bucket_max = 5;
  std::vector<NumericFeature> numeric;

  int category_offset() const { return 1; }
  int bucket_offset() const { return category_offset() + static_cast<int>(categories.size()); }
  int numeric_offset() const { return bucket_offset() + (bucket_max - bucket_min + 1); }
  int hashed_offset() const { return numeric_offset() + static_cast<int>(numeric.size()); }
  int hashed_slots() const { return dimension - hashed_offset(); }

  /// Throws Error(kInvalidArgument) unless at least one hashed slot remains.
  void validate() const;

  /// Upper bound on ||x||_2 for a context built from `hashed_tokens`
  /// user/item tokens (worst case: every token lands in the same slot).
  double norm_bound(std::size_t hashed_tokens) const;

  bool operator==(const FeatureSpec&) const = default;
};

FeatureSpec default_feature_spec();

using FeatureMap = std::map<std::string, std::string>;

struct ItemFeatures {
  std::string category;
  FeatureMap attributes;
};

/// Dense context; component 0 is always 1.0.
struct ContextVector {
  std::vector<double> values;

  std::size_t size() const noexcept { return values.size(); }
  double operator[](std::size_t i) const noexcept { return values[i]; }
  bool operator==(const ContextVector&) const = default;
};

/// Index the hashed block assigns to a token such as "u:country=hu".
int hashed_index(const FeatureSpec& spec, std::string_view token);

/// Deterministic encoding of user, item and placement features. An unknown
/// category leaves its block at zero (logged, not an error).
ContextVector build_context(const FeatureMap& user, const ItemFeatures& item, int bucket_index,
                            const FeatureSpec& spec);

}  // namespace adgen::bandit
