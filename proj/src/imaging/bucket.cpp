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

#include <algorithm>
#include <cmath>

#include "adgen/imaging/ops.hpp"

namespace adgen::imaging {

// Placements whose log2 aspect ratios round to the same step share one
// generation at canonical dims; diffusion backends need sides divisible by 8.
BucketId aspect_bucket(const PlacementSpec& placement, const BucketConfig& cfg) {
  placement.validate();
  const double ratio = static_cast<double>(placement.width) / placement.height;
  return bucket_from_index(static_cast<int>(std::lround(std::log2(ratio) / cfg.log2_step)), cfg);
}

BucketId bucket_from_index(int index, const BucketConfig& cfg) {
  BucketId id;
  id.index = index;
  id.canonical_height = cfg.canonical_height;
  const double raw = cfg.canonical_height * std::exp2(index * cfg.log2_step);
  const long rounded = std::lround(raw / 8.0) * 8;
  id.canonical_width = static_cast<int>(
      std::clamp(rounded, static_cast<long>(cfg.min_width), static_cast<long>(cfg.max_width)));
  return id;
}

}  // namespace adgen::imaging
