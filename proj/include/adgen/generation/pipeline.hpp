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
#include <optional>
#include <string>

#include "adgen/generation/backend.hpp"
#include "adgen/generation/prompt.hpp"
#include "adgen/imaging/ops.hpp"
#include "adgen/store/mask_cache.hpp"

namespace adgen::generation {

struct PipelineConfig {
  imaging::LayoutConfig layout;
  imaging::BucketConfig bucket;
  bool reinforce_edges = true;
  bool condition_on_product = true;
};

/// Everything produced at the bucket's canonical dimensions.
struct CanonicalCreative {
  imaging::BucketId bucket;
  imaging::RasterImage canvas{1, 1};
  imaging::BitMask canvas_mask{1, 1};
  imaging::EdgeMap edges;
  imaging::RasterImage generated{1, 1};
  imaging::RasterImage composite{1, 1};
  std::string backend_id;
};

/// Steps layout -> edges -> backend -> cut-back at canonical dims.
/// Throws on backend failure or a response of the wrong size.
CanonicalCreative generate_canonical(const imaging::RasterImage& product,
                                     const imaging::MaskResult& mask, const Prompt& prompt,
                                     const imaging::BucketId& bucket, const PipelineConfig& cfg,
                                     GenerationBackend& backend, std::uint64_t seed);

struct PipelineResult {
  CanonicalCreative canonical;
  imaging::RasterImage creative{1, 1};  // exact placement dims
};

/// Full pipeline: masking (when `mask` is absent), canonical generation and
/// the final bilinear resize to the placement.
PipelineResult run_pipeline(const imaging::RasterImage& product,
                            const std::optional<imaging::BitMask>& mask, const Prompt& prompt,
                            const imaging::PlacementSpec& placement, const PipelineConfig& cfg,
                            GenerationBackend& backend, std::uint64_t seed);

/// Mask for an image, through the cache when one is given.
imaging::MaskResult obtain_mask(const std::string& image_hash, const imaging::RasterImage& product,
                                const imaging::Masker& masker, store::MaskCache* cache);

}  // namespace adgen::generation
