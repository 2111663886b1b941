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

#include "adgen/generation/pipeline.hpp"

#include "adgen/common/error.hpp"

namespace adgen::generation {

CanonicalCreative generate_canonical(const imaging::RasterImage& product,
                                     const imaging::MaskResult& mask, const Prompt& prompt,
                                     const imaging::BucketId& bucket, const PipelineConfig& cfg,
                                     GenerationBackend& backend, std::uint64_t seed) {
  CanonicalCreative out;
  out.bucket = bucket;
  const imaging::PlacementSpec canonical{"canonical", bucket.canonical_width, bucket.canonical_height};
  auto laid = imaging::layout_product(product, mask.mask, canonical, cfg.layout);
  out.canvas = std::move(laid.canvas);
  out.canvas_mask = std::move(laid.canvas_mask);
  out.edges = imaging::compute_edges(out.canvas, out.canvas_mask, cfg.reinforce_edges);

  BackendRequest req;
  req.prompt = prompt.text;
  req.width = canonical.width;
  req.height = canonical.height;
  req.seed = seed;
  req.edges = out.edges;
  req.mask = out.canvas_mask;
  if (cfg.condition_on_product) req.condition_image = out.canvas;

  auto resp = backend.generate(req);
  if (resp.image.width() != req.width || resp.image.height() != req.height) {
    throw Error(ErrorCode::kDimensionMismatch, "backend " + backend.id() + " returned wrong size");
  }
  out.backend_id = resp.backend_id;
  out.generated = std::move(resp.image);
  out.composite = imaging::composite_product(out.generated, out.canvas, out.canvas_mask);
  return out;
}

PipelineResult run_pipeline(const imaging::RasterImage& product,
                            const std::optional<imaging::BitMask>& mask, const Prompt& prompt,
                            const imaging::PlacementSpec& placement, const PipelineConfig& cfg,
                            GenerationBackend& backend, std::uint64_t seed) {
  placement.validate();
  auto m = [&]() -> imaging::MaskResult {
    if (!mask) return imaging::extract_mask(product);
    if (mask->width() != product.width() || mask->height() != product.height()) {
      throw Error(ErrorCode::kDimensionMismatch, "mask size differs from product image");
    }
    return {*mask, imaging::bounding_box(*mask)};
  }();
  const auto bucket = imaging::aspect_bucket(placement, cfg.bucket);
  PipelineResult out;
  out.canonical = generate_canonical(product, m, prompt, bucket, cfg, backend, seed);
  out.creative = imaging::resize_bilinear(out.canonical.composite, placement.width, placement.height);
  return out;
}

imaging::MaskResult obtain_mask(const std::string& image_hash, const imaging::RasterImage& product,
                                const imaging::Masker& masker, store::MaskCache* cache) {
  if (cache) {
    if (auto hit = cache->get(image_hash)) {
      if (hit->mask.width() == product.width() && hit->mask.height() == product.height()) return *hit;
    }
  }
  auto m = masker.detect(product);
  if (cache) cache->put(image_hash, m);
  return m;
}

}  // namespace adgen::generation
