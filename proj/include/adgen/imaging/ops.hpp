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

// Pure image operations for the background generation pipeline:
// masking, layout, edge extraction, cut-back compositing and aspect-ratio
// bucketing. Nothing here keeps state; every function is safe to call from
// any thread.

#pragma once

#include <cstdint>

#include "adgen/imaging/types.hpp"

namespace adgen::imaging {

struct MaskResult {
  BitMask mask;
  Rect bbox;
};

/// Separates the product from its background.
///
/// If any pixel has alpha < 255 the alpha channel decides (alpha >= 128 is
/// product). Otherwise each corner pixel seeds a 4-connected flood fill over
/// pixels whose max per-channel RGB distance to that corner's color is at
/// most `tolerance`; everything not reached is product.
///
/// Throws Error(kEmptyMask) when no product pixel remains.
MaskResult extract_mask(const RasterImage& image, int tolerance = 12);

/// Pluggable detector interface; HeuristicMasker wraps extract_mask.
class Masker {
 public:
  virtual ~Masker() = default;
  virtual MaskResult detect(const RasterImage& image) const = 0;
};

class HeuristicMasker final : public Masker {
 public:
  explicit HeuristicMasker(int tolerance = 12) : tolerance_(tolerance) {}
  MaskResult detect(const RasterImage& image) const override {
    return extract_mask(image, tolerance_);
  }

 private:
  int tolerance_;
};

/// Tightest rectangle containing every true bit. Throws kEmptyMask.
Rect bounding_box(const BitMask& mask);

struct LayoutPlan {
  double scale = 0.0;
  Rect placed;  // scaled bbox position on the canvas
};

/// Scale and position of a product bbox on a canvas, without touching pixels.
LayoutPlan plan_layout(const Rect& bbox, int canvas_width, int canvas_height,
                       const LayoutConfig& cfg);

struct LayoutResult {
  RasterImage canvas;
  BitMask canvas_mask;
  LayoutPlan plan;
};

/// Crops the product bbox, rescales it (bilinear for pixels, nearest for the
/// mask) and places it on a placement-sized canvas. Pixels outside the
/// scaled mask get cfg.background.
LayoutResult layout_product(const RasterImage& image, const BitMask& mask,
                            const PlacementSpec& placement, const LayoutConfig& cfg);

std::uint8_t luma(Rgba c);

/// Sobel magnitude on luma, replicate padding, m = min(255, round(|G| / 4)).
EdgeMap compute_edges(const RasterImage& canvas);

/// Same as above; with `reinforce` every mask boundary pixel is forced to 255.
EdgeMap compute_edges(const RasterImage& canvas, const BitMask& canvas_mask,
                      bool reinforce);

/// Cut-back: canvas pixels (alpha forced to 255) under the mask, generated
/// pixels elsewhere. The product bytes are copied verbatim.
RasterImage composite_product(const RasterImage& generated, const RasterImage& canvas,
                              const BitMask& canvas_mask);

BucketId aspect_bucket(const PlacementSpec& placement, const BucketConfig& cfg = {});
/// Canonical dimensions of a bucket index; aspect_bucket delegates here.
BucketId bucket_from_index(int index, const BucketConfig& cfg = {});

/// Bilinear resample on premultiplied alpha. Identity when sizes match.
RasterImage resize_bilinear(const RasterImage& image, int width, int height);
BitMask resize_nearest(const BitMask& mask, int width, int height);

RasterImage crop(const RasterImage& image, const Rect& r);
BitMask crop(const BitMask& mask, const Rect& r);

}  // namespace adgen::imaging
