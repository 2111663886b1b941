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

#include "adgen/common/error.hpp"
#include "adgen/imaging/ops.hpp"

namespace adgen::imaging {

LayoutPlan plan_layout(const Rect& bbox, int canvas_width, int canvas_height,
                       const LayoutConfig& cfg) {
  cfg.validate();
  if (bbox.w < 1 || bbox.h < 1) throw Error(ErrorCode::kDegenerateScale, "empty bbox");

  const double s = std::min({cfg.max_fill_fraction * canvas_width / bbox.w,
                             cfg.max_fill_fraction * canvas_height / bbox.h,
                             cfg.max_upscale});
  if (!(s > 0.0) || !std::isfinite(s)) {
    throw Error(ErrorCode::kDegenerateScale, "non-positive layout scale");
  }

  LayoutPlan plan;
  plan.scale = s;
  plan.placed.w = std::clamp(static_cast<int>(std::lround(bbox.w * s)), 1, canvas_width);
  plan.placed.h = std::clamp(static_cast<int>(std::lround(bbox.h * s)), 1, canvas_height);

  const long left = std::lround(cfg.anchor_x * canvas_width - plan.placed.w / 2.0);
  const long top = std::lround(cfg.baseline_y * canvas_height - plan.placed.h);
  plan.placed.x = static_cast<int>(std::clamp(left, 0L, static_cast<long>(canvas_width - plan.placed.w)));
  plan.placed.y = static_cast<int>(std::clamp(top, 0L, static_cast<long>(canvas_height - plan.placed.h)));
  return plan;
}

LayoutResult layout_product(const RasterImage& image, const BitMask& mask,
                            const PlacementSpec& placement, const LayoutConfig& cfg) {
  placement.validate();
  if (mask.width() != image.width() || mask.height() != image.height()) {
    throw Error(ErrorCode::kDimensionMismatch, "mask does not match image");
  }
  const Rect bbox = bounding_box(mask);
  const LayoutPlan plan = plan_layout(bbox, placement.width, placement.height, cfg);

  const Rgba bg = cfg.background == Background::kWhite ? Rgba{255, 255, 255, 255} : Rgba{};
  RasterImage canvas(placement.width, placement.height, bg);
  BitMask canvas_mask(placement.width, placement.height);

  const RasterImage product = resize_bilinear(crop(image, bbox), plan.placed.w, plan.placed.h);
  const BitMask product_mask = resize_nearest(crop(mask, bbox), plan.placed.w, plan.placed.h);

  for (int y = 0; y < plan.placed.h; ++y) {
    for (int x = 0; x < plan.placed.w; ++x) {
      if (!product_mask.at(x, y)) continue;
      canvas.set(plan.placed.x + x, plan.placed.y + y, product.at(x, y));
      canvas_mask.set(plan.placed.x + x, plan.placed.y + y, true);
    }
  }
  return {std::move(canvas), std::move(canvas_mask), plan};
}

}  // namespace adgen::imaging
