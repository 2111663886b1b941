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

#include "adgen/common/error.hpp"
#include "adgen/imaging/ops.hpp"

namespace adgen::imaging {

RasterImage composite_product(const RasterImage& generated, const RasterImage& canvas,
                              const BitMask& canvas_mask) {
  if (generated.width() != canvas.width() || generated.height() != canvas.height() ||
      canvas_mask.width() != canvas.width() || canvas_mask.height() != canvas.height()) {
    throw Error(ErrorCode::kDimensionMismatch, "composite inputs differ in size");
  }
  RasterImage out = generated;
  auto dst = out.pixels();
  auto src = canvas.pixels();
  auto bits = canvas_mask.bits();
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (!bits[i]) continue;
    const std::size_t o = i * 4;
    std::copy_n(src.begin() + static_cast<std::ptrdiff_t>(o), 3,
                dst.begin() + static_cast<std::ptrdiff_t>(o));
    dst[o + 3] = 255;
  }
  return out;
}

}  // namespace adgen::imaging
