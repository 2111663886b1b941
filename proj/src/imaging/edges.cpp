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
#include <vector>

#include "adgen/common/error.hpp"
#include "adgen/imaging/ops.hpp"

namespace adgen::imaging {

std::uint8_t luma(Rgba c) {
  return static_cast<std::uint8_t>(std::lround(0.299 * c.r + 0.587 * c.g + 0.114 * c.b));
}

EdgeMap compute_edges(const RasterImage& canvas) {
  const int w = canvas.width();
  const int h = canvas.height();
  std::vector<int> lum(canvas.pixel_count());
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) lum[static_cast<std::size_t>(y) * w + x] = luma(canvas.at(x, y));
  }
  auto L = [&](int x, int y) {
    x = std::clamp(x, 0, w - 1);
    y = std::clamp(y, 0, h - 1);
    return lum[static_cast<std::size_t>(y) * w + x];
  };

  EdgeMap edges(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const int gx = (L(x + 1, y - 1) + 2 * L(x + 1, y) + L(x + 1, y + 1)) -
                     (L(x - 1, y - 1) + 2 * L(x - 1, y) + L(x - 1, y + 1));
      const int gy = (L(x - 1, y + 1) + 2 * L(x, y + 1) + L(x + 1, y + 1)) -
                     (L(x - 1, y - 1) + 2 * L(x, y - 1) + L(x + 1, y - 1));
      const double mag = std::sqrt(static_cast<double>(gx * gx + gy * gy)) / 4.0;
      edges.magnitude[static_cast<std::size_t>(y) * w + x] =
          static_cast<std::uint8_t>(std::min(255L, std::lround(mag)));
    }
  }
  return edges;
}

EdgeMap compute_edges(const RasterImage& canvas, const BitMask& canvas_mask, bool reinforce) {
  if (canvas_mask.width() != canvas.width() || canvas_mask.height() != canvas.height()) {
    throw Error(ErrorCode::kDimensionMismatch, "edge mask does not match canvas");
  }
  EdgeMap edges = compute_edges(canvas);
  if (!reinforce) return edges;

  const int w = canvas.width();
  const int h = canvas.height();
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!canvas_mask.at(x, y)) continue;
      const bool boundary = x == 0 || y == 0 || x == w - 1 || y == h - 1 ||
                            !canvas_mask.at(x - 1, y) || !canvas_mask.at(x + 1, y) ||
                            !canvas_mask.at(x, y - 1) || !canvas_mask.at(x, y + 1);
      if (boundary) edges.magnitude[static_cast<std::size_t>(y) * w + x] = 255;
    }
  }
  return edges;
}

}  // namespace adgen::imaging
