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
#include <cstdlib>
#include <utility>
#include <vector>

#include "adgen/common/error.hpp"
#include "adgen/imaging/ops.hpp"

namespace adgen::imaging {
namespace {

int channel_distance(Rgba a, Rgba b) {
  return std::max({std::abs(a.r - b.r), std::abs(a.g - b.g), std::abs(a.b - b.b)});
}

bool has_transparency(const RasterImage& image) {
  auto px = image.pixels();
  for (std::size_t i = 3; i < px.size(); i += 4) {
    if (px[i] < 255) return true;
  }
  return false;
}

// Marks every pixel 4-connected to (sx, sy) through pixels within
// `tolerance` of the seed color.
void flood_background(const RasterImage& image, int sx, int sy, int tolerance,
                      std::vector<std::uint8_t>& background) {
  const int w = image.width();
  const int h = image.height();
  const Rgba seed = image.at(sx, sy);
  std::vector<std::uint8_t> visited(background.size(), 0);
  std::vector<std::pair<int, int>> stack;
  stack.emplace_back(sx, sy);
  visited[static_cast<std::size_t>(sy) * w + sx] = 1;

  while (!stack.empty()) {
    auto [x, y] = stack.back();
    stack.pop_back();
    if (channel_distance(image.at(x, y), seed) > tolerance) continue;
    background[static_cast<std::size_t>(y) * w + x] = 1;

    const int nx[4] = {x - 1, x + 1, x, x};
    const int ny[4] = {y, y, y - 1, y + 1};
    for (int k = 0; k < 4; ++k) {
      if (nx[k] < 0 || ny[k] < 0 || nx[k] >= w || ny[k] >= h) continue;
      auto idx = static_cast<std::size_t>(ny[k]) * w + nx[k];
      if (visited[idx]) continue;
      visited[idx] = 1;
      stack.emplace_back(nx[k], ny[k]);
    }
  }
}

}  // namespace

MaskResult extract_mask(const RasterImage& image, int tolerance) {
  const int w = image.width();
  const int h = image.height();
  BitMask mask(w, h);

  if (has_transparency(image)) {
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) mask.set(x, y, image.at(x, y).a >= 128);
    }
  } else {
    std::vector<std::uint8_t> background(image.pixel_count(), 0);
    const std::pair<int, int> corners[4] = {{0, 0}, {w - 1, 0}, {0, h - 1}, {w - 1, h - 1}};
    for (auto [cx, cy] : corners) flood_background(image, cx, cy, tolerance, background);
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        mask.set(x, y, background[static_cast<std::size_t>(y) * w + x] == 0);
      }
    }
  }

  Rect bbox = bounding_box(mask);  // throws kEmptyMask
  return {std::move(mask), bbox};
}

Rect bounding_box(const BitMask& mask) {
  int min_x = mask.width(), min_y = mask.height(), max_x = -1, max_y = -1;
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) {
      if (!mask.at(x, y)) continue;
      min_x = std::min(min_x, x);
      max_x = std::max(max_x, x);
      min_y = std::min(min_y, y);
      max_y = std::max(max_y, y);
    }
  }
  if (max_x < 0) throw Error(ErrorCode::kEmptyMask, "no product pixel found");
  return {min_x, min_y, max_x - min_x + 1, max_y - min_y + 1};
}

}  // namespace adgen::imaging
