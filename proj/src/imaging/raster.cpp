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
#include <string>

#include "adgen/common/error.hpp"
#include "adgen/imaging/ops.hpp"
#include "adgen/imaging/types.hpp"

namespace adgen::imaging {
namespace {

void check_dims(int width, int height) {
  if (width < 1 || height < 1 || width > RasterImage::kMaxDimension ||
      height > RasterImage::kMaxDimension) {
    throw Error(ErrorCode::kInvalidArgument,
                "image dimensions out of range: " + std::to_string(width) + "x" +
                    std::to_string(height));
  }
}

}  // namespace

RasterImage::RasterImage(int width, int height, Rgba fill) : width_(width), height_(height) {
  check_dims(width, height);
  pixels_.resize(pixel_count() * 4);
  for (std::size_t i = 0; i < pixels_.size(); i += 4) {
    pixels_[i] = fill.r;
    pixels_[i + 1] = fill.g;
    pixels_[i + 2] = fill.b;
    pixels_[i + 3] = fill.a;
  }
}

RasterImage::RasterImage(int width, int height, std::vector<std::uint8_t> pixels)
    : width_(width), height_(height), pixels_(std::move(pixels)) {
  check_dims(width, height);
  if (pixels_.size() != pixel_count() * 4) {
    throw Error(ErrorCode::kInvalidArgument, "pixel buffer size does not match dimensions");
  }
}

BitMask::BitMask(int width, int height, bool fill) : width_(width), height_(height) {
  check_dims(width, height);
  bits_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height),
               fill ? 1 : 0);
}

std::size_t BitMask::count() const noexcept {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

void PlacementSpec::validate() const {
  if (width < kMinDimension || width > kMaxDimension || height < kMinDimension ||
      height > kMaxDimension) {
    throw Error(ErrorCode::kInvalidArgument,
                "placement '" + placement_id + "' dimensions out of [16, 4096]");
  }
}

void LayoutConfig::validate() const {
  auto fail = [](const char* what) { throw Error(ErrorCode::kInvalidArgument, what); };
  if (!(max_fill_fraction > 0.0 && max_fill_fraction <= 1.0)) fail("max_fill_fraction not in (0, 1]");
  if (!(anchor_x >= 0.0 && anchor_x <= 1.0)) fail("anchor_x not in [0, 1]");
  if (!(baseline_y >= 0.0 && baseline_y <= 1.0)) fail("baseline_y not in [0, 1]");
  if (!(max_upscale >= 1.0) || !std::isfinite(max_upscale)) fail("max_upscale must be >= 1");
}

RasterImage crop(const RasterImage& image, const Rect& r) {
  if (r.x < 0 || r.y < 0 || r.w < 1 || r.h < 1 || r.right() > image.width() ||
      r.bottom() > image.height()) {
    throw Error(ErrorCode::kInvalidArgument, "crop rectangle outside image");
  }
  std::vector<std::uint8_t> out(static_cast<std::size_t>(r.w) * r.h * 4);
  auto src = image.pixels();
  for (int y = 0; y < r.h; ++y) {
    auto from = src.begin() + ((static_cast<std::ptrdiff_t>(r.y + y) * image.width() + r.x) * 4);
    std::copy(from, from + r.w * 4, out.begin() + static_cast<std::ptrdiff_t>(y) * r.w * 4);
  }
  return RasterImage(r.w, r.h, std::move(out));
}

BitMask crop(const BitMask& mask, const Rect& r) {
  if (r.x < 0 || r.y < 0 || r.w < 1 || r.h < 1 || r.right() > mask.width() ||
      r.bottom() > mask.height()) {
    throw Error(ErrorCode::kInvalidArgument, "crop rectangle outside mask");
  }
  BitMask out(r.w, r.h);
  for (int y = 0; y < r.h; ++y) {
    for (int x = 0; x < r.w; ++x) out.set(x, y, mask.at(r.x + x, r.y + y));
  }
  return out;
}

RasterImage resize_bilinear(const RasterImage& image, int width, int height) {
  if (width == image.width() && height == image.height()) return image;
  RasterImage out(width, height);
  const int sw = image.width();
  const int sh = image.height();
  const double kx = static_cast<double>(sw) / width;
  const double ky = static_cast<double>(sh) / height;
  auto src = image.pixels();
  auto dst = out.pixels();

  for (int dy = 0; dy < height; ++dy) {
    double fy = std::clamp((dy + 0.5) * ky - 0.5, 0.0, static_cast<double>(sh - 1));
    int y0 = static_cast<int>(fy);
    int y1 = std::min(y0 + 1, sh - 1);
    double ty = fy - y0;
    for (int dx = 0; dx < width; ++dx) {
      double fx = std::clamp((dx + 0.5) * kx - 0.5, 0.0, static_cast<double>(sw - 1));
      int x0 = static_cast<int>(fx);
      int x1 = std::min(x0 + 1, sw - 1);
      double tx = fx - x0;

      const double w00 = (1 - tx) * (1 - ty);
      const double w10 = tx * (1 - ty);
      const double w01 = (1 - tx) * ty;
      const double w11 = tx * ty;
      const std::uint8_t* p00 = &src[(static_cast<std::size_t>(y0) * sw + x0) * 4];
      const std::uint8_t* p10 = &src[(static_cast<std::size_t>(y0) * sw + x1) * 4];
      const std::uint8_t* p01 = &src[(static_cast<std::size_t>(y1) * sw + x0) * 4];
      const std::uint8_t* p11 = &src[(static_cast<std::size_t>(y1) * sw + x1) * 4];

      double alpha = w00 * p00[3] + w10 * p10[3] + w01 * p01[3] + w11 * p11[3];
      std::uint8_t* o = &dst[(static_cast<std::size_t>(dy) * width + dx) * 4];
      for (int c = 0; c < 3; ++c) {
        double premul = w00 * p00[c] * p00[3] + w10 * p10[c] * p10[3] +
                        w01 * p01[c] * p01[3] + w11 * p11[c] * p11[3];
        double v = alpha > 0.0 ? premul / alpha : 0.0;
        o[c] = static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
      }
      o[3] = static_cast<std::uint8_t>(std::clamp(std::lround(alpha), 0L, 255L));
    }
  }
  return out;
}

BitMask resize_nearest(const BitMask& mask, int width, int height) {
  if (width == mask.width() && height == mask.height()) return mask;
  BitMask out(width, height);
  const double kx = static_cast<double>(mask.width()) / width;
  const double ky = static_cast<double>(mask.height()) / height;
  for (int dy = 0; dy < height; ++dy) {
    int sy = std::min(static_cast<int>((dy + 0.5) * ky), mask.height() - 1);
    for (int dx = 0; dx < width; ++dx) {
      int sx = std::min(static_cast<int>((dx + 0.5) * kx), mask.width() - 1);
      out.set(dx, dy, mask.at(sx, sy));
    }
  }
  return out;
}

}  // namespace adgen::imaging
