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
#include <span>
#include <string>
#include <vector>

namespace adgen::imaging {

struct Rgba {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;
  std::uint8_t a = 0;

  bool operator==(const Rgba&) const = default;
};

/// 8-bit RGBA raster, row-major, four samples per pixel.
class RasterImage {
 public:
  static constexpr int kMaxDimension = 8192;

  RasterImage(int width, int height, Rgba fill = {});
  /// Takes ownership of `pixels`; size must be width * height * 4.
  RasterImage(int width, int height, std::vector<std::uint8_t> pixels);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t pixel_count() const noexcept {
    return static_cast<std::size_t>(width_) * static_cast<std::size_t>(height_);
  }

  std::span<const std::uint8_t> pixels() const noexcept { return pixels_; }
  std::span<std::uint8_t> pixels() noexcept { return pixels_; }

  Rgba at(int x, int y) const noexcept {
    const std::uint8_t* p = &pixels_[offset(x, y)];
    return {p[0], p[1], p[2], p[3]};
  }
  void set(int x, int y, Rgba c) noexcept {
    std::uint8_t* p = &pixels_[offset(x, y)];
    p[0] = c.r;
    p[1] = c.g;
    p[2] = c.b;
    p[3] = c.a;
  }

  bool operator==(const RasterImage&) const = default;

 private:
  std::size_t offset(int x, int y) const noexcept {
    return (static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
            static_cast<std::size_t>(x)) * 4;
  }

  int width_;
  int height_;
  std::vector<std::uint8_t> pixels_;
};

/// One flag per pixel; true marks a product pixel.
class BitMask {
 public:
  BitMask(int width, int height, bool fill = false);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }

  bool at(int x, int y) const noexcept { return bits_[index(x, y)] != 0; }
  void set(int x, int y, bool v) noexcept { bits_[index(x, y)] = v ? 1 : 0; }

  std::size_t count() const noexcept;
  bool any() const noexcept { return count() > 0; }

  std::span<const std::uint8_t> bits() const noexcept { return bits_; }

  bool operator==(const BitMask&) const = default;

 private:
  std::size_t index(int x, int y) const noexcept {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }

  int width_;
  int height_;
  std::vector<std::uint8_t> bits_;
};

struct Rect {
  int x = 0;
  int y = 0;
  int w = 0;
  int h = 0;

  int right() const noexcept { return x + w; }
  int bottom() const noexcept { return y + h; }
  bool operator==(const Rect&) const = default;
};

struct PlacementSpec {
  static constexpr int kMinDimension = 16;
  static constexpr int kMaxDimension = 4096;

  std::string placement_id;
  int width = 0;
  int height = 0;

  void validate() const;
};

enum class Background { kTransparent, kWhite };

struct LayoutConfig {
  double max_fill_fraction = 0.6;  // (0, 1]
  double anchor_x = 0.5;           // bbox center, fraction of canvas width
  double baseline_y = 0.7;         // bbox bottom, fraction of canvas height
  double max_upscale = 2.0;        // >= 1
  Background background = Background::kTransparent;

  void validate() const;
};

struct EdgeMap {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> magnitude;

  EdgeMap() = default;
  EdgeMap(int w, int h) : width(w), height(h), magnitude(static_cast<std::size_t>(w) * h, 0) {}

  std::uint8_t at(int x, int y) const noexcept {
    return magnitude[static_cast<std::size_t>(y) * width + x];
  }
  bool operator==(const EdgeMap&) const = default;
};

struct BucketId {
  int index = 0;
  int canonical_width = 512;
  int canonical_height = 512;

  bool operator==(const BucketId&) const = default;
};

struct BucketConfig {
  double log2_step = 0.2;
  int canonical_height = 512;
  int min_width = 256;
  int max_width = 1024;
};

}  // namespace adgen::imaging
