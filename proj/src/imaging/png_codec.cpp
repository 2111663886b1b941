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

#include <png.h>

#include <cstring>
#include <string>
#include <vector>

#include "adgen/common/error.hpp"
#include "adgen/imaging/png.hpp"

namespace adgen::imaging {
namespace {

// RAII guard for the simplified libpng API.
struct PngImage {
  png_image image;
  PngImage() {
    std::memset(&image, 0, sizeof(image));
    image.version = PNG_IMAGE_VERSION;
  }
  ~PngImage() { png_image_free(&image); }
  PngImage(const PngImage&) = delete;
  PngImage& operator=(const PngImage&) = delete;
};

Bytes write_png(int width, int height, png_uint_32 format, const std::uint8_t* buffer) {
  PngImage png;
  png.image.width = static_cast<png_uint_32>(width);
  png.image.height = static_cast<png_uint_32>(height);
  png.image.format = format;

  png_alloc_size_t size = 0;
  if (!png_image_write_to_memory(&png.image, nullptr, &size, 0, buffer, 0, nullptr)) {
    throw Error(ErrorCode::kImageDecode, std::string("png encode: ") + png.image.message);
  }
  Bytes out(size);
  if (!png_image_write_to_memory(&png.image, out.data(), &size, 0, buffer, 0, nullptr)) {
    throw Error(ErrorCode::kImageDecode, std::string("png encode: ") + png.image.message);
  }
  out.resize(size);
  return out;
}

std::vector<std::uint8_t> read_png(std::span<const std::uint8_t> data, png_uint_32 format,
                                   int& width, int& height) {
  PngImage png;
  if (data.empty() || !png_image_begin_read_from_memory(&png.image, data.data(), data.size())) {
    throw Error(ErrorCode::kImageDecode,
                std::string("png decode: ") + (data.empty() ? "empty input" : png.image.message));
  }
  if (png.image.width < 1 || png.image.height < 1 ||
      png.image.width > static_cast<png_uint_32>(RasterImage::kMaxDimension) ||
      png.image.height > static_cast<png_uint_32>(RasterImage::kMaxDimension)) {
    throw Error(ErrorCode::kImageDecode, "png dimensions out of range");
  }
  png.image.format = format;
  std::vector<std::uint8_t> buffer(PNG_IMAGE_SIZE(png.image));
  if (!png_image_finish_read(&png.image, nullptr, buffer.data(), 0, nullptr)) {
    throw Error(ErrorCode::kImageDecode, std::string("png decode: ") + png.image.message);
  }
  width = static_cast<int>(png.image.width);
  height = static_cast<int>(png.image.height);
  return buffer;
}

}  // namespace

Bytes encode_png(const RasterImage& image) {
  return write_png(image.width(), image.height(), PNG_FORMAT_RGBA, image.pixels().data());
}

RasterImage decode_png(std::span<const std::uint8_t> data) {
  int w = 0, h = 0;
  auto pixels = read_png(data, PNG_FORMAT_RGBA, w, h);
  return RasterImage(w, h, std::move(pixels));
}

Bytes encode_mask_png(const BitMask& mask) {
  std::vector<std::uint8_t> gray(mask.bits().size());
  for (std::size_t i = 0; i < gray.size(); ++i) gray[i] = mask.bits()[i] ? 255 : 0;
  return write_png(mask.width(), mask.height(), PNG_FORMAT_GRAY, gray.data());
}

BitMask decode_mask_png(std::span<const std::uint8_t> data) {
  int w = 0, h = 0;
  auto gray = read_png(data, PNG_FORMAT_GRAY, w, h);
  BitMask mask(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) mask.set(x, y, gray[static_cast<std::size_t>(y) * w + x] >= 128);
  }
  return mask;
}

Bytes encode_edges_png(const EdgeMap& edges) {
  if (edges.magnitude.size() != static_cast<std::size_t>(edges.width) * edges.height) {
    throw Error(ErrorCode::kDimensionMismatch, "edge map buffer size");
  }
  return write_png(edges.width, edges.height, PNG_FORMAT_GRAY, edges.magnitude.data());
}

EdgeMap decode_edges_png(std::span<const std::uint8_t> data) {
  EdgeMap edges;
  edges.magnitude = read_png(data, PNG_FORMAT_GRAY, edges.width, edges.height);
  return edges;
}

}  // namespace adgen::imaging
