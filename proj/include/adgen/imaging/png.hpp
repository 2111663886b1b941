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

#include <span>

#include "adgen/common/hash.hpp"
#include "adgen/imaging/types.hpp"

namespace adgen::imaging {

/// RGBA 8-bit PNG. Output bytes are a pure function of the pixels.
Bytes encode_png(const RasterImage& image);

/// Accepts any PNG color type; converts to RGBA 8-bit.
/// Throws Error(kImageDecode) on malformed data or oversize images.
RasterImage decode_png(std::span<const std::uint8_t> data);

/// Single-channel PNG, 0 or 255 per pixel.
Bytes encode_mask_png(const BitMask& mask);
/// Gray >= 128 reads as true.
BitMask decode_mask_png(std::span<const std::uint8_t> data);

Bytes encode_edges_png(const EdgeMap& edges);
EdgeMap decode_edges_png(std::span<const std::uint8_t> data);

}  // namespace adgen::imaging
