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

#include "adgen/generation/mock_backend.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>

#include "adgen/common/hash.hpp"

namespace adgen::generation {

namespace {

constexpr int kCoarseCell = 64;
constexpr int kFineCell = 32;
constexpr double kEdgeDarkening = 0.3;
constexpr double kConditionBlend = 0.3;

struct Rgb {
  double r, g, b;
};

double lattice(std::uint64_t seed, std::int64_t ix, std::int64_t iy, std::uint64_t octave) {
  const std::uint64_t h = mix64(seed ^ mix64(static_cast<std::uint64_t>(ix) * 0x9E3779B97F4A7C15ULL ^
                                             static_cast<std::uint64_t>(iy) * 0xC2B2AE3D27D4EB4FULL ^
                                             octave));
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

double smooth(double t) { return t * t * (3.0 - 2.0 * t); }

double value_noise(std::uint64_t seed, double x, double y, int cell, std::uint64_t octave) {
  const double fx = x / cell;
  const double fy = y / cell;
  const auto ix = static_cast<std::int64_t>(std::floor(fx));
  const auto iy = static_cast<std::int64_t>(std::floor(fy));
  const double tx = smooth(fx - static_cast<double>(ix));
  const double ty = smooth(fy - static_cast<double>(iy));
  const double v00 = lattice(seed, ix, iy, octave);
  const double v10 = lattice(seed, ix + 1, iy, octave);
  const double v01 = lattice(seed, ix, iy + 1, octave);
  const double v11 = lattice(seed, ix + 1, iy + 1, octave);
  const double top = v00 + (v10 - v00) * tx;
  const double bottom = v01 + (v11 - v01) * tx;
  return top + (bottom - top) * ty;
}

std::array<Rgb, 3> palette_for(const std::string& prompt) {
  const std::uint64_t h = stable_hash64(prompt);
  std::array<Rgb, 3> out{};
  for (std::uint64_t i = 0; i < 3; ++i) {
    const std::uint64_t c = mix64(h + i);
    out[i] = {static_cast<double>(c & 0xff), static_cast<double>((c >> 8) & 0xff),
              static_cast<double>((c >> 16) & 0xff)};
  }
  return out;
}

Rgb lerp(const Rgb& a, const Rgb& b, double t) {
  return {a.r + (b.r - a.r) * t, a.g + (b.g - a.g) * t, a.b + (b.b - a.b) * t};
}

std::uint8_t to_byte(double v) {
  return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 255.0)));
}

}  // namespace

BackendResponse mock_generate(const BackendRequest& request) {
  request.validate();
  const auto start = std::chrono::steady_clock::now();
  const auto palette = palette_for(request.prompt);

  std::optional<Rgb> pull;
  if (request.condition_image) {
    double r = 0, g = 0, b = 0;
    std::size_t n = 0;
    for (int y = 0; y < request.height; ++y) {
      for (int x = 0; x < request.width; ++x) {
        if (!request.mask.at(x, y)) continue;
        const auto c = request.condition_image->at(x, y);
        r += c.r;
        g += c.g;
        b += c.b;
        ++n;
      }
    }
    if (n > 0) pull = Rgb{r / n, g / n, b / n};
  }

  imaging::RasterImage out(request.width, request.height);
  for (int y = 0; y < request.height; ++y) {
    for (int x = 0; x < request.width; ++x) {
      const double n0 = value_noise(request.seed, x, y, kCoarseCell, 0);
      const double n1 = value_noise(request.seed, x, y, kFineCell, 1);
      const double t = (n0 + 0.5 * n1) / 1.5;
      Rgb c = t < 0.5 ? lerp(palette[0], palette[1], t * 2.0) : lerp(palette[1], palette[2], t * 2.0 - 1.0);

      const double dark = 1.0 - kEdgeDarkening * request.edges.at(x, y) / 255.0;
      c = {c.r * dark, c.g * dark, c.b * dark};
      if (pull) c = lerp(c, *pull, kConditionBlend);
      out.set(x, y, {to_byte(c.r), to_byte(c.g), to_byte(c.b), 255});
    }
  }

  BackendResponse resp;
  resp.image = std::move(out);
  resp.backend_id = "mock";
  resp.latency_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return resp;
}

}  // namespace adgen::generation
