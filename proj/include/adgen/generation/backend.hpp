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
#include <optional>
#include <string>

#include "adgen/imaging/types.hpp"
#include "json.hpp"

namespace adgen::generation {

/// What a generation backend receives. All rasters share width x height.
struct BackendRequest {
  std::string prompt;
  int width = 0;
  int height = 0;
  std::uint64_t seed = 0;
  imaging::EdgeMap edges;
  std::optional<imaging::RasterImage> condition_image;  // the canvas with the product
  imaging::BitMask mask{1, 1};

  /// Throws Error(kInvalidArgument).
  void validate() const;
};

struct BackendResponse {
  imaging::RasterImage image{1, 1};
  std::string backend_id;
  double latency_ms = 0.0;
};

/// JSON wire form, images as base64 PNG:
///   request  {prompt, width, height, seed, edges, condition_image?, mask}
///   response {image, backend_id, latency_ms}
nlohmann::json request_to_json(const BackendRequest& req);
/// Throws Error(kBadRequest).
BackendRequest request_from_json(const nlohmann::json& j);
nlohmann::json response_to_json(const BackendResponse& resp);
/// Throws Error(kMalformedResponse).
BackendResponse response_from_json(const nlohmann::json& j);

class GenerationBackend {
 public:
  virtual ~GenerationBackend() = default;
  virtual BackendResponse generate(const BackendRequest& request) = 0;
  virtual std::string id() const = 0;
};

}  // namespace adgen::generation
