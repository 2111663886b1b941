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

#include "adgen/generation/backend.hpp"

#include "adgen/common/error.hpp"
#include "adgen/common/hash.hpp"
#include "adgen/imaging/png.hpp"

namespace adgen::generation {

void BackendRequest::validate() const {
  if (prompt.empty()) throw Error(ErrorCode::kInvalidArgument, "empty prompt");
  imaging::PlacementSpec{"request", width, height}.validate();
  if (edges.width != width || edges.height != height) {
    throw Error(ErrorCode::kInvalidArgument, "edge map size differs from request size");
  }
  if (mask.width() != width || mask.height() != height) {
    throw Error(ErrorCode::kInvalidArgument, "mask size differs from request size");
  }
  if (condition_image && (condition_image->width() != width || condition_image->height() != height)) {
    throw Error(ErrorCode::kInvalidArgument, "condition image size differs from request size");
  }
}

nlohmann::json request_to_json(const BackendRequest& req) {
  nlohmann::json j = {
      {"prompt", req.prompt},
      {"width", req.width},
      {"height", req.height},
      {"seed", req.seed},
      {"edges", base64_encode(imaging::encode_edges_png(req.edges))},
      {"mask", base64_encode(imaging::encode_mask_png(req.mask))},
  };
  if (req.condition_image) j["condition_image"] = base64_encode(imaging::encode_png(*req.condition_image));
  return j;
}

BackendRequest request_from_json(const nlohmann::json& j) {
  try {
    BackendRequest req;
    req.prompt = j.at("prompt").get<std::string>();
    req.width = j.at("width").get<int>();
    req.height = j.at("height").get<int>();
    req.seed = j.at("seed").get<std::uint64_t>();
    req.edges = imaging::decode_edges_png(base64_decode(j.at("edges").get<std::string>()));
    req.mask = imaging::decode_mask_png(base64_decode(j.at("mask").get<std::string>()));
    if (j.contains("condition_image") && !j["condition_image"].is_null()) {
      req.condition_image = imaging::decode_png(base64_decode(j["condition_image"].get<std::string>()));
    }
    req.validate();
    return req;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kBadRequest, std::string("generation request: ") + e.what());
  } catch (const Error& e) {
    throw Error(ErrorCode::kBadRequest, std::string("generation request: ") + e.what());
  }
}

nlohmann::json response_to_json(const BackendResponse& resp) {
  return {{"image", base64_encode(imaging::encode_png(resp.image))},
          {"backend_id", resp.backend_id},
          {"latency_ms", resp.latency_ms}};
}

BackendResponse response_from_json(const nlohmann::json& j) {
  try {
    BackendResponse resp;
    resp.image = imaging::decode_png(base64_decode(j.at("image").get<std::string>()));
    resp.backend_id = j.value("backend_id", std::string("unknown"));
    resp.latency_ms = j.value("latency_ms", 0.0);
    return resp;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kMalformedResponse, std::string("generation response: ") + e.what());
  } catch (const Error& e) {
    throw Error(ErrorCode::kMalformedResponse, std::string("generation response: ") + e.what());
  }
}

}  // namespace adgen::generation
