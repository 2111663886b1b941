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

#include "adgen/generation/backend.hpp"

namespace adgen::generation {

/// Deterministic procedural stand-in for a diffusion worker.
///
/// Two octaves of value noise (seeded by request.seed) colored by a
/// three-color palette derived from the prompt hash, darkened by edge
/// magnitude m as c * (1 - 0.3 m / 255), and, when a condition image is
/// present, blended 30% toward the mean RGB of its masked region.
BackendResponse mock_generate(const BackendRequest& request);

class MockBackend final : public GenerationBackend {
 public:
  BackendResponse generate(const BackendRequest& request) override { return mock_generate(request); }
  std::string id() const override { return "mock"; }
};

}  // namespace adgen::generation
