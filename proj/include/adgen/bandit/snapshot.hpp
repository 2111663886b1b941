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

// Versioned JSON snapshot of a LinUCB model and its feature layout.
//
//   {
//     "format": "adgen-linucb", "version": 1,
//     "alpha": 1.0, "dimension": 32,
//     "feature_spec": {"dimension", "categories", "bucket_min", "bucket_max",
//                      "numeric": [{"name", "min", "max"}]},
//     "arms": [{"prompt_id", "pulls", "reward_sum",
//               "a": [d*d row-major], "b": [d], "context_sum": [d]}]
//   }
//
// Doubles are written in shortest round-trip form, so a save/load cycle
// reproduces A, b and every counter bit for bit.

#pragma once

#include <filesystem>
#include "json.hpp"

#include "adgen/bandit/features.hpp"
#include "adgen/bandit/linucb.hpp"

namespace adgen::bandit {

inline constexpr int kSnapshotVersion = 1;

nlohmann::json feature_spec_to_json(const FeatureSpec& spec);
FeatureSpec feature_spec_from_json(const nlohmann::json& j);

nlohmann::json snapshot_to_json(const LinUcbModel& model, const FeatureSpec& spec);

struct LoadedSnapshot {
  LinUcbModel model;
  FeatureSpec spec;
};

/// Throws Error(kInvalidArgument) on unknown format/version or bad shapes.
LoadedSnapshot snapshot_from_json(const nlohmann::json& j);

void save_snapshot(const std::filesystem::path& path, const LinUcbModel& model,
                   const FeatureSpec& spec);
LoadedSnapshot load_snapshot(const std::filesystem::path& path);

}  // namespace adgen::bandit
