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
#include <string>
#include <vector>

#include "adgen/bandit/features.hpp"
#include "json.hpp"

namespace adgen::evalsim {

/// Synthetic CTR environment. True CTR of arm a for context x is
/// ctr_min + (ctr_max - ctr_min) * sigmoid(w_a . x), plus dominant_gap for the
/// last arm. Weights are drawn N(0, weight_scale^2 / d) from the seed, or
/// shared by every arm when identical_arms is set.
struct SimConfig {
  std::uint64_t seed = 1;
  std::int64_t impressions = 50'000;
  int arms = 3;
  double alpha = 1.0;
  bandit::FeatureSpec spec = bandit::default_feature_spec();
  double ctr_min = 0.01;
  double ctr_max = 0.10;
  double dominant_gap = 0.05;
  bool identical_arms = false;
  double weight_scale = 4.0;

  /// Throws Error(kInvalidArgument).
  void validate() const;
};

nlohmann::json to_json(const SimConfig& cfg);
SimConfig sim_config_from_json(const nlohmann::json& j);

/// Per-impression outcomes of one policy. `regret` is the expected regret
/// max_a CTR(a, x) - CTR(chosen, x) of each impression.
struct GroupTrace {
  std::vector<int> arm;
  std::vector<std::uint8_t> reward;
  std::vector<double> regret;

  std::int64_t impressions() const { return static_cast<std::int64_t>(arm.size()); }
  std::int64_t clicks() const;
  std::vector<std::int64_t> arm_counts(int arms) const;
  double cumulative_regret() const;
};

struct SimTrace {
  SimConfig config;
  GroupTrace bandit;   // LinUCB, trained online with immediate rewards
  GroupTrace control;  // uniform random prompts
};

/// Both policies see the same context stream; their reward draws come from
/// independent generators. Deterministic for a given config.
SimTrace simulate(const SimConfig& cfg);

/// Mean regret over the first and last 10% of a group's horizon.
struct LearningCurve {
  double first_decile = 0.0;
  double last_decile = 0.0;
  bool learned() const { return last_decile < first_decile; }
};
LearningCurve learning_curve(const GroupTrace& group);

/// {"format":"adgen-simtrace","version":1,"config":{...},
///  "groups":{"bandit":{"arm":[...],"reward":[...],"regret":[...]},"control":{...}}}
nlohmann::json trace_to_json(const SimTrace& trace);
SimTrace trace_from_json(const nlohmann::json& j);

}  // namespace adgen::evalsim
