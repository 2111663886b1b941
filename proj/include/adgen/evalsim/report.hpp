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
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "adgen/evalsim/simulator.hpp"
#include "json.hpp"

namespace adgen::evalsim {

struct GroupSummary {
  std::int64_t impressions = 0;
  std::int64_t clicks = 0;
  double ctr() const { return impressions > 0 ? static_cast<double>(clicks) / impressions : 0.0; }
};

struct RegretSample {
  std::int64_t t = 0;  // impressions served so far
  double bandit = 0.0;
  double control = 0.0;
};

/// Treatment (bandit) vs control comparison. Unavailable statistics are
/// empty: gain needs a positive control CTR, z and p need traffic in both
/// groups.
struct Report {
  GroupSummary bandit;
  GroupSummary control;
  std::optional<double> relative_gain;
  std::optional<double> z;
  std::optional<double> p;
  std::vector<RegretSample> regret_curve;
  std::optional<LearningCurve> learning;
};

Report summarize(const GroupSummary& bandit, const GroupSummary& control);
/// Adds a regret curve with `samples` points and the learning curve.
Report summarize(const SimTrace& trace, int samples = 100);

/// Feedback journal written by the service, one JSON object per line:
///   {"ts":ms,"request_id":"...","group":"bandit"|"random_control"|"original_only","prompt_id":"...",
///    "variant":"generated"|"original","event":"request"|"impression"|"click"|"expired"}
/// Impressions and clicks are counted once per request_id; bandit is
/// compared against random_control.
Report summarize_feedback_journal(const std::filesystem::path& path, std::int64_t since_ms = 0);

struct FeedbackTally {
  std::int64_t requests = 0;
  std::int64_t impressions = 0;
  std::int64_t clicks = 0;
};

/// Per-group distinct request_ids by event, for lines with ts >= since_ms.
/// Malformed lines are skipped. Throws Error(kNotFound) if the file is missing.
std::map<std::string, FeedbackTally> tally_feedback_journal(const std::filesystem::path& path,
                                                            std::int64_t since_ms = 0);

nlohmann::json to_json(const Report& report);
Report report_from_json(const nlohmann::json& j);
std::string to_text(const Report& report);

}  // namespace adgen::evalsim
