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

#include "adgen/evalsim/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "adgen/bandit/linucb.hpp"
#include "adgen/bandit/random_policy.hpp"
#include "adgen/common/error.hpp"
#include "adgen/common/hash.hpp"

namespace adgen::evalsim {

namespace {

// Platform-independent draws; std distributions differ between libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next() {
    state_ += 0x9E3779B97F4A7C15ULL;
    return mix64(state_);
  }
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  int below(int n) { return static_cast<int>(next() % static_cast<std::uint64_t>(n)); }
  double normal() {
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  std::uint64_t state_;
};

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t stream) { return mix64(seed ^ mix64(stream)); }

const char* const kSegments[] = {"bargain", "premium", "new", "loyal", "lapsed", "gift", "sport", "family"};
const char* const kDevices[] = {"mobile", "desktop", "tablet"};
const char* const kCountries[] = {"hu", "de", "fr", "us", "br", "jp"};

bandit::ContextVector draw_context(Rng& rng, const bandit::FeatureSpec& spec) {
  bandit::FeatureMap user{{"segment", kSegments[rng.below(8)]},
                          {"device", kDevices[rng.below(3)]},
                          {"country", kCountries[rng.below(6)]}};
  for (const auto& num : spec.numeric) {
    user[num.name] = std::to_string(num.min + rng.uniform() * (num.max - num.min));
  }
  bandit::ItemFeatures item;
  item.category = spec.categories.empty() ? "" : spec.categories[static_cast<std::size_t>(
                                                     rng.below(static_cast<int>(spec.categories.size())))];
  const int bucket = spec.bucket_min + rng.below(spec.bucket_max - spec.bucket_min + 1);
  return bandit::build_context(user, item, bucket, spec);
}

double sigmoid(double v) { return 1.0 / (1.0 + std::exp(-v)); }

}  // namespace

void SimConfig::validate() const {
  spec.validate();
  if (impressions < 0) throw Error(ErrorCode::kInvalidArgument, "impressions must be >= 0");
  if (arms < 1) throw Error(ErrorCode::kInvalidArgument, "need at least one arm");
  if (!(alpha >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "alpha must be >= 0");
  if (!(ctr_min >= 0.0 && ctr_min <= ctr_max && ctr_max <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "need 0 <= ctr_min <= ctr_max <= 1");
  }
  if (!(dominant_gap >= 0.0 && ctr_max + dominant_gap <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "dominant_gap must keep CTR within [0, 1]");
  }
  if (!(weight_scale >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "weight_scale must be >= 0");
}

std::int64_t GroupTrace::clicks() const {
  std::int64_t c = 0;
  for (auto r : reward) c += r;
  return c;
}

std::vector<std::int64_t> GroupTrace::arm_counts(int arms) const {
  std::vector<std::int64_t> out(static_cast<std::size_t>(arms), 0);
  for (int a : arm) ++out[static_cast<std::size_t>(a)];
  return out;
}

double GroupTrace::cumulative_regret() const {
  double s = 0.0;
  for (double r : regret) s += r;
  return s;
}

SimTrace simulate(const SimConfig& cfg) {
  cfg.validate();
  const int d = cfg.spec.dimension;
  const auto k = static_cast<std::size_t>(cfg.arms);

  Rng weight_rng(stream_seed(cfg.seed, 1));
  std::vector<std::vector<double>> weights(k, std::vector<double>(static_cast<std::size_t>(d)));
  const double sd = cfg.weight_scale / std::sqrt(static_cast<double>(d));
  for (std::size_t a = 0; a < k; ++a) {
    if (cfg.identical_arms && a > 0) {
      weights[a] = weights[0];
      continue;
    }
    for (auto& w : weights[a]) w = sd * weight_rng.normal();
  }

  Rng context_rng(stream_seed(cfg.seed, 2));
  Rng bandit_reward_rng(stream_seed(cfg.seed, 3));
  Rng control_reward_rng(stream_seed(cfg.seed, 4));
  bandit::RandomPolicy control_policy(stream_seed(cfg.seed, 5));

  std::vector<std::string> arm_ids;
  for (std::size_t a = 0; a < k; ++a) arm_ids.push_back("arm-" + std::to_string(a));
  bandit::LinUcbModel model(d, cfg.alpha);

  SimTrace trace;
  trace.config = cfg;
  const auto n = static_cast<std::size_t>(cfg.impressions);
  for (auto* g : {&trace.bandit, &trace.control}) {
    g->arm.reserve(n);
    g->reward.reserve(n);
    g->regret.reserve(n);
  }

  std::vector<double> ctr(k);
  for (std::size_t i = 0; i < n; ++i) {
    const auto x = draw_context(context_rng, cfg.spec);
    double best = 0.0;
    for (std::size_t a = 0; a < k; ++a) {
      double dot = 0.0;
      for (int j = 0; j < d; ++j) dot += weights[a][static_cast<std::size_t>(j)] * x[static_cast<std::size_t>(j)];
      ctr[a] = cfg.ctr_min + (cfg.ctr_max - cfg.ctr_min) * sigmoid(dot);
      if (a + 1 == k) ctr[a] += cfg.dominant_gap;
      best = std::max(best, ctr[a]);
    }

    const auto picked = model.select(x, arm_ids);
    const auto ba = static_cast<std::size_t>(
        std::find(arm_ids.begin(), arm_ids.end(), picked.prompt_id) - arm_ids.begin());
    const int b_reward = bandit_reward_rng.uniform() < ctr[ba] ? 1 : 0;
    model.update(arm_ids[ba], x, b_reward);
    trace.bandit.arm.push_back(static_cast<int>(ba));
    trace.bandit.reward.push_back(static_cast<std::uint8_t>(b_reward));
    trace.bandit.regret.push_back(best - ctr[ba]);

    const auto& chosen = control_policy.choose(arm_ids);
    const auto ca = static_cast<std::size_t>(std::find(arm_ids.begin(), arm_ids.end(), chosen) - arm_ids.begin());
    const int c_reward = control_reward_rng.uniform() < ctr[ca] ? 1 : 0;
    trace.control.arm.push_back(static_cast<int>(ca));
    trace.control.reward.push_back(static_cast<std::uint8_t>(c_reward));
    trace.control.regret.push_back(best - ctr[ca]);
  }
  return trace;
}

LearningCurve learning_curve(const GroupTrace& group) {
  LearningCurve out;
  const std::size_t n = group.regret.size();
  const std::size_t tenth = n / 10;
  if (tenth == 0) return out;
  for (std::size_t i = 0; i < tenth; ++i) {
    out.first_decile += group.regret[i];
    out.last_decile += group.regret[n - tenth + i];
  }
  out.first_decile /= static_cast<double>(tenth);
  out.last_decile /= static_cast<double>(tenth);
  return out;
}

nlohmann::json to_json(const SimConfig& cfg) {
  nlohmann::json numeric = nlohmann::json::array();
  for (const auto& f : cfg.spec.numeric) numeric.push_back({{"name", f.name}, {"min", f.min}, {"max", f.max}});
  return {{"seed", cfg.seed},
          {"impressions", cfg.impressions},
          {"arms", cfg.arms},
          {"alpha", cfg.alpha},
          {"feature_spec",
           {{"dimension", cfg.spec.dimension},
            {"categories", cfg.spec.categories},
            {"bucket_min", cfg.spec.bucket_min},
            {"bucket_max", cfg.spec.bucket_max},
            {"numeric", numeric}}},
          {"ctr_min", cfg.ctr_min},
          {"ctr_max", cfg.ctr_max},
          {"dominant_gap", cfg.dominant_gap},
          {"identical_arms", cfg.identical_arms},
          {"weight_scale", cfg.weight_scale}};
}

SimConfig sim_config_from_json(const nlohmann::json& j) {
  try {
    SimConfig cfg;
    cfg.seed = j.at("seed").get<std::uint64_t>();
    cfg.impressions = j.at("impressions").get<std::int64_t>();
    cfg.arms = j.at("arms").get<int>();
    cfg.alpha = j.at("alpha").get<double>();
    const auto& fs = j.at("feature_spec");
    cfg.spec.dimension = fs.at("dimension").get<int>();
    cfg.spec.categories = fs.at("categories").get<std::vector<std::string>>();
    cfg.spec.bucket_min = fs.at("bucket_min").get<int>();
    cfg.spec.bucket_max = fs.at("bucket_max").get<int>();
    cfg.spec.numeric.clear();
    for (const auto& f : fs.at("numeric")) {
      cfg.spec.numeric.push_back({f.at("name").get<std::string>(), f.at("min").get<double>(), f.at("max").get<double>()});
    }
    cfg.ctr_min = j.at("ctr_min").get<double>();
    cfg.ctr_max = j.at("ctr_max").get<double>();
    cfg.dominant_gap = j.at("dominant_gap").get<double>();
    cfg.identical_arms = j.at("identical_arms").get<bool>();
    cfg.weight_scale = j.at("weight_scale").get<double>();
    cfg.validate();
    return cfg;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kInvalidArgument, std::string("sim config: ") + e.what());
  }
}

namespace {

nlohmann::json group_to_json(const GroupTrace& g, int arms) {
  return {{"impressions", g.impressions()},
          {"clicks", g.clicks()},
          {"arm_counts", g.arm_counts(arms)},
          {"arm", g.arm},
          {"reward", g.reward},
          {"regret", g.regret}};
}

GroupTrace group_from_json(const nlohmann::json& j, int arms) {
  GroupTrace g;
  g.arm = j.at("arm").get<std::vector<int>>();
  g.reward = j.at("reward").get<std::vector<std::uint8_t>>();
  g.regret = j.at("regret").get<std::vector<double>>();
  if (g.reward.size() != g.arm.size() || g.regret.size() != g.arm.size()) {
    throw Error(ErrorCode::kInvalidArgument, "trace arrays differ in length");
  }
  for (int a : g.arm) {
    if (a < 0 || a >= arms) throw Error(ErrorCode::kInvalidArgument, "trace arm out of range");
  }
  for (auto r : g.reward) {
    if (r > 1) throw Error(ErrorCode::kInvalidArgument, "trace reward must be 0 or 1");
  }
  return g;
}

}  // namespace

nlohmann::json trace_to_json(const SimTrace& trace) {
  return {{"format", "adgen-simtrace"},
          {"version", 1},
          {"config", to_json(trace.config)},
          {"groups",
           {{"bandit", group_to_json(trace.bandit, trace.config.arms)},
            {"control", group_to_json(trace.control, trace.config.arms)}}}};
}

SimTrace trace_from_json(const nlohmann::json& j) {
  try {
    if (j.at("format") != "adgen-simtrace" || j.at("version") != 1) {
      throw Error(ErrorCode::kInvalidArgument, "not an adgen-simtrace v1 document");
    }
    SimTrace t;
    t.config = sim_config_from_json(j.at("config"));
    t.bandit = group_from_json(j.at("groups").at("bandit"), t.config.arms);
    t.control = group_from_json(j.at("groups").at("control"), t.config.arms);
    return t;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kInvalidArgument, std::string("sim trace: ") + e.what());
  }
}

}  // namespace adgen::evalsim
