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

#include "adgen/evalsim/report.hpp"

#include <array>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <spdlog/fmt/fmt.h>
#include <spdlog/spdlog.h>

#include "adgen/common/error.hpp"
#include "adgen/evalsim/stats.hpp"

namespace adgen::evalsim {

Report summarize(const GroupSummary& bandit, const GroupSummary& control) {
  Report r;
  r.bandit = bandit;
  r.control = control;
  if (control.ctr() > 0.0) r.relative_gain = relative_ctr_gain(bandit.ctr(), control.ctr());
  if (bandit.impressions > 0 && control.impressions > 0) {
    const auto t = two_prop_ztest(bandit.clicks, bandit.impressions, control.clicks, control.impressions);
    r.z = t.z;
    r.p = t.p_two_sided;
  }
  return r;
}

Report summarize(const SimTrace& trace, int samples) {
  Report r = summarize(GroupSummary{trace.bandit.impressions(), trace.bandit.clicks()},
                       GroupSummary{trace.control.impressions(), trace.control.clicks()});
  const auto n = static_cast<std::size_t>(trace.bandit.impressions());
  if (n > 0 && samples > 0) {
    const std::size_t step = std::max<std::size_t>(1, n / static_cast<std::size_t>(samples));
    double cb = 0.0;
    double cc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      cb += trace.bandit.regret[i];
      cc += trace.control.regret[i];
      if ((i + 1) % step == 0 || i + 1 == n) {
        r.regret_curve.push_back({static_cast<std::int64_t>(i + 1), cb, cc});
      }
    }
    r.learning = learning_curve(trace.bandit);
  }
  return r;
}

std::map<std::string, FeedbackTally> tally_feedback_journal(const std::filesystem::path& path,
                                                            std::int64_t since_ms) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kNotFound, "cannot open " + path.string());
  std::map<std::string, std::array<std::set<std::string>, 3>> seen;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      if (j.value("ts", std::int64_t{0}) < since_ms) continue;
      const auto event = j.at("event").get<std::string>();
      auto& sets = seen[j.at("group").get<std::string>()];
      const auto id = j.at("request_id").get<std::string>();
      if (event == "request") sets[0].insert(id);
      if (event == "impression") sets[1].insert(id);
      if (event == "click") sets[2].insert(id);
    } catch (const nlohmann::json::exception& e) {
      spdlog::warn("{}:{} skipped: {}", path.string(), lineno, e.what());
    }
  }
  std::map<std::string, FeedbackTally> out;
  for (const auto& [group, sets] : seen) {
    out[group] = {static_cast<std::int64_t>(sets[0].size()), static_cast<std::int64_t>(sets[1].size()),
                  static_cast<std::int64_t>(sets[2].size())};
  }
  return out;
}

Report summarize_feedback_journal(const std::filesystem::path& path, std::int64_t since_ms) {
  const auto tally = tally_feedback_journal(path, since_ms);
  auto group = [&](const char* g) {
    auto it = tally.find(g);
    return it == tally.end() ? GroupSummary{} : GroupSummary{it->second.impressions, it->second.clicks};
  };
  return summarize(group("bandit"), group("random_control"));
}

namespace {

nlohmann::json opt(const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(); }

std::optional<double> opt_from(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<double>();
}

nlohmann::json group_json(const GroupSummary& g) {
  return {{"impressions", g.impressions}, {"clicks", g.clicks}, {"ctr", g.ctr()}};
}

GroupSummary group_from(const nlohmann::json& j) {
  return {j.at("impressions").get<std::int64_t>(), j.at("clicks").get<std::int64_t>()};
}

}  // namespace

nlohmann::json to_json(const Report& report) {
  nlohmann::json curve = nlohmann::json::array();
  for (const auto& s : report.regret_curve) curve.push_back({{"t", s.t}, {"bandit", s.bandit}, {"control", s.control}});
  nlohmann::json j = {{"groups", {{"bandit", group_json(report.bandit)}, {"control", group_json(report.control)}}},
                      {"relative_gain", opt(report.relative_gain)},
                      {"z", opt(report.z)},
                      {"p", opt(report.p)},
                      {"regret_curve", curve}};
  j["learning"] = report.learning ? nlohmann::json{{"first_decile", report.learning->first_decile},
                                                   {"last_decile", report.learning->last_decile}}
                                  : nlohmann::json();
  return j;
}

Report report_from_json(const nlohmann::json& j) {
  try {
    Report r;
    r.bandit = group_from(j.at("groups").at("bandit"));
    r.control = group_from(j.at("groups").at("control"));
    r.relative_gain = opt_from(j, "relative_gain");
    r.z = opt_from(j, "z");
    r.p = opt_from(j, "p");
    for (const auto& s : j.at("regret_curve")) {
      r.regret_curve.push_back({s.at("t").get<std::int64_t>(), s.at("bandit").get<double>(), s.at("control").get<double>()});
    }
    if (j.contains("learning") && !j["learning"].is_null()) {
      r.learning = LearningCurve{j["learning"].at("first_decile").get<double>(),
                                 j["learning"].at("last_decile").get<double>()};
    }
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kInvalidArgument, std::string("report: ") + e.what());
  }
}

std::string to_text(const Report& report) {
  auto fmt_opt = [](const std::optional<double>& v, const char* spec) {
    return v ? fmt::format(fmt::runtime(spec), *v) : std::string("n/a");
  };
  std::ostringstream out;
  out << fmt::format("{:<8} {:>12} {:>10} {:>9}\n", "group", "impressions", "clicks", "ctr");
  out << fmt::format("{:<8} {:>12} {:>10} {:>9.5f}\n", "bandit", report.bandit.impressions, report.bandit.clicks,
                     report.bandit.ctr());
  out << fmt::format("{:<8} {:>12} {:>10} {:>9.5f}\n", "control", report.control.impressions,
                     report.control.clicks, report.control.ctr());
  out << "relative gain: " << fmt_opt(report.relative_gain ? std::optional<double>(*report.relative_gain * 100.0)
                                                           : std::nullopt,
                                      "{:+.2f}%")
      << "\n";
  out << "z: " << fmt_opt(report.z, "{:.4f}") << "  p (two-sided): " << fmt_opt(report.p, "{:.3g}") << "\n";
  if (!report.regret_curve.empty()) {
    const auto& last = report.regret_curve.back();
    out << fmt::format("cumulative regret after {}: bandit {:.2f}, control {:.2f}\n", last.t, last.bandit,
                       last.control);
  }
  if (report.learning) {
    out << fmt::format("mean regret first 10%: {:.5f}, last 10%: {:.5f}\n", report.learning->first_decile,
                       report.learning->last_decile);
  }
  return out.str();
}

}  // namespace adgen::evalsim
