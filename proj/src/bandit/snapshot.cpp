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

#include "adgen/bandit/snapshot.hpp"

#include <fstream>

#include "adgen/common/error.hpp"

namespace adgen::bandit {

using json = nlohmann::json;

json feature_spec_to_json(const FeatureSpec& spec) {
  json numeric = json::array();
  for (const auto& f : spec.numeric) numeric.push_back({{"name", f.name}, {"min", f.min}, {"max", f.max}});
  return {{"dimension", spec.dimension},
          {"categories", spec.categories},
          {"bucket_min", spec.bucket_min},
          {"bucket_max", spec.bucket_max},
          {"numeric", numeric}};
}

FeatureSpec feature_spec_from_json(const json& j) {
  FeatureSpec spec;
  try {
    spec.dimension = j.at("dimension").get<int>();
    spec.categories = j.at("categories").get<std::vector<std::string>>();
    spec.bucket_min = j.value("bucket_min", spec.bucket_min);
    spec.bucket_max = j.value("bucket_max", spec.bucket_max);
    for (const auto& f : j.value("numeric", json::array())) {
      spec.numeric.push_back({f.at("name").get<std::string>(), f.at("min").get<double>(),
                              f.at("max").get<double>()});
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kInvalidArgument, std::string("feature spec: ") + e.what());
  }
  spec.validate();
  return spec;
}

json snapshot_to_json(const LinUcbModel& model, const FeatureSpec& spec) {
  json arms = json::array();
  for (const auto& [id, s] : model.arms()) {
    arms.push_back({{"prompt_id", id},
                    {"pulls", s.pulls},
                    {"reward_sum", s.reward_sum},
                    {"a", std::vector<double>(s.a.data().begin(), s.a.data().end())},
                    {"b", s.b},
                    {"context_sum", s.context_sum}});
  }
  return {{"format", "adgen-linucb"},
          {"version", kSnapshotVersion},
          {"alpha", model.alpha()},
          {"dimension", model.dimension()},
          {"feature_spec", feature_spec_to_json(spec)},
          {"arms", arms}};
}

LoadedSnapshot snapshot_from_json(const json& j) {
  try {
    if (j.at("format").get<std::string>() != "adgen-linucb") {
      throw Error(ErrorCode::kInvalidArgument, "not a LinUCB snapshot");
    }
    if (j.at("version").get<int>() != kSnapshotVersion) {
      throw Error(ErrorCode::kInvalidArgument, "unsupported snapshot version");
    }
    const int d = j.at("dimension").get<int>();
    LoadedSnapshot out{LinUcbModel(d, j.at("alpha").get<double>()),
                       feature_spec_from_json(j.at("feature_spec"))};
    if (out.spec.dimension != d) {
      throw Error(ErrorCode::kInvalidArgument, "feature spec dimension differs from model");
    }
    for (const auto& arm : j.at("arms")) {
      ArmState s = ArmState::fresh(d);
      auto a = arm.at("a").get<std::vector<double>>();
      if (a.size() != static_cast<std::size_t>(d) * static_cast<std::size_t>(d)) {
        throw Error(ErrorCode::kInvalidArgument, "arm matrix has wrong size");
      }
      std::copy(a.begin(), a.end(), s.a.data().begin());
      s.b = arm.at("b").get<std::vector<double>>();
      s.context_sum = arm.at("context_sum").get<std::vector<double>>();
      s.pulls = arm.at("pulls").get<std::uint64_t>();
      s.reward_sum = arm.at("reward_sum").get<double>();
      out.model.restore_arm(arm.at("prompt_id").get<std::string>(), std::move(s));
    }
    return out;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kInvalidArgument, std::string("snapshot: ") + e.what());
  }
}

void save_snapshot(const std::filesystem::path& path, const LinUcbModel& model,
                   const FeatureSpec& spec) {
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << snapshot_to_json(model, spec).dump() << '\n';
    if (!out) throw Error(ErrorCode::kStorageFailure, "cannot write " + tmp);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error(ErrorCode::kStorageFailure, "rename " + tmp + ": " + ec.message());
}

LoadedSnapshot load_snapshot(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kNotFound, "no snapshot at " + path.string());
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded()) throw Error(ErrorCode::kInvalidArgument, "snapshot is not valid JSON");
  return snapshot_from_json(j);
}

}  // namespace adgen::bandit
