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

#include <cmath>
#include <filesystem>
#include <random>
#include <thread>

#include "adgen/bandit/features.hpp"
#include "adgen/bandit/linucb.hpp"
#include "adgen/bandit/random_policy.hpp"
#include "adgen/bandit/snapshot.hpp"
#include "adgen/common/error.hpp"
#include "doctest.h"
#include "support/linucb_oracle.hpp"

using namespace adgen;
using namespace adgen::bandit;

namespace {

ContextVector vec(std::vector<double> v) { return ContextVector{std::move(v)}; }

ContextVector random_context(std::mt19937_64& rng, int d) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  ContextVector x;
  x.values.resize(static_cast<std::size_t>(d));
  x.values[0] = 1.0;
  for (int i = 1; i < d; ++i) x.values[static_cast<std::size_t>(i)] = u(rng);
  return x;
}

double norm(const ContextVector& x) {
  double s = 0;
  for (double v : x.values) s += v * v;
  return std::sqrt(s);
}

}  // namespace

TEST_SUITE("build_context") {
  TEST_CASE("bias, category and bucket one-hots") {
    FeatureSpec spec = default_feature_spec();
    auto x = build_context({}, {"apparel", {}}, 0, spec);
    REQUIRE(x.size() == 32);
    const int k = spec.category_offset() + 0;
    const int bucket0 = spec.bucket_offset() + (0 - spec.bucket_min);
    for (int i = 0; i < 32; ++i) {
      double want = (i == 0 || i == k || i == bucket0) ? 1.0 : 0.0;
      REQUIRE(x[static_cast<std::size_t>(i)] == want);
    }
  }

  TEST_CASE("identical inputs give identical vectors") {
    FeatureSpec spec = default_feature_spec();
    FeatureMap user{{"country", "hu"}, {"device", "mobile"}};
    ItemFeatures item{"footwear", {{"brand", "acme"}}};
    CHECK(build_context(user, item, 2, spec) == build_context(user, item, 2, spec));
  }

  TEST_CASE("colliding user keys add up") {
    FeatureSpec spec = default_feature_spec();
    // Search for two keys that hash to the same slot.
    std::map<int, std::string> seen;
    std::string k1, k2;
    for (int i = 0; k1.empty(); ++i) {
      std::string key = "k" + std::to_string(i);
      int idx = hashed_index(spec, "u:" + key + "=1");
      auto [it, inserted] = seen.emplace(idx, key);
      if (!inserted) {
        k1 = it->second;
        k2 = key;
      }
    }
    auto x = build_context({{k1, "1"}, {k2, "1"}}, {"apparel", {}}, 0, spec);
    CHECK(x[static_cast<std::size_t>(hashed_index(spec, "u:" + k1 + "=1"))] == 2.0);
  }

  TEST_CASE("unknown category leaves the block empty") {
    FeatureSpec spec = default_feature_spec();
    auto x = build_context({}, {"spaceships", {}}, 0, spec);
    for (int i = 0; i < static_cast<int>(spec.categories.size()); ++i)
      CHECK(x[static_cast<std::size_t>(spec.category_offset() + i)] == 0.0);
  }

  TEST_CASE("buckets clamp to the block edges") {
    FeatureSpec spec = default_feature_spec();
    auto x = build_context({}, {"apparel", {}}, 15, spec);
    CHECK(x[static_cast<std::size_t>(spec.numeric_offset() - 1)] == 1.0);
  }

  TEST_CASE("numeric features are min-max scaled and clipped") {
    FeatureSpec spec = default_feature_spec();
    spec.numeric = {{"age", 18, 68}};
    auto x = build_context({{"age", "43"}}, {"apparel", {}}, 0, spec);
    CHECK(x[static_cast<std::size_t>(spec.numeric_offset())] == doctest::Approx(0.5));
    x = build_context({{"age", "99"}}, {"apparel", {}}, 0, spec);
    CHECK(x[static_cast<std::size_t>(spec.numeric_offset())] == 1.0);
  }

  TEST_CASE("norm stays under the documented bound") {
    FeatureSpec spec = default_feature_spec();
    spec.numeric = {{"age", 0, 100}};
    std::mt19937_64 rng(4);
    for (int trial = 0; trial < 200; ++trial) {
      FeatureMap user;
      const int n = static_cast<int>(rng() % 8);
      for (int i = 0; i < n; ++i) user["f" + std::to_string(rng() % 50)] = std::to_string(rng() % 3);
      user["age"] = std::to_string(rng() % 120);
      ItemFeatures item{spec.categories[rng() % 4], {{"color", std::to_string(rng() % 5)}}};
      auto x = build_context(user, item, static_cast<int>(rng() % 20) - 10, spec);
      const std::size_t hashed = user.size() - 1 + item.attributes.size();
      REQUIRE(norm(x) <= spec.norm_bound(hashed) + 1e-12);
      REQUIRE(x[0] == 1.0);
    }
  }

  TEST_CASE("too small a dimension is rejected") {
    FeatureSpec spec = default_feature_spec();
    spec.dimension = spec.hashed_offset();
    CHECK_THROWS_AS(spec.validate(), Error);
  }
}

TEST_SUITE("linucb") {
  TEST_CASE("fresh arm scores alpha * |x|") {
    LinUcbModel model(4, 0.7);
    auto x = vec({1.0, 2.0, -2.0, 0.5});
    CHECK(model.score("p1", x) == doctest::Approx(0.7 * norm(x)).epsilon(1e-14));
  }

  TEST_CASE("d=2 closed form after one update") {
    LinUcbModel model(2, 1.3);
    model.update("p", vec({1, 0}), 1);
    // A = diag(2, 1), b = e1 -> theta = (0.5, 0); x^T A^-1 x = 0.5
    CHECK(model.score("p", vec({1, 0})) == doctest::Approx(0.5 + 1.3 * std::sqrt(0.5)).epsilon(1e-14));
  }

  TEST_CASE("update definition") {
    LinUcbModel model(3);
    model.update("p", vec({1, 0, 0}), 1);
    const ArmState* s = model.arm("p");
    REQUIRE(s != nullptr);
    CHECK(s->a == [] {
      SquareMatrix m(3, 1.0);
      m(0, 0) = 2.0;
      return m;
    }());
    CHECK(s->b == std::vector<double>{1, 0, 0});
    CHECK(s->pulls == 1);

    model.update("p", vec({0, 1, 0}), 0);
    CHECK(s->a(1, 1) == 2.0);
    CHECK(s->b == std::vector<double>{1, 0, 0});
    CHECK(s->pulls == 2);
  }

  TEST_CASE("1000 random updates accumulate exactly") {
    const int d = 5;
    LinUcbModel model(d);
    std::mt19937_64 rng(12);
    std::vector<double> acc(d * d, 0.0);
    for (int i = 0; i < d; ++i) acc[i * d + i] = 1.0;
    for (int step = 0; step < 1000; ++step) {
      auto x = random_context(rng, d);
      model.update("arm", x, static_cast<int>(rng() % 2));
      for (int r = 0; r < d; ++r)
        for (int c = 0; c < d; ++c) acc[r * d + c] += x[r] * x[c];
    }
    const ArmState* s = model.arm("arm");
    for (int r = 0; r < d; ++r)
      for (int c = 0; c < d; ++c) REQUIRE(std::abs(s->a(r, c) - acc[r * d + c]) <= 1e-9);
  }

  TEST_CASE("200-step sequence matches the explicit-inverse oracle") {
    for (int d = 1; d <= 4; ++d) {
      std::mt19937_64 rng(100 + d);
      LinUcbModel model(d, 0.9);
      testing::OracleLinUcb oracle(d, 0.9);
      for (int step = 0; step < 200; ++step) {
        auto x = random_context(rng, d);
        REQUIRE(std::abs(model.score("a", x) - oracle.score("a", x.values)) <= 1e-9);
        const int r = static_cast<int>(rng() % 2);
        model.update("a", x, r);
        oracle.update("a", x.values, r);
      }
    }
  }

  TEST_CASE("select: single prompt, tie-break and learned preference") {
    LinUcbModel model(3);
    std::vector<std::string> one{"only"};
    CHECK(model.select(vec({1, 0, 0}), one).prompt_id == "only");

    std::vector<std::string> pool{"A", "B", "C"};
    CHECK(model.select(vec({1, 0.5, 0}), pool).prompt_id == "A");

    auto x = vec({1, 0, 0});
    model.update("A", x, 0);
    model.update("B", x, 1);
    // Same x on both arms: equal widths, theta_B^T x = 0.5 > theta_A^T x = 0.
    CHECK(model.confidence_width("A", x) == doctest::Approx(model.confidence_width("B", x)));
    std::vector<std::string> ab{"A", "B"};
    testing::OracleLinUcb oracle(3, 1.0);
    oracle.update("A", x.values, 0);
    oracle.update("B", x.values, 1);
    CHECK(oracle.select(ab, x.values) == 1);
    CHECK(model.select(x, ab).prompt_id == "B");

    CHECK_THROWS_AS(model.select(x, std::vector<std::string>{}), Error);
  }

  TEST_CASE("A stays SPD under any update sequence") {
    std::mt19937_64 rng(55);
    LinUcbModel model(6);
    std::uniform_real_distribution<double> big(-1e3, 1e3);
    for (int step = 0; step < 500; ++step) {
      ContextVector x;
      x.values = {1.0, big(rng), big(rng), 0.0, big(rng) * 1e-6, big(rng)};
      model.update("a", x, static_cast<int>(step % 2));
      REQUIRE(cholesky(model.arm("a")->a).has_value());
      REQUIRE(model.arm("a")->factor_ok);
    }
  }

  TEST_CASE("scaling the context on fresh arms keeps the argmax") {
    std::mt19937_64 rng(61);
    for (int trial = 0; trial < 50; ++trial) {
      LinUcbModel model(4);
      std::vector<std::string> pool{"a", "b", "c"};
      auto x = random_context(rng, 4);
      const double c = 0.1 + static_cast<double>(rng() % 100);
      ContextVector cx = x;
      for (double& v : cx.values) v *= c;
      REQUIRE(model.select(x, pool).prompt_id == model.select(cx, pool).prompt_id);
    }
  }

  TEST_CASE("confidence width never grows with more updates") {
    std::mt19937_64 rng(62);
    LinUcbModel model(4);
    auto probe = random_context(rng, 4);
    double prev = model.confidence_width("a", probe);
    for (int step = 0; step < 300; ++step) {
      model.update("a", random_context(rng, 4), 1);
      double w = model.confidence_width("a", probe);
      REQUIRE(w <= prev + 1e-12);
      prev = w;
    }
  }

  TEST_CASE("selection is deterministic") {
    std::mt19937_64 rng(63);
    LinUcbModel model(4);
    std::vector<std::string> pool{"a", "b", "c"};
    for (int i = 0; i < 100; ++i) model.update(pool[rng() % 3], random_context(rng, 4), static_cast<int>(rng() % 2));
    auto x = random_context(rng, 4);
    auto first = model.select(x, pool);
    for (int i = 0; i < 10; ++i) REQUIRE(model.select(x, pool).prompt_id == first.prompt_id);
  }

  TEST_CASE("bad inputs") {
    LinUcbModel model(3);
    CHECK_THROWS_AS(model.update("a", vec({1, 0}), 1), Error);
    CHECK_THROWS_AS(model.update("a", vec({1, 0, 0}), 2), Error);
    CHECK_THROWS_AS(model.update("a", vec({1, NAN, 0}), 1), Error);
    CHECK_THROWS_AS(LinUcbModel(0), Error);
    CHECK_THROWS_AS(LinUcbModel(3, -1.0), Error);
  }

  TEST_CASE("corrupt arm state raises NumericalFailure and gets quarantined") {
    LinUcbModel model(2);
    ArmState bad = ArmState::fresh(2);
    bad.a(0, 0) = -1.0;
    model.restore_arm("bad", bad);
    try {
      model.score("bad", vec({1, 0}));
      FAIL("expected NumericalFailure");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kNumericalFailure);
    }
    auto sel = model.select(vec({1, 0}), std::vector<std::string>{"bad", "other"});
    CHECK(sel.quarantined == std::vector<std::string>{"bad"});

    SharedLinUcb shared(model);
    shared.select(vec({1, 0}), std::vector<std::string>{"bad"});
    auto snap = shared.snapshot();
    CHECK(snap.arm("bad")->factor_ok);
    CHECK(snap.arm("bad")->pulls == 0);
  }
}

TEST_SUITE("random_policy") {
  TEST_CASE("single prompt and reproducibility") {
    std::vector<std::string> one{"x"};
    CHECK(random_policy(one, 42) == "x");
    std::vector<std::string> pool{"a", "b", "c", "d"};
    RandomPolicy p1(9), p2(9);
    for (int i = 0; i < 100; ++i) REQUIRE(p1.choose(pool) == p2.choose(pool));
    CHECK(random_policy(pool, 5) == random_policy(pool, 5));
    CHECK_THROWS_AS(random_policy(std::vector<std::string>{}, 1), Error);
  }

  TEST_CASE("30k draws over 3 prompts are uniform within 3 sigma") {
    std::vector<std::string> pool{"a", "b", "c"};
    RandomPolicy policy(2024);
    std::map<std::string, int> counts;
    const int n = 30000;
    for (int i = 0; i < n; ++i) ++counts[policy.choose(pool)];
    // sigma = sqrt(n p (1-p)) = sqrt(30000 * 1/3 * 2/3) = 81.65
    const double sigma = std::sqrt(n * (1.0 / 3) * (2.0 / 3));
    for (const auto& id : pool) CHECK(std::abs(counts[id] - n / 3.0) <= 3 * sigma);
  }
}

TEST_SUITE("snapshot_stats") {
  TEST_CASE("pull counts and trace") {
    LinUcbModel model(3);
    CHECK(model.stats().empty());
    std::mt19937_64 rng(70);
    double sq_norms = 0;
    for (int i = 0; i < 40; ++i) {
      auto x = random_context(rng, 3);
      const std::string arm = i % 4 == 0 ? "b" : "a";
      if (arm == "a") sq_norms += norm(x) * norm(x);
      model.update(arm, x, static_cast<int>(rng() % 2));
    }
    std::uint64_t pulls = 0;
    for (const auto& s : model.stats()) {
      pulls += s.pulls;
      if (s.prompt_id == "a") CHECK(s.trace_a == doctest::Approx(3 + sq_norms).epsilon(1e-12));
      CHECK(s.mean_reward_estimate.has_value());
    }
    CHECK(pulls == 40);
  }
}

TEST_SUITE("snapshot") {
  TEST_CASE("save/load round-trips exactly") {
    FeatureSpec spec = default_feature_spec();
    spec.numeric = {{"age", 18, 80}};
    LinUcbModel model(spec.dimension, 0.37);
    std::mt19937_64 rng(71);
    for (int i = 0; i < 50; ++i)
      model.update("p" + std::to_string(i % 3), random_context(rng, spec.dimension), static_cast<int>(rng() % 2));

    auto dir = std::filesystem::temp_directory_path() / "adgen_snapshot_test";
    std::filesystem::create_directories(dir);
    save_snapshot(dir / "model.json", model, spec);
    auto loaded = load_snapshot(dir / "model.json");
    CHECK(loaded.spec == spec);
    CHECK(loaded.model.alpha() == model.alpha());
    REQUIRE(loaded.model.arms().size() == model.arms().size());
    for (const auto& [id, s] : model.arms()) {
      const ArmState* t = loaded.model.arm(id);
      REQUIRE(t != nullptr);
      CHECK(t->a == s.a);
      CHECK(t->b == s.b);
      CHECK(t->pulls == s.pulls);
      CHECK(t->context_sum == s.context_sum);
    }
    auto x = random_context(rng, spec.dimension);
    CHECK(loaded.model.score("p1", x) == model.score("p1", x));
    std::filesystem::remove_all(dir);
  }

  TEST_CASE("unknown versions are rejected") {
    auto j = snapshot_to_json(LinUcbModel(32), default_feature_spec());
    j["version"] = 99;
    CHECK_THROWS_AS(snapshot_from_json(j), Error);
  }
}

TEST_SUITE("shared model") {
  TEST_CASE("concurrent updates are never lost") {
    SharedLinUcb shared(LinUcbModel(4));
    std::vector<std::thread> threads;
    for (int t = 0; t < 4; ++t) {
      threads.emplace_back([&, t] {
        std::mt19937_64 rng(t);
        std::vector<std::string> pool{"a", "b"};
        for (int i = 0; i < 250; ++i) {
          auto x = random_context(rng, 4);
          auto sel = shared.select(x, pool);
          shared.update(sel.prompt_id, x, static_cast<int>(rng() % 2));
        }
      });
    }
    for (auto& th : threads) th.join();
    std::uint64_t pulls = 0;
    for (const auto& s : shared.stats()) pulls += s.pulls;
    CHECK(pulls == 1000);
    CHECK(shared.total_updates() == 1000);
  }
}
