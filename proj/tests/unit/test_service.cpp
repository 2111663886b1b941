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

#include <atomic>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <thread>

#include "adgen/common/error.hpp"
#include "adgen/common/hash.hpp"
#include "adgen/evalsim/stats.hpp"
#include "adgen/imaging/png.hpp"
#include "adgen/service/config.hpp"
#include "adgen/service/creative_service.hpp"
#include "adgen/service/http_api.hpp"
#include "adgen/service/workers.hpp"
#include "doctest.h"
#include "httplib.h"
#include "support/service_harness.hpp"

using namespace adgen;
using namespace adgen::service;
using adgen::testing::CallbackReceiver;
using adgen::testing::creative_request;
using adgen::testing::product_png;
using adgen::testing::ServiceHarness;
using nlohmann::json;

namespace {

const bandit::ArmStats* find_arm(const std::vector<bandit::ArmStats>& stats, const std::string& id) {
  for (const auto& s : stats) {
    if (s.prompt_id == id) return &s;
  }
  return nullptr;
}

std::string ref_of(const std::string& image_ref) {
  const auto slash = image_ref.rfind('/');
  return image_ref.substr(slash + 1, 64);
}

/// A generated creative served to the bandit group, ready for feedback.
CreativeResponse warm_bandit_response(ServiceHarness& h, const Bytes& png) {
  h->handle_creative(creative_request(png, 300, 250));
  h->run_pending_jobs();
  auto resp = h->handle_creative(creative_request(png, 300, 250));
  REQUIRE(resp.variant == Variant::kGenerated);
  return resp;
}

}  // namespace

TEST_CASE("cold request serves the original and enqueues; warm request serves the creative") {
  ServiceHarness h;
  const auto png = product_png();
  const auto hash = sha256_hex(png);

  auto cold = h->handle_creative(creative_request(png, 300, 250));
  CHECK(cold.variant == Variant::kOriginal);
  CHECK(cold.cache == "enqueued");
  REQUIRE(cold.prompt_id.has_value());
  CHECK(cold.image_ref == "http://cdn.test/v1/objects/" + hash + ".png");
  CHECK(h->store().queue_length() == 1);
  CHECK(h->backend().calls() == 0);

  auto again = h->handle_creative(creative_request(png, 300, 250));
  CHECK(again.cache == "in_flight");
  CHECK(again.variant == Variant::kOriginal);
  CHECK(h->store().queue_length() == 1);

  CHECK(h->run_pending_jobs() == 1);
  CHECK(h->backend().calls() == 1);

  auto warm = h->handle_creative(creative_request(png, 300, 250));
  CHECK(warm.variant == Variant::kGenerated);
  CHECK(warm.cache == "hit");
  CHECK(warm.prompt_id == cold.prompt_id);
  CHECK(warm.request_id != cold.request_id);
  const auto creative = imaging::decode_png(h->object_bytes(ref_of(warm.image_ref)));
  CHECK(creative.width() == 300);
  CHECK(creative.height() == 250);
  CHECK(h->backend().inline_calls() == 0);

  const auto j = to_json(warm);
  CHECK(j["variant"] == "generated");
  CHECK(j["ab_group"] == "bandit");
  CHECK(j["prompt_id"] == *warm.prompt_id);
}

TEST_CASE("placements in one aspect bucket share a single generation job") {
  ServiceHarness h;
  const auto png = product_png(1);
  auto a = h->handle_creative(creative_request(png, 300, 250));
  auto b = h->handle_creative(creative_request(png, 336, 280));
  REQUIRE(a.key.has_value());
  REQUIRE(b.key.has_value());
  CHECK(*a.key == *b.key);
  CHECK(a.key->bucket == 1);
  CHECK(a.cache == "enqueued");
  CHECK(b.cache == "in_flight");
  CHECK(h->run_pending_jobs() == 1);
  CHECK(h->backend().calls() == 1);

  auto wa = h->handle_creative(creative_request(png, 300, 250));
  auto wb = h->handle_creative(creative_request(png, 336, 280));
  REQUIRE(wa.variant == Variant::kGenerated);
  REQUIRE(wb.variant == Variant::kGenerated);
  CHECK(imaging::decode_png(h->object_bytes(ref_of(wa.image_ref))).width() == 300);
  CHECK(imaging::decode_png(h->object_bytes(ref_of(wb.image_ref))).width() == 336);
  CHECK(h->backend().calls() == 1);
}

TEST_CASE("the instrumented backend refuses calls from a request thread") {
  ServiceHarness h;
  generation::BackendRequest req;
  req.prompt = "x";
  req.width = req.height = 16;
  req.edges = imaging::EdgeMap(16, 16);
  req.mask = imaging::BitMask(16, 16);
  {
    RequestScope scope;
    CHECK(RequestScope::active());
    CHECK_THROWS_WITH_AS(h->backend().generate(req), doctest::Contains("BackendFailure"), Error);
  }
  CHECK_FALSE(RequestScope::active());
  CHECK(h->backend().inline_calls() == 1);
  CHECK_NOTHROW(h->backend().generate(req));
}

TEST_CASE("serving under concurrent load never calls the backend inline") {
  ServiceHarness h([](ServiceConfig& c) { c.workers = 2; });
  BackgroundRunner runner(*h, 2, Millis(5));
  runner.start();
  std::vector<Bytes> pngs;
  for (int i = 0; i < 4; ++i) pngs.push_back(product_png(i));
  std::atomic<int> generated{0};
  auto burst = [&] {
    std::vector<std::thread> threads;
    for (int t = 0; t < 4; ++t) {
      threads.emplace_back([&, t] {
        for (int i = 0; i < 40; ++i) {
          auto r = h->handle_creative(creative_request(pngs[static_cast<std::size_t>((t + i) % 4)], 300, 250,
                                                       std::nullopt, "u" + std::to_string(i)));
          if (r.variant == Variant::kGenerated) ++generated;
        }
      });
    }
    for (auto& t : threads) t.join();
  };
  burst();
  for (int i = 0; i < 600 && (h->store().queue_length() > 0 || h->backend().calls() < 12); ++i) {
    std::this_thread::sleep_for(std::chrono::milliseconds(50));
  }
  std::this_thread::sleep_for(std::chrono::milliseconds(200));
  burst();
  runner.stop();
  CHECK(h->backend().calls() > 0);
  CHECK(h->backend().inline_calls() == 0);
  CHECK(generated.load() > 0);
}

TEST_CASE("A/B assignment is deterministic and follows the configured split") {
  ServiceHarness h([](ServiceConfig& c) {
    c.split_bandit = 20;
    c.split_random_control = 30;
    c.split_original_only = 50;
  });
  std::map<AbGroup, int> counts;
  const int users = 20000;
  for (int i = 0; i < users; ++i) {
    const auto id = "user-" + std::to_string(i);
    const auto g = h->assign_group(id);
    CHECK(g == h->assign_group(id));
    ++counts[g];
  }
  CHECK(counts[AbGroup::kBandit] == doctest::Approx(0.2 * users).epsilon(0.05));
  CHECK(counts[AbGroup::kRandomControl] == doctest::Approx(0.3 * users).epsilon(0.05));
  CHECK(counts[AbGroup::kOriginalOnly] == doctest::Approx(0.5 * users).epsilon(0.05));

  // Request contents do not matter, only user_id and salt.
  const auto png = product_png();
  auto a = h->handle_creative(creative_request(png, 300, 250, std::nullopt, "user-7"));
  auto b = h->handle_creative(creative_request(product_png(3), 728, 90, std::nullopt, "user-7", "footwear"));
  CHECK(a.ab_group == b.ab_group);
  CHECK(a.ab_group == h->assign_group("user-7"));
}

TEST_CASE("original_only group and unknown categories never enqueue") {
  ServiceHarness h;
  const auto png = product_png();
  auto r = h->handle_creative(creative_request(png, 300, 250, AbGroup::kOriginalOnly));
  CHECK(r.variant == Variant::kOriginal);
  CHECK(r.ab_group == AbGroup::kOriginalOnly);
  CHECK_FALSE(r.prompt_id.has_value());
  CHECK(r.cache == "none");

  auto u = h->handle_creative(creative_request(png, 300, 250, AbGroup::kBandit, "u", "garden-gnomes"));
  CHECK(u.variant == Variant::kOriginal);
  CHECK_FALSE(u.prompt_id.has_value());
  CHECK(h->store().queue_length() == 0);
  CHECK(h->store().size() == 0);
}

TEST_CASE("click inside the attribution window rewards exactly once") {
  ServiceHarness h;
  auto resp = warm_bandit_response(h, product_png());
  CHECK(h->handle_feedback(resp.request_id, FeedbackEvent::kImpression) == FeedbackOutcome::kImpressionLogged);
  CHECK(h->attribution().state(resp.request_id) == RewardState::kPending);
  h.clock->advance(std::chrono::minutes(10));
  CHECK(h->handle_feedback(resp.request_id, FeedbackEvent::kClick) == FeedbackOutcome::kRewarded);
  CHECK(h->handle_feedback(resp.request_id, FeedbackEvent::kClick) == FeedbackOutcome::kDuplicate);
  CHECK(h->handle_feedback(resp.request_id, FeedbackEvent::kImpression) == FeedbackOutcome::kDuplicate);
  h.clock->advance(std::chrono::minutes(120));
  h->maintenance_tick();
  CHECK(h->bandit_updates() == 1);
  const auto stats = h->bandit().stats();
  const auto* arm = find_arm(stats, *resp.prompt_id);
  REQUIRE(arm != nullptr);
  CHECK(arm->pulls == 1);
  CHECK(arm->reward_sum == 1.0);
  const auto c = h->attribution().counters();
  CHECK(c.rewarded == 1);
  CHECK(c.expired == 0);
  CHECK(c.duplicates == 2);
}

TEST_CASE("impression without a click expires into a zero reward") {
  ServiceHarness h;
  auto resp = warm_bandit_response(h, product_png());
  h->handle_feedback(resp.request_id, FeedbackEvent::kImpression);
  h.clock->advance(std::chrono::minutes(59));
  h->maintenance_tick();
  CHECK(h->bandit_updates() == 0);
  h.clock->advance(std::chrono::minutes(2));
  h->maintenance_tick();
  CHECK(h->bandit_updates() == 1);
  CHECK(h->attribution().state(resp.request_id) == RewardState::kExpired);
  const auto* arm = find_arm(h->bandit().stats(), *resp.prompt_id);
  REQUIRE(arm != nullptr);
  CHECK(arm->pulls == 1);
  CHECK(arm->reward_sum == 0.0);
  CHECK(h->handle_feedback(resp.request_id, FeedbackEvent::kClick) == FeedbackOutcome::kDuplicate);
  CHECK(h->bandit_updates() == 1);
}

TEST_CASE("window edges: a click at exactly the window counts, a later one does not") {
  ServiceHarness h;
  const auto png = product_png();
  auto first = warm_bandit_response(h, png);
  auto second = h->handle_creative(creative_request(png, 300, 250));
  h->handle_feedback(first.request_id, FeedbackEvent::kImpression);
  h->handle_feedback(second.request_id, FeedbackEvent::kImpression);
  h.clock->advance(std::chrono::minutes(60));
  CHECK(h->handle_feedback(first.request_id, FeedbackEvent::kClick) == FeedbackOutcome::kRewarded);
  h.clock->advance(Millis(1));
  CHECK(h->handle_feedback(second.request_id, FeedbackEvent::kClick) == FeedbackOutcome::kLateClick);
  CHECK(h->attribution().state(second.request_id) == RewardState::kExpired);
  const auto c = h->attribution().counters();
  CHECK(c.rewarded == 1);
  CHECK(c.expired == 1);
  CHECK(h->bandit_updates() == 2);
}

TEST_CASE("control group and original variants are logged but never train") {
  ServiceHarness h;
  const auto png = product_png();
  auto cold = h->handle_creative(creative_request(png, 300, 250));
  REQUIRE(cold.variant == Variant::kOriginal);
  h->handle_feedback(cold.request_id, FeedbackEvent::kImpression);
  h->handle_feedback(cold.request_id, FeedbackEvent::kClick);

  auto control_cold = h->handle_creative(creative_request(png, 300, 250, AbGroup::kRandomControl));
  h->run_pending_jobs();
  auto control = h->handle_creative(creative_request(png, 300, 250, AbGroup::kRandomControl));
  REQUIRE(control.variant == Variant::kGenerated);
  h->handle_feedback(control.request_id, FeedbackEvent::kImpression);
  h->handle_feedback(control.request_id, FeedbackEvent::kClick);
  h.clock->advance(std::chrono::hours(3));
  h->maintenance_tick();

  CHECK(h->bandit_updates() == 0);
  CHECK(h->bandit().stats().empty());
  CHECK(h->attribution().counters().rewarded == 2);
}

TEST_CASE("unknown request ids are ignored and a bare click implies its impression") {
  ServiceHarness h;
  CHECK(h->handle_feedback("nope", FeedbackEvent::kClick) == FeedbackOutcome::kUnknownRequest);
  CHECK_THROWS_AS(h->handle_feedback("", FeedbackEvent::kClick), Error);
  auto resp = warm_bandit_response(h, product_png());
  CHECK(h->handle_feedback(resp.request_id, FeedbackEvent::kClick) == FeedbackOutcome::kRewarded);
  CHECK(h->bandit_updates() == 1);
  CHECK(h->attribution().counters().unknown == 1);
}

TEST_CASE("every bandit update matches one settled bandit-group impression") {
  ServiceHarness h;
  const auto png = product_png();
  warm_bandit_response(h, png);
  std::mt19937_64 rng(404);
  std::vector<CreativeResponse> served;
  std::set<std::string> trainable_impressions;
  for (int i = 0; i < 300; ++i) {
    const auto group = rng() % 2 == 0 ? AbGroup::kBandit : AbGroup::kRandomControl;
    const auto which = static_cast<int>(rng() % 3);
    auto r = h->handle_creative(creative_request(which == 0 ? product_png(5) : png, 300, 250, group));
    served.push_back(r);
    if (rng() % 4 == 0) h->run_pending_jobs();
    const auto& pick = served[rng() % served.size()];
    const auto event = rng() % 3 == 0 ? FeedbackEvent::kClick : FeedbackEvent::kImpression;
    const auto outcome = h->handle_feedback(pick.request_id, event);
    if (outcome != FeedbackOutcome::kUnknownRequest && pick.ab_group == AbGroup::kBandit &&
        pick.variant == Variant::kGenerated) {
      trainable_impressions.insert(pick.request_id);
    }
    h.clock->advance(Millis(static_cast<std::int64_t>(rng() % 120'000)));
    if (rng() % 10 == 0) h->maintenance_tick();
  }
  h.clock->advance(std::chrono::hours(2));
  h->maintenance_tick();

  std::uint64_t pulls = 0;
  for (const auto& s : h->bandit().stats()) pulls += s.pulls;
  CHECK(h->bandit_updates() == trainable_impressions.size());
  CHECK(pulls == trainable_impressions.size());
  for (const auto& id : trainable_impressions) {
    const auto st = h->attribution().state(id);
    if (st) CHECK(*st != RewardState::kPending);
  }
}

TEST_CASE("callback: one delivery on success") {
  CallbackReceiver receiver;
  ServiceHarness h;
  auto req = creative_request(product_png(), 300, 250);
  req.callback_url = receiver.url();
  auto cold = h->handle_creative(req);
  h->handle_creative(req);
  CHECK(h->callbacks().subscriptions() == 1);
  h->run_pending_jobs();
  h->callbacks().wait_idle();
  CHECK(receiver.deliveries() == 1);
  const auto bodies = receiver.accepted();
  REQUIRE(bodies.size() == 1);
  CHECK(bodies[0]["status"] == "ready");
  CHECK(bodies[0]["image_hash"] == cold.key->image_hash);
  CHECK(bodies[0]["prompt_id"] == *cold.prompt_id);
  CHECK(bodies[0]["bucket"] == 1);
  CHECK(bodies[0]["image_ref"].get<std::string>().rfind("http://cdn.test/v1/objects/", 0) == 0);
  CHECK(h->callbacks().subscriptions() == 0);
}

TEST_CASE("callback: one injected fault gives two deliveries, same body") {
  CallbackReceiver receiver(1);
  ServiceHarness h;
  auto req = creative_request(product_png(), 300, 250);
  req.callback_url = receiver.url();
  h->handle_creative(req);
  h->run_pending_jobs();
  h->callbacks().wait_idle();
  CHECK(receiver.deliveries() == 2);
  CHECK(receiver.accepted().size() == 1);
  CHECK(h->callbacks().stats().delivered == 1);
  CHECK(h->callbacks().stats().attempts == 2);
}

TEST_CASE("callback: receiver that never recovers is abandoned after the retries") {
  CallbackReceiver receiver(100);
  ServiceHarness h;
  auto req = creative_request(product_png(), 300, 250);
  req.callback_url = receiver.url();
  h->handle_creative(req);
  h->run_pending_jobs();
  h->callbacks().wait_idle();
  CHECK(receiver.deliveries() == 4);
  CHECK(h->callbacks().stats().failed == 1);
}

TEST_CASE("callback: a terminal failure carries status failed") {
  CallbackReceiver receiver;
  ServiceHarness h;
  const auto blank = imaging::encode_png(imaging::RasterImage(64, 64, imaging::Rgba{255, 255, 255, 255}));
  auto req = creative_request(blank, 300, 250);
  req.callback_url = receiver.url();
  auto r = h->handle_creative(req);
  CHECK(h->run_pending_jobs() == 1);
  h->callbacks().wait_idle();
  const auto rec = h->store().get(*r.key);
  REQUIRE(rec.has_value());
  CHECK(rec->status == store::CreativeStatus::kFailed);
  CHECK(rec->attempts == 1);
  const auto bodies = receiver.accepted();
  REQUIRE(bodies.size() == 1);
  CHECK(bodies[0]["status"] == "failed");
  CHECK(bodies[0]["image_ref"].is_null());
  auto after = h->handle_creative(creative_request(blank, 300, 250));
  CHECK(after.cache == "failed");
  CHECK(after.variant == Variant::kOriginal);
  CHECK_FALSE(after.prompt_id.has_value());
}

TEST_CASE("review: reject retracts, regenerate yields new bytes, approve needs ready") {
  ServiceHarness h;
  const auto png = product_png();
  auto cold = h->handle_creative(creative_request(png, 512, 512));
  const auto key = *cold.key;
  CHECK_THROWS_WITH_AS(h->approve(key), doctest::Contains("IllegalTransition"), Error);
  h->run_pending_jobs();

  auto pending = h->pending_review(10);
  REQUIRE(pending.size() == 1);
  CHECK(pending[0].key == key);
  const auto item = h->review_item(pending[0]);
  CHECK(item["status"] == "ready");
  CHECK(item["prompt_text"].is_string());
  CHECK(item["original_url"] == cold.image_ref);

  auto served = h->handle_creative(creative_request(png, 512, 512));
  REQUIRE(served.variant == Variant::kGenerated);
  const auto first_bytes = h->object_bytes(ref_of(served.image_ref));

  h->reject(key);
  auto after_reject = h->handle_creative(creative_request(png, 512, 512));
  CHECK(after_reject.variant == Variant::kOriginal);
  CHECK(after_reject.cache == "rejected");
  CHECK(h->pending_review(10).empty());
  CHECK_THROWS_AS(h->reject(key), Error);

  auto requeued = h->regenerate(key);
  CHECK(requeued.status == store::CreativeStatus::kQueued);
  CHECK(requeued.revision == 1);
  auto while_queued = h->handle_creative(creative_request(png, 512, 512));
  CHECK(while_queued.variant == Variant::kOriginal);
  CHECK_THROWS_WITH_AS(h->approve(key), doctest::Contains("IllegalTransition"), Error);
  CHECK(h->run_pending_jobs() == 1);

  auto regenerated = h->handle_creative(creative_request(png, 512, 512));
  REQUIRE(regenerated.variant == Variant::kGenerated);
  CHECK(h->object_bytes(ref_of(regenerated.image_ref)) != first_bytes);

  auto approved = h->approve(key);
  CHECK_FALSE(approved.review_pending);
  CHECK(h->pending_review(10).empty());
}

TEST_CASE("pre-moderation holds creatives and callbacks until approval") {
  CallbackReceiver receiver;
  ServiceHarness h([](ServiceConfig& c) { c.moderation = ModerationMode::kPre; });
  const auto png = product_png();
  auto req = creative_request(png, 300, 250);
  req.callback_url = receiver.url();
  auto cold = h->handle_creative(req);
  h->run_pending_jobs();
  h->callbacks().wait_idle();
  CHECK(receiver.deliveries() == 0);

  auto held = h->handle_creative(creative_request(png, 300, 250));
  CHECK(held.variant == Variant::kOriginal);
  CHECK(held.cache == "pending_review");
  CHECK(held.prompt_id == cold.prompt_id);

  h->approve(*cold.key);
  h->callbacks().wait_idle();
  CHECK(receiver.deliveries() == 1);
  CHECK(h->handle_creative(creative_request(png, 300, 250)).variant == Variant::kGenerated);
}

TEST_CASE("moderation off publishes without review flags") {
  ServiceHarness h([](ServiceConfig& c) { c.moderation = ModerationMode::kOff; });
  h->handle_creative(creative_request(product_png(), 300, 250));
  h->run_pending_jobs();
  CHECK(h->pending_review(10).empty());
}

TEST_CASE("A/B report with no traffic is zero with null statistics") {
  ServiceHarness h;
  const auto r = h->ab_report();
  CHECK(r["total_requests"] == 0);
  for (const char* g : {"bandit", "random_control", "original_only"}) {
    CHECK(r["groups"][g]["impressions"] == 0);
    CHECK(r["groups"][g]["ctr"].is_null());
  }
  CHECK(r["p"].is_null());
  CHECK(r["z"].is_null());
  CHECK(r["relative_gain"].is_null());
}

TEST_CASE("A/B report matches counts computed by hand") {
  ServiceHarness h;
  const auto png = product_png();
  struct Plan {
    AbGroup group;
    int requests;
    int impressions;
    int clicks;
  };
  const Plan plans[] = {{AbGroup::kBandit, 60, 50, 9}, {AbGroup::kRandomControl, 50, 40, 4},
                        {AbGroup::kOriginalOnly, 10, 10, 1}};
  for (const auto& p : plans) {
    for (int i = 0; i < p.requests; ++i) {
      auto r = h->handle_creative(creative_request(png, 300, 250, p.group, "u" + std::to_string(i)));
      if (i < p.impressions) h->handle_feedback(r.request_id, FeedbackEvent::kImpression);
      if (i < p.clicks) h->handle_feedback(r.request_id, FeedbackEvent::kClick);
      if (i < p.clicks) h->handle_feedback(r.request_id, FeedbackEvent::kClick);
    }
  }
  const auto r = h->ab_report();
  CHECK(r["total_requests"] == 120);
  double share = 0.0;
  for (const auto& p : plans) {
    const auto& g = r["groups"][to_string(p.group)];
    CHECK(g["requests"] == p.requests);
    CHECK(g["impressions"] == p.impressions);
    CHECK(g["clicks"] == p.clicks);
    CHECK(g["ctr"].get<double>() == doctest::Approx(static_cast<double>(p.clicks) / p.impressions));
    share += g["request_share"].get<double>();
  }
  CHECK(share == doctest::Approx(1.0));
  const auto t = evalsim::two_prop_ztest(9, 50, 4, 40);
  CHECK(r["z"].get<double>() == doctest::Approx(t.z).epsilon(1e-12));
  CHECK(r["p"].get<double>() == doctest::Approx(t.p_two_sided).epsilon(1e-12));
  CHECK(r["relative_gain"].get<double>() == doctest::Approx((9.0 / 50) / (4.0 / 40) - 1));
  CHECK(r["timeline"].is_array());

  h.clock->advance(std::chrono::hours(2));
  const auto recent = h->ab_report(std::chrono::minutes(30));
  CHECK(recent["total_requests"] == 0);
  CHECK(recent["window_minutes"] == 30.0);
}

TEST_CASE("bandit stats list every prompt of every category") {
  ServiceHarness h;
  auto fresh = h->bandit_stats();
  CHECK(fresh["total_updates"] == 0);
  CHECK(fresh["total_pulls"] == 0);
  std::size_t arms = 0;
  for (const auto& cat : fresh["categories"]) {
    for (const auto& arm : cat["arms"]) {
      CHECK(arm["pulls"] == 0);
      CHECK(arm["estimated_ctr"].is_null());
      ++arms;
    }
  }
  CHECK(arms == h->prompts().size());

  auto resp = warm_bandit_response(h, product_png());
  h->handle_feedback(resp.request_id, FeedbackEvent::kClick);
  auto after = h->bandit_stats();
  CHECK(after["total_updates"] == 1);
  CHECK(after["total_pulls"] == 1);
}

TEST_CASE("bandit state and creatives survive a restart") {
  ServiceHarness h;
  const auto png = product_png();
  auto resp = warm_bandit_response(h, png);
  h->handle_feedback(resp.request_id, FeedbackEvent::kClick);
  const auto probe = h->handle_creative(creative_request(png, 300, 250));
  const auto before = h->bandit_stats();
  h.restart();
  CHECK(h->bandit_stats()["categories"] == before["categories"]);
  CHECK(h->handle_creative(creative_request(png, 300, 250)).prompt_id == probe.prompt_id);
  const auto rec = h->store().get(*resp.key);
  REQUIRE(rec.has_value());
  CHECK(rec->status == store::CreativeStatus::kReady);
  CHECK_NOTHROW(h->object_bytes(*rec->object_ref));
  auto control = h->handle_creative(creative_request(png, 300, 250, AbGroup::kRandomControl));
  CHECK(h->backend().calls() == 0);
  CHECK(control.ab_group == AbGroup::kRandomControl);
}

TEST_CASE("jobs left in the queue at shutdown run after a restart") {
  ServiceHarness h;
  const auto png = product_png();
  h->handle_creative(creative_request(png, 300, 250));
  h.restart();
  CHECK(h->store().queue_length() == 1);
  CHECK(h->run_pending_jobs() == 1);
  CHECK(h->handle_creative(creative_request(png, 300, 250)).variant == Variant::kGenerated);
}

TEST_CASE("a full queue fails open to the original") {
  ServiceHarness h([](ServiceConfig& c) { c.max_queue = 1; });
  auto a = h->handle_creative(creative_request(product_png(1), 300, 250));
  auto b = h->handle_creative(creative_request(product_png(2), 300, 250));
  CHECK(a.cache == "enqueued");
  CHECK(b.cache == "none");
  CHECK(b.variant == Variant::kOriginal);
  CHECK_FALSE(b.prompt_id.has_value());
}

TEST_CASE("image URLs: fetch failures pass the URL through") {
  adgen::testing::StubServer images;
  const auto png = product_png();
  images.server().Get("/p.png", [&](const httplib::Request&, httplib::Response& res) {
    res.set_content(std::string(png.begin(), png.end()), "image/png");
  });
  images.server().Get("/text", [](const httplib::Request&, httplib::Response& res) {
    res.set_content("hello", "text/plain");
  });
  images.start();
  ServiceHarness h;

  auto req = creative_request(png, 300, 250);
  req.product.image_bytes.reset();
  req.product.image_url = images.url() + "/p.png";
  auto ok = h->handle_creative(req);
  CHECK(ok.cache == "enqueued");
  CHECK(ok.image_ref == *req.product.image_url);
  CHECK(ok.key->image_hash == sha256_hex(png));

  for (const std::string url : {images.url() + "/missing.png", images.url() + "/text",
                                std::string("http://127.0.0.1:1/x.png"), std::string("file:///etc/hostname")}) {
    req.product.image_url = url;
    auto r = h->handle_creative(req);
    CHECK(r.variant == Variant::kOriginal);
    CHECK(r.image_ref == url);
    CHECK_FALSE(r.prompt_id.has_value());
  }
}

TEST_CASE("file URLs work once enabled") {
  ServiceHarness h([](ServiceConfig& c) { c.allow_file_urls = true; });
  const auto path = h.dir / "p.png";
  const auto png = product_png();
  store::write_file_atomic(path, png);
  auto req = creative_request(png, 300, 250);
  req.product.image_bytes.reset();
  req.product.image_url = "file://" + path.string();
  CHECK(h->handle_creative(req).cache == "enqueued");
}

TEST_CASE("request validation and JSON wire format") {
  const auto png = product_png();
  json body = {{"product", {{"id", "p"}, {"category", "apparel"}, {"image_base64", base64_encode(png)},
                            {"attributes", {{"color", "red"}, {"price", 19.5}}}}},
               {"placement", {{"id", "mrec"}, {"width", 300}, {"height", 250}}},
               {"user", {{"user_id", "u1"}, {"features", {{"segment", "s1"}, {"returning", true}}}}},
               {"callback_url", "http://rec.local/cb"},
               {"ab_override", "random_control"}};
  auto req = creative_request_from_json(body);
  CHECK(req.product.image_bytes == png);
  CHECK(req.product.attributes.at("price") == "19.5");
  CHECK(req.user_features.at("returning") == "true");
  CHECK(req.ab_override == AbGroup::kRandomControl);
  CHECK(creative_request_from_json(to_json(req)).placement.width == 300);

  auto bad = [&](auto mutate) {
    json b = body;
    mutate(b);
    CHECK_THROWS_WITH_AS(creative_request_from_json(b), doctest::Contains("BadRequest"), Error);
  };
  bad([](json& b) { b["product"]["image_url"] = "http://x/p.png"; });
  bad([](json& b) { b["product"].erase("image_base64"); });
  bad([](json& b) { b["product"]["image_base64"] = "***"; });
  bad([](json& b) { b["placement"]["width"] = 8; });
  bad([](json& b) { b["placement"].erase("height"); });
  bad([](json& b) { b["callback_url"] = "ftp://x"; });
  bad([](json& b) { b["ab_override"] = "treatment"; });
  bad([](json& b) { b["user"]["features"] = json::array({1}); });

  ServiceHarness h;
  auto not_png = creative_request(Bytes{'G', 'I', 'F', '8'}, 300, 250);
  CHECK_THROWS_WITH_AS(h->handle_creative(not_png), doctest::Contains("BadRequest"), Error);
}

TEST_CASE("config: JSON, validation and environment overrides") {
  ServiceConfig defaults;
  CHECK_NOTHROW(defaults.validate());
  auto round = config_from_json(to_json(defaults));
  CHECK(to_json(round) == to_json(defaults));

  auto cfg = config_from_json({{"splits", {{"bandit", 40}, {"random_control", 40}, {"original_only", 20}}},
                               {"alpha", 0.5},
                               {"dimension", 48},
                               {"attribution_window_minutes", 30},
                               {"bucket", {{"min_width", 320}}},
                               {"layout", {{"max_fill_fraction", 0.5}, {"background", "white"}}},
                               {"backend", "http://gpu:7860"},
                               {"moderation_mode", "pre"}});
  CHECK(cfg.split_original_only == 20);
  CHECK(cfg.alpha == 0.5);
  CHECK(cfg.feature_spec.dimension == 48);
  CHECK(cfg.attribution_window == std::chrono::minutes(30));
  CHECK(cfg.bucket.min_width == 320);
  CHECK(cfg.layout.background == imaging::Background::kWhite);
  CHECK(cfg.moderation == ModerationMode::kPre);
  CHECK_NOTHROW(cfg.validate());

  CHECK_THROWS_WITH_AS(config_from_json({{"aplha", 1}}), doctest::Contains("aplha"), Error);
  CHECK_THROWS_AS(config_from_json({{"moderation_mode", "sometimes"}}), Error);
  CHECK_THROWS_AS(config_from_json({{"splits", {{"bandit", 90}}}}).validate(), Error);
  CHECK_THROWS_AS(config_from_json({{"backend", "ftp://x"}}).validate(), Error);
  CHECK_THROWS_AS(config_from_json({{"dimension", 4}}).validate(), Error);

  std::map<std::string, std::string> env = {{"ADGEN_PORT", "9090"},
                                            {"ADGEN_SPLITS", "bandit=10,random_control=10,original_only=80"},
                                            {"ADGEN_MODERATION", "off"},
                                            {"ADGEN_WINDOW_MINUTES", "5"},
                                            {"ADGEN_DATA_DIR", "/tmp/x"}};
  EnvLookup lookup = [&](const std::string& k) -> std::optional<std::string> {
    auto it = env.find(k);
    return it == env.end() ? std::nullopt : std::optional(it->second);
  };
  adgen::testing::TempDir dir;
  const auto path = dir / "config.json";
  std::ofstream(path) << json{{"port", 1234}, {"alpha", 2.0}}.dump();
  auto loaded = load_config(path, lookup);
  CHECK(loaded.port == 9090);
  CHECK(loaded.alpha == 2.0);
  CHECK(loaded.split_original_only == 80);
  CHECK(loaded.moderation == ModerationMode::kOff);
  CHECK(loaded.attribution_window == std::chrono::minutes(5));
  CHECK(loaded.data_dir == "/tmp/x");

  env["ADGEN_PORT"] = "nine";
  CHECK_THROWS_AS(load_config(path, lookup), Error);
  env["ADGEN_PORT"] = "9090";
  env["ADGEN_SPLITS"] = "bandit=10";
  CHECK_THROWS_AS(load_config(path, lookup), Error);
  CHECK_THROWS_AS(load_config(dir / "missing.json", lookup), Error);
}

TEST_CASE("HTTP API end to end") {
  ServiceHarness h;
  HttpServer server(*h);
  const int port = server.start("127.0.0.1", 0);
  httplib::Client client("127.0.0.1", port);
  auto post = [&](const std::string& path, const json& body) {
    return client.Post(path, body.dump(), "application/json");
  };

  auto health = client.Get("/healthz");
  REQUIRE(health);
  CHECK(health->status == 200);
  CHECK(json::parse(health->body) == json{{"status", "ok"}});

  const auto png = product_png();
  json body = to_json(creative_request(png, 300, 250));
  auto cold = post("/v1/creative", body);
  REQUIRE(cold);
  CHECK(cold->status == 200);
  const auto cold_json = json::parse(cold->body);
  CHECK(cold_json["variant"] == "original");
  CHECK(cold_json["ab_group"] == "bandit");
  CHECK(cold_json["prompt_id"].is_string());
  CHECK(cold_json["request_id"].get<std::string>().size() == 32);

  const std::string key_path = "/v1/review/" + sha256_hex(png) + "/" + cold_json["prompt_id"].get<std::string>() + "/1";
  auto early = client.Post(key_path + "/approve");
  REQUIRE(early);
  CHECK(early->status == 409);
  CHECK(json::parse(early->body)["error"] == "IllegalTransition");

  h->run_pending_jobs();
  auto warm = post("/v1/creative", body);
  const auto warm_json = json::parse(warm->body);
  CHECK(warm_json["variant"] == "generated");

  const std::string image_ref = warm_json["image_ref"];
  auto object = client.Get(image_ref.substr(std::string("http://cdn.test").size()));
  REQUIRE(object);
  CHECK(object->status == 200);
  CHECK(object->get_header_value("Content-Type") == "image/png");
  CHECK(imaging::decode_png(Bytes(object->body.begin(), object->body.end())).width() == 300);
  CHECK(client.Get("/v1/objects/" + std::string(64, 'a') + ".png")->status == 404);

  auto fb = post("/v1/feedback", {{"request_id", warm_json["request_id"]}, {"event", "click"}});
  CHECK(fb->status == 200);
  CHECK(json::parse(fb->body)["outcome"] == "rewarded");
  CHECK(post("/v1/feedback", {{"request_id", "x"}, {"event", "view"}})->status == 400);
  CHECK(json::parse(post("/v1/feedback", {{"request_id", "x"}, {"event", "click"}})->body)["outcome"] ==
        "unknown_request");

  auto pending = client.Get("/v1/review/pending?limit=5");
  CHECK(pending->status == 200);
  CHECK(json::parse(pending->body)["count"] == 1);
  CHECK(client.Get("/v1/review/pending?limit=abc")->status == 400);
  CHECK(client.Get("/v1/review/pending?limit=0")->status == 400);

  auto rejected = client.Post(key_path + "/reject");
  CHECK(rejected->status == 200);
  CHECK(json::parse(rejected->body)["status"] == "rejected");
  CHECK(json::parse(post("/v1/creative", body)->body)["variant"] == "original");
  CHECK(client.Post("/v1/review/" + std::string(64, 'b') + "/apparel-studio/1/reject")->status == 404);
  CHECK(json::parse(client.Post(key_path + "/regenerate")->body)["status"] == "queued");

  auto stats = client.Get("/v1/bandit/stats");
  CHECK(stats->status == 200);
  CHECK(json::parse(stats->body)["total_updates"] == 1);

  auto report = client.Get("/v1/ab/report");
  CHECK(report->status == 200);
  CHECK(json::parse(report->body)["groups"]["bandit"]["requests"] == 3);
  CHECK(client.Get("/v1/ab/report?window_minutes=60")->status == 200);
  CHECK(client.Get("/v1/ab/report?window_minutes=-1")->status == 400);

  CHECK(client.Post("/v1/creative", "{not json", "application/json")->status == 400);
  json bad = body;
  bad["placement"]["width"] = 5;
  auto bad_res = post("/v1/creative", bad);
  CHECK(bad_res->status == 400);
  CHECK(json::parse(bad_res->body)["error"] == "BadRequest");
  server.stop();
}
