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

// adgen command line: serve, generate, simulate, report.

#include <pthread.h>

#include <atomic>
#include <csignal>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>

#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "adgen/common/error.hpp"
#include "adgen/common/hash.hpp"
#include "adgen/evalsim/report.hpp"
#include "adgen/evalsim/simulator.hpp"
#include "adgen/generation/mock_backend.hpp"
#include "adgen/generation/pipeline.hpp"
#include "adgen/imaging/png.hpp"
#include "adgen/service/config.hpp"
#include "adgen/service/creative_service.hpp"
#include "adgen/service/http_api.hpp"
#include "adgen/service/workers.hpp"
#include "adgen/store/creative_store.hpp"
#include "adgen/store/object_store.hpp"
#include "json.hpp"

namespace {

using namespace adgen;
using nlohmann::json;

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kNotFound, "cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kInvalidArgument, path + ": " + e.what());
  }
}

void write_text(const std::string& path, const std::string& text) {
  store::write_file_atomic(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

int run_serve(const std::optional<std::string>& config_path) {
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  auto cfg = service::load_config(config_path ? std::optional<std::filesystem::path>(*config_path) : std::nullopt);
  spdlog::info("data dir {}, backend {}, moderation {}", cfg.data_dir.string(), cfg.backend,
               service::to_string(cfg.moderation));
  service::CreativeService svc(cfg);
  service::BackgroundRunner runner(svc, cfg.workers, cfg.maintenance_interval);
  service::HttpServer http(svc);
  runner.start();

  std::atomic<bool> signalled{false};
  std::thread waiter([&] {
    int sig = 0;
    sigwait(&signals, &sig);
    signalled = true;
    spdlog::info("signal {}, shutting down", sig);
    http.stop();
  });
  auto release_waiter = [&] {
    if (!signalled) pthread_kill(waiter.native_handle(), SIGTERM);
    waiter.join();
  };
  spdlog::info("listening on {}:{}", cfg.host, cfg.port);
  try {
    http.listen(cfg.host, cfg.port);
  } catch (...) {
    release_waiter();
    runner.stop();
    throw;
  }
  release_waiter();
  runner.stop();
  svc.shutdown();
  return 0;
}

struct GenerateArgs {
  std::string image;
  std::string prompt_id;
  int width = 0;
  int height = 0;
  std::string out;
  std::optional<std::string> prompts;
  std::optional<std::uint64_t> seed;
};

int run_generate(const GenerateArgs& a) {
  const Bytes bytes = store::read_file(a.image);
  const auto product = imaging::decode_png(bytes);
  const auto pool = a.prompts ? generation::prompt_pool_from_json(read_json(*a.prompts))
                              : generation::default_prompt_pool();
  const auto& prompt = pool.by_id(a.prompt_id);
  const imaging::PlacementSpec placement{"cli", a.width, a.height};
  placement.validate();
  const generation::PipelineConfig cfg;
  const auto bucket = imaging::aspect_bucket(placement, cfg.bucket);
  const store::CacheKey key{sha256_hex(bytes), prompt.prompt_id, bucket.index};
  const std::uint64_t seed = a.seed.value_or(store::job_seed(key, 0));

  generation::MockBackend backend;
  const auto result = generation::run_pipeline(product, std::nullopt, prompt, placement, cfg, backend, seed);
  const Bytes png = imaging::encode_png(result.creative);
  store::write_file_atomic(a.out, png);
  std::cout << json{{"out", a.out},
                    {"key", key.to_string()},
                    {"seed", seed},
                    {"canonical", {result.canonical.bucket.canonical_width, result.canonical.bucket.canonical_height}},
                    {"sha256", sha256_hex(png)}}
                   .dump()
            << "\n";
  return 0;
}

int run_simulate(const evalsim::SimConfig& cfg, const std::optional<std::string>& out, bool as_json) {
  const auto trace = evalsim::simulate(cfg);
  const auto report = evalsim::summarize(trace);
  if (out) write_text(*out, evalsim::trace_to_json(trace).dump() + "\n");
  std::cout << (as_json ? evalsim::to_json(report).dump(2) + "\n" : evalsim::to_text(report));
  return 0;
}

int run_report(const std::optional<std::string>& journal, const std::optional<std::string>& in,
               std::optional<double> window_minutes, bool as_json) {
  evalsim::Report report;
  if (in) {
    report = evalsim::summarize(evalsim::trace_from_json(read_json(*in)));
  } else {
    std::int64_t since = 0;
    if (window_minutes) {
      since = to_unix_millis(SystemClock().now()) - static_cast<std::int64_t>(*window_minutes * 60'000.0);
    }
    report = evalsim::summarize_feedback_journal(*journal, since);
  }
  std::cout << (as_json ? evalsim::to_json(report).dump(2) + "\n" : evalsim::to_text(report));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"adgen: product creatives with generated backgrounds, personalized by a contextual bandit"};
  app.require_subcommand(1);
  std::string log_level = "info";
  app.add_option("--log-level", log_level, "trace, debug, info, warn, error or off")->capture_default_str();

  std::optional<std::string> config_path;
  auto* serve = app.add_subcommand("serve", "Run the HTTP service");
  serve->add_option("--config", config_path, "JSON config file; ADGEN_* variables override it");

  GenerateArgs gen;
  auto* generate = app.add_subcommand("generate", "One-shot pipeline with the mock backend");
  generate->add_option("--image", gen.image, "Product PNG")->required();
  generate->add_option("--prompt-id", gen.prompt_id, "Prompt id from the pool")->required();
  generate->add_option("--width", gen.width, "Placement width")->required();
  generate->add_option("--height", gen.height, "Placement height")->required();
  generate->add_option("--out", gen.out, "Output PNG")->required();
  generate->add_option("--prompts", gen.prompts, "Prompt pool JSON (default: built-in pool)");
  generate->add_option("--seed", gen.seed, "Override the key-derived seed");

  evalsim::SimConfig sim;
  std::optional<std::string> sim_out;
  bool sim_json = false;
  auto* simulate = app.add_subcommand("simulate", "Paired bandit vs random-control simulation");
  simulate->add_option("--seed", sim.seed)->capture_default_str();
  simulate->add_option("--impressions", sim.impressions)->capture_default_str();
  simulate->add_option("--arms", sim.arms)->capture_default_str();
  simulate->add_option("--dominant-gap", sim.dominant_gap, "CTR advantage of the dominant arm")->capture_default_str();
  simulate->add_option("--alpha", sim.alpha)->capture_default_str();
  simulate->add_flag("--identical-arms", sim.identical_arms, "Every arm shares one weight vector");
  simulate->add_option("--out", sim_out, "Write the trace JSON here");
  simulate->add_flag("--json", sim_json, "Print the report as JSON");

  std::optional<std::string> journal;
  std::optional<std::string> trace_in;
  std::optional<double> window_minutes;
  bool report_json = false;
  auto* report = app.add_subcommand("report", "A/B report from a feedback journal or a simulation trace");
  auto* journal_opt = report->add_option("--journal", journal, "Service feedback journal (feedback.jsonl)");
  auto* in_opt = report->add_option("--in", trace_in, "Simulation trace JSON");
  journal_opt->excludes(in_opt);
  report->add_option("--window-minutes", window_minutes, "Only the most recent span of the journal");
  report->add_flag("--json", report_json, "Print JSON");

  CLI11_PARSE(app, argc, argv);
  spdlog::set_level(spdlog::level::from_str(log_level));

  try {
    if (*serve) return run_serve(config_path);
    if (*generate) return run_generate(gen);
    if (*simulate) {
      sim.validate();
      return run_simulate(sim, sim_out, sim_json);
    }
    if (*report) {
      if (!journal && !trace_in) throw Error(ErrorCode::kInvalidArgument, "report needs --journal or --in");
      return run_report(journal, trace_in, window_minutes, report_json);
    }
  } catch (const Error& e) {
    spdlog::error("{}", e.what());
    return 2;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return 1;
  }
  return 0;
}
