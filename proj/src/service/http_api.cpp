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

#include "adgen/service/http_api.hpp"

#include <spdlog/spdlog.h>

#include "adgen/common/error.hpp"
#include "httplib.h"

namespace adgen::service {

using nlohmann::json;

int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::kBadRequest:
    case ErrorCode::kInvalidArgument: return 400;
    case ErrorCode::kNotFound: return 404;
    case ErrorCode::kIllegalTransition: return 409;
    case ErrorCode::kQueueFull: return 503;
    default: return 500;
  }
}

namespace {

void reply(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void reply_error(httplib::Response& res, ErrorCode code, const std::string& message) {
  reply(res, http_status(code), {{"error", to_string(code)}, {"message", message}});
}

/// Runs `fn` and turns failures into JSON error replies.
template <typename Fn>
httplib::Server::Handler guarded(Fn fn) {
  return [fn](const httplib::Request& req, httplib::Response& res) {
    try {
      fn(req, res);
    } catch (const Error& e) {
      if (http_status(e.code()) >= 500) spdlog::error("{} {}: {}", req.method, req.path, e.what());
      reply_error(res, e.code(), e.what());
    } catch (const json::exception& e) {
      reply_error(res, ErrorCode::kBadRequest, std::string("malformed JSON: ") + e.what());
    } catch (const std::exception& e) {
      spdlog::error("{} {}: {}", req.method, req.path, e.what());
      reply(res, 500, {{"error", "Internal"}, {"message", e.what()}});
    }
  };
}

json parse_body(const httplib::Request& req) {
  try {
    return json::parse(req.body);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kBadRequest, std::string("body is not JSON: ") + e.what());
  }
}

template <typename T>
T query_number(const httplib::Request& req, const std::string& name, T fallback) {
  if (!req.has_param(name)) return fallback;
  const std::string text = req.get_param_value(name);
  try {
    std::size_t used = 0;
    T v{};
    if constexpr (std::is_floating_point_v<T>) {
      v = static_cast<T>(std::stod(text, &used));
    } else {
      v = static_cast<T>(std::stoll(text, &used));
    }
    if (used != text.size()) throw std::invalid_argument(name);
    return v;
  } catch (const std::logic_error&) {
    throw Error(ErrorCode::kBadRequest, name + " must be a number, got '" + text + "'");
  }
}

}  // namespace

void mount_routes(httplib::Server& server, CreativeService& service) {
  server.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                              {"Access-Control-Allow-Headers", "Content-Type"},
                              {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"}});
  server.Options(R"(/.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });

  server.Get("/healthz", guarded([](const httplib::Request&, httplib::Response& res) {
               reply(res, 200, {{"status", "ok"}});
             }));

  server.Post("/v1/creative", guarded([&service](const httplib::Request& req, httplib::Response& res) {
                const auto request = creative_request_from_json(parse_body(req));
                reply(res, 200, to_json(service.handle_creative(request)));
              }));

  server.Post("/v1/feedback", guarded([&service](const httplib::Request& req, httplib::Response& res) {
                const auto body = parse_body(req);
                if (!body.is_object() || !body.contains("request_id") || !body.contains("event")) {
                  throw Error(ErrorCode::kBadRequest, "feedback needs request_id and event");
                }
                const auto id = body["request_id"].get<std::string>();
                const auto event = feedback_event_from_string(body["event"].get<std::string>());
                const auto outcome = service.handle_feedback(id, event);
                reply(res, 200, {{"request_id", id}, {"outcome", to_string(outcome)}});
              }));

  server.Get("/v1/review/pending", guarded([&service](const httplib::Request& req, httplib::Response& res) {
               const auto limit = query_number<long long>(req, "limit", 50);
               if (limit < 1 || limit > 1000) throw Error(ErrorCode::kBadRequest, "limit must be in [1, 1000]");
               json items = json::array();
               for (const auto& rec : service.pending_review(static_cast<std::size_t>(limit))) {
                 items.push_back(service.review_item(rec));
               }
               reply(res, 200, {{"items", items}, {"count", items.size()}});
             }));

  server.Post(R"(/v1/review/([0-9a-f]{64})/([^/]+)/(-?[0-9]+)/(approve|reject|regenerate))",
              guarded([&service](const httplib::Request& req, httplib::Response& res) {
                store::CacheKey key{req.matches[1], req.matches[2], 0};
                try {
                  key.bucket = std::stoi(req.matches[3]);
                } catch (const std::logic_error&) {
                  throw Error(ErrorCode::kBadRequest, "bad bucket");
                }
                const std::string action = req.matches[4];
                store::CreativeRecord rec;
                if (action == "approve") {
                  rec = service.approve(key);
                } else if (action == "reject") {
                  rec = service.reject(key);
                } else {
                  rec = service.regenerate(key);
                }
                reply(res, 200, service.review_item(rec));
              }));

  server.Get("/v1/bandit/stats", guarded([&service](const httplib::Request&, httplib::Response& res) {
               reply(res, 200, service.bandit_stats());
             }));

  server.Get("/v1/ab/report", guarded([&service](const httplib::Request& req, httplib::Response& res) {
               std::optional<Millis> window;
               if (req.has_param("window_minutes")) {
                 const double minutes = query_number<double>(req, "window_minutes", 0.0);
                 if (!(minutes > 0.0)) throw Error(ErrorCode::kBadRequest, "window_minutes must be positive");
                 window = Millis(static_cast<std::int64_t>(minutes * 60'000.0));
               }
               reply(res, 200, service.ab_report(window));
             }));

  server.Get(R"(/v1/objects/([0-9a-f]{64})\.png)",
             guarded([&service](const httplib::Request& req, httplib::Response& res) {
               const Bytes bytes = service.object_bytes(req.matches[1]);
               res.set_header("Cache-Control", "public, max-age=31536000, immutable");
               res.set_content(std::string(bytes.begin(), bytes.end()), "image/png");
             }));
}

HttpServer::HttpServer(CreativeService& service) : server_(std::make_unique<httplib::Server>()) {
  mount_routes(*server_, service);
  server_->set_logger([](const httplib::Request& req, const httplib::Response& res) {
    spdlog::debug("{} {} -> {}", req.method, req.path, res.status);
  });
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::start(const std::string& host, int port) {
  int bound = port;
  if (port == 0) {
    bound = server_->bind_to_any_port(host);
  } else if (!server_->bind_to_port(host, port)) {
    bound = -1;
  }
  if (bound <= 0) throw Error(ErrorCode::kInvalidArgument, "cannot bind " + host + ":" + std::to_string(port));
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
  return bound;
}

void HttpServer::listen(const std::string& host, int port) {
  if (!server_->listen(host, port)) {
    throw Error(ErrorCode::kInvalidArgument, "cannot listen on " + host + ":" + std::to_string(port));
  }
}

void HttpServer::stop() {
  server_->stop();
  if (thread_.joinable()) thread_.join();
}

}  // namespace adgen::service
