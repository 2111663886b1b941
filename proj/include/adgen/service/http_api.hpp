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

#include <memory>
#include <string>
#include <thread>

#include "adgen/common/error.hpp"
#include "adgen/service/creative_service.hpp"

namespace httplib {
class Server;
}

namespace adgen::service {

/// HTTP status for an error code: 400, 404, 409, 503 or 500.
int http_status(ErrorCode code);

/// Mounts the JSON API on `server`:
///   POST /v1/creative, POST /v1/feedback,
///   GET /v1/review/pending?limit=N,
///   POST /v1/review/{image_hash}/{prompt_id}/{bucket}/approve|reject|regenerate,
///   GET /v1/bandit/stats, GET /v1/ab/report?window_minutes=M,
///   GET /v1/objects/{ref}.png, GET /healthz.
/// Errors answer {"error": code, "message": text}.
void mount_routes(httplib::Server& server, CreativeService& service);

/// The API on its own listening thread.
class HttpServer {
 public:
  explicit HttpServer(CreativeService& service);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  /// Port 0 picks a free port. Returns the bound port; throws Error(kInvalidArgument).
  int start(const std::string& host, int port);
  /// Blocks in the accept loop on the calling thread.
  void listen(const std::string& host, int port);
  void stop();

 private:
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
};

}  // namespace adgen::service
