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

#include "adgen/service/fetcher.hpp"

#include "adgen/common/error.hpp"
#include "adgen/store/object_store.hpp"
#include "httplib.h"

namespace adgen::service {

HttpUrl parse_http_url(const std::string& url) {
  const std::string scheme = "http://";
  if (url.rfind(scheme, 0) != 0 || url.size() == scheme.size()) {
    throw Error(ErrorCode::kBadRequest, "expected an http:// URL, got '" + url + "'");
  }
  const auto slash = url.find('/', scheme.size());
  HttpUrl out;
  out.origin = url.substr(0, slash);
  out.path = slash == std::string::npos ? "/" : url.substr(slash);
  return out;
}

Bytes DefaultImageFetcher::fetch(const std::string& url) {
  auto fail = [&](const std::string& why) {
    return Error(ErrorCode::kImageFetchFailure, "fetch " + url + ": " + why);
  };
  if (url.rfind("file://", 0) == 0) {
    try {
      Bytes data = store::read_file(url.substr(7));
      if (data.size() > max_bytes_) throw fail("image too large");
      return data;
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kImageFetchFailure) throw;
      throw fail(e.what());
    }
  }
  HttpUrl target;
  try {
    target = parse_http_url(url);
  } catch (const Error&) {
    throw fail("unsupported URL scheme");
  }
  httplib::Client client(target.origin);
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(timeout_);
  const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(timeout_ - secs);
  client.set_connection_timeout(secs.count(), usecs.count());
  client.set_read_timeout(secs.count(), usecs.count());
  client.set_follow_location(true);
  auto res = client.Get(target.path);
  if (!res) throw fail(httplib::to_string(res.error()));
  if (res->status != 200) throw fail("HTTP " + std::to_string(res->status));
  if (res->body.size() > max_bytes_) throw fail("image too large");
  return Bytes(res->body.begin(), res->body.end());
}

}  // namespace adgen::service
