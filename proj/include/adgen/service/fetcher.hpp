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

#include <functional>
#include <string>

#include "adgen/common/clock.hpp"
#include "adgen/common/hash.hpp"

namespace adgen::service {

struct HttpUrl {
  std::string origin;  // scheme://host[:port]
  std::string path;    // starts with '/'
};

/// Accepts http:// URLs only. Throws Error(kBadRequest).
HttpUrl parse_http_url(const std::string& url);

class ImageFetcher {
 public:
  virtual ~ImageFetcher() = default;
  /// Throws Error(kImageFetchFailure).
  virtual Bytes fetch(const std::string& url) = 0;
};

/// http:// via a blocking GET and file:// from local disk.
class DefaultImageFetcher final : public ImageFetcher {
 public:
  explicit DefaultImageFetcher(Millis timeout = std::chrono::seconds(5),
                               std::size_t max_bytes = 32u << 20)
      : timeout_(timeout), max_bytes_(max_bytes) {}

  Bytes fetch(const std::string& url) override;

 private:
  Millis timeout_;
  std::size_t max_bytes_;
};

}  // namespace adgen::service
