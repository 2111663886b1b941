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

#include <random>
#include <string>

#include "adgen/common/clock.hpp"
#include "adgen/common/error.hpp"
#include "adgen/common/hash.hpp"
#include "doctest.h"

using namespace adgen;

TEST_CASE("sha256 published vectors") {
  // Values from `sha256sum`.
  CHECK(sha256_hex(std::string_view("abc")) ==
        "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK(sha256_hex(std::string_view("")) ==
        "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(is_sha256_hex(sha256_hex(std::string_view("abc"))));
  CHECK_FALSE(is_sha256_hex("ABC"));
}

TEST_CASE("base64 round-trips arbitrary bytes") {
  std::mt19937_64 rng(7);
  for (std::size_t n = 0; n < 40; ++n) {
    Bytes data(n);
    for (auto& b : data) b = static_cast<std::uint8_t>(rng());
    CHECK(base64_decode(base64_encode(data)) == data);
  }
  CHECK(base64_encode(Bytes{'M', 'a', 'n'}) == "TWFu");
  CHECK(base64_encode(Bytes{'M'}) == "TQ==");
  CHECK_THROWS_AS(base64_decode("abc"), Error);
  CHECK_THROWS_AS(base64_decode("!!!!"), Error);
}

TEST_CASE("manual clock advances only when told") {
  ManualClock clock;
  auto t0 = clock.now();
  CHECK(clock.now() == t0);
  clock.advance(std::chrono::minutes(61));
  CHECK(clock.now() - t0 == std::chrono::minutes(61));
  CHECK(from_unix_millis(to_unix_millis(t0)) == t0);
}

TEST_CASE("stable hashes do not depend on process state") {
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(stable_hash64("abc") == 0xba7816bf8f01cfeaULL);
}
