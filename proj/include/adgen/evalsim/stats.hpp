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

#include <cstdint>

namespace adgen::evalsim {

struct ZTest {
  double z = 0.0;
  double p_two_sided = 1.0;
  bool degenerate = false;  // pooled rate is 0 or 1; z = 0, p = 1
};

/// Pooled two-proportion z-test of a (clicks_a / n_a) against b.
/// Throws Error(kInvalidArgument) unless 0 <= clicks <= n and n >= 1.
ZTest two_prop_ztest(std::int64_t clicks_a, std::int64_t n_a, std::int64_t clicks_b, std::int64_t n_b);

/// ctr_t / ctr_c - 1. Throws Error(kZeroBaseline) when ctr_c <= 0.
double relative_ctr_gain(double ctr_t, double ctr_c);

/// Standard normal upper tail doubled: erfc(|z| / sqrt 2).
double two_sided_p(double z);

}  // namespace adgen::evalsim
