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

#include "adgen/evalsim/stats.hpp"

#include <cmath>
#include <string>

#include "adgen/common/error.hpp"

namespace adgen::evalsim {

double two_sided_p(double z) { return std::erfc(std::fabs(z) / std::sqrt(2.0)); }

ZTest two_prop_ztest(std::int64_t clicks_a, std::int64_t n_a, std::int64_t clicks_b, std::int64_t n_b) {
  if (n_a < 1 || n_b < 1) throw Error(ErrorCode::kInvalidArgument, "z-test needs n >= 1 in both groups");
  if (clicks_a < 0 || clicks_b < 0 || clicks_a > n_a || clicks_b > n_b) {
    throw Error(ErrorCode::kInvalidArgument, "clicks must lie in [0, n]");
  }
  const double na = static_cast<double>(n_a);
  const double nb = static_cast<double>(n_b);
  const double pooled = static_cast<double>(clicks_a + clicks_b) / (na + nb);
  ZTest out;
  if (pooled <= 0.0 || pooled >= 1.0) {
    out.degenerate = true;
    return out;
  }
  const double se = std::sqrt(pooled * (1.0 - pooled) * (1.0 / na + 1.0 / nb));
  out.z = (static_cast<double>(clicks_a) / na - static_cast<double>(clicks_b) / nb) / se;
  out.p_two_sided = two_sided_p(out.z);
  return out;
}

double relative_ctr_gain(double ctr_t, double ctr_c) {
  if (!(ctr_c > 0.0)) throw Error(ErrorCode::kZeroBaseline, "control CTR is zero");
  return ctr_t / ctr_c - 1.0;
}

}  // namespace adgen::evalsim
