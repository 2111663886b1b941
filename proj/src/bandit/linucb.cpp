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

#include "adgen/bandit/linucb.hpp"

#include <spdlog/spdlog.h>

#include <cmath>

#include "adgen/common/error.hpp"

namespace adgen::bandit {

SquareMatrix::SquareMatrix(int n, double diagonal)
    : n_(n), data_(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), 0.0) {
  for (int i = 0; i < n; ++i) (*this)(i, i) = diagonal;
}

double SquareMatrix::trace() const noexcept {
  double t = 0.0;
  for (int i = 0; i < n_; ++i) t += (*this)(i, i);
  return t;
}

std::optional<SquareMatrix> cholesky(const SquareMatrix& a) {
  const int n = a.size();
  SquareMatrix l(n);
  for (int j = 0; j < n; ++j) {
    double diag = a(j, j);
    for (int k = 0; k < j; ++k) diag -= l(j, k) * l(j, k);
    if (!(diag > 0.0) || !std::isfinite(diag)) return std::nullopt;
    const double ljj = std::sqrt(diag);
    l(j, j) = ljj;
    for (int i = j + 1; i < n; ++i) {
      double s = a(i, j);
      for (int k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      l(i, j) = s / ljj;
    }
  }
  return l;
}

std::vector<double> forward_substitute(const SquareMatrix& lower, std::span<const double> v) {
  const int n = lower.size();
  std::vector<double> z(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    double s = v[static_cast<std::size_t>(i)];
    for (int k = 0; k < i; ++k) s -= lower(i, k) * z[static_cast<std::size_t>(k)];
    z[static_cast<std::size_t>(i)] = s / lower(i, i);
  }
  return z;
}

ArmState ArmState::fresh(int d) {
  ArmState s;
  s.a = SquareMatrix(d, 1.0);
  s.b.assign(static_cast<std::size_t>(d), 0.0);
  s.context_sum.assign(static_cast<std::size_t>(d), 0.0);
  s.chol = SquareMatrix(d, 1.0);
  s.whitened_b.assign(static_cast<std::size_t>(d), 0.0);
  return s;
}

void ArmState::refactor() {
  auto l = cholesky(a);
  factor_ok = l.has_value();
  if (!factor_ok) return;
  chol = std::move(*l);
  whitened_b = forward_substitute(chol, b);
  for (double v : whitened_b) {
    if (!std::isfinite(v)) {
      factor_ok = false;
      return;
    }
  }
}

LinUcbModel::LinUcbModel(int dimension, double alpha) : dimension_(dimension), alpha_(alpha) {
  if (dimension < 1) throw Error(ErrorCode::kInvalidArgument, "dimension must be >= 1");
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) {
    throw Error(ErrorCode::kInvalidArgument, "alpha must be a finite value >= 0");
  }
}

void LinUcbModel::check_context(const ContextVector& x) const {
  if (x.size() != static_cast<std::size_t>(dimension_)) {
    throw Error(ErrorCode::kDimensionMismatch, "context has " + std::to_string(x.size()) +
                                                   " components, model expects " +
                                                   std::to_string(dimension_));
  }
  for (double v : x.values) {
    if (!std::isfinite(v)) throw Error(ErrorCode::kInvalidArgument, "non-finite context component");
  }
}

const ArmState* LinUcbModel::arm(std::string_view id) const {
  auto it = arms_.find(id);
  return it == arms_.end() ? nullptr : &it->second;
}

double LinUcbModel::confidence_width(std::string_view arm_id, const ContextVector& x) const {
  check_context(x);
  const ArmState* s = arm(arm_id);
  if (s == nullptr) {
    double sq = 0.0;
    for (double v : x.values) sq += v * v;
    return std::sqrt(sq);
  }
  if (!s->factor_ok) {
    throw Error(ErrorCode::kNumericalFailure, "arm '" + std::string(arm_id) + "' is not SPD");
  }
  const auto z = forward_substitute(s->chol, x.values);
  double sq = 0.0;
  for (double v : z) sq += v * v;
  return std::sqrt(sq);
}

double LinUcbModel::score(std::string_view arm_id, const ContextVector& x) const {
  check_context(x);
  const ArmState* s = arm(arm_id);
  if (s == nullptr) {
    // theta = 0, A^-1 = I
    double sq = 0.0;
    for (double v : x.values) sq += v * v;
    return alpha_ * std::sqrt(sq);
  }
  if (!s->factor_ok) {
    throw Error(ErrorCode::kNumericalFailure, "arm '" + std::string(arm_id) + "' is not SPD");
  }
  const auto z = forward_substitute(s->chol, x.values);
  double mean = 0.0;
  double width_sq = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    mean += s->whitened_b[i] * z[i];
    width_sq += z[i] * z[i];
  }
  const double p = mean + alpha_ * std::sqrt(width_sq);
  if (!std::isfinite(p)) {
    throw Error(ErrorCode::kNumericalFailure, "non-finite score for arm '" + std::string(arm_id) + "'");
  }
  return p;
}

Selection LinUcbModel::select(const ContextVector& x, std::span<const std::string> eligible) const {
  if (eligible.empty()) throw Error(ErrorCode::kEmptyPool, "no eligible prompts");
  check_context(x);
  Selection sel;
  sel.scores.reserve(eligible.size());
  std::size_t best = 0;
  for (std::size_t i = 0; i < eligible.size(); ++i) {
    double p = 0.0;
    try {
      p = score(eligible[i], x);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kNumericalFailure) throw;
      sel.quarantined.push_back(eligible[i]);
      double sq = 0.0;
      for (double v : x.values) sq += v * v;
      p = alpha_ * std::sqrt(sq);
    }
    sel.scores.push_back(p);
    // Strict comparison keeps the earliest arm on ties.
    if (p > sel.scores[best]) best = i;
  }
  sel.prompt_id = eligible[best];
  sel.score = sel.scores[best];
  return sel;
}

void LinUcbModel::update(const std::string& arm_id, const ContextVector& x, int reward) {
  check_context(x);
  if (reward != 0 && reward != 1) throw Error(ErrorCode::kInvalidArgument, "reward must be 0 or 1");

  auto it = arms_.find(arm_id);
  if (it == arms_.end()) it = arms_.emplace(arm_id, ArmState::fresh(dimension_)).first;
  ArmState& s = it->second;

  const int d = dimension_;
  for (int r = 0; r < d; ++r) {
    const double xr = x.values[static_cast<std::size_t>(r)];
    if (xr == 0.0) continue;
    for (int c = 0; c < d; ++c) s.a(r, c) += xr * x.values[static_cast<std::size_t>(c)];
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    s.b[i] += reward * x.values[i];
    s.context_sum[i] += x.values[i];
  }
  ++s.pulls;
  s.reward_sum += reward;
  s.refactor();
  if (!s.factor_ok) {
    spdlog::error("arm '{}' lost positive definiteness after update; quarantining", arm_id);
    s = ArmState::fresh(d);
  }
}

void LinUcbModel::quarantine(const std::string& arm_id) {
  auto it = arms_.find(arm_id);
  if (it == arms_.end()) return;
  spdlog::error("quarantining arm '{}' ({} pulls discarded)", arm_id, it->second.pulls);
  it->second = ArmState::fresh(dimension_);
}

void LinUcbModel::restore_arm(const std::string& id, ArmState state) {
  const auto d = static_cast<std::size_t>(dimension_);
  if (state.a.size() != dimension_ || state.b.size() != d || state.context_sum.size() != d) {
    throw Error(ErrorCode::kDimensionMismatch, "restored arm '" + id + "' has wrong dimension");
  }
  state.refactor();
  if (!state.factor_ok) spdlog::error("restored arm '{}' is not positive definite", id);
  arms_.insert_or_assign(id, std::move(state));
}

std::vector<ArmStats> LinUcbModel::stats() const {
  std::vector<ArmStats> out;
  out.reserve(arms_.size());
  for (const auto& [id, s] : arms_) {
    ArmStats st;
    st.prompt_id = id;
    st.pulls = s.pulls;
    st.reward_sum = s.reward_sum;
    st.trace_a = s.a.trace();
    if (s.pulls > 0 && s.factor_ok) {
      // theta^T x_bar = (L^-1 b)^T (L^-1 x_bar)
      std::vector<double> mean_x(s.context_sum);
      for (double& v : mean_x) v /= static_cast<double>(s.pulls);
      const auto z = forward_substitute(s.chol, mean_x);
      double est = 0.0;
      for (std::size_t i = 0; i < z.size(); ++i) est += s.whitened_b[i] * z[i];
      st.mean_reward_estimate = est;
    }
    out.push_back(std::move(st));
  }
  return out;
}

Selection SharedLinUcb::select(const ContextVector& x, std::span<const std::string> eligible) {
  Selection sel;
  {
    std::shared_lock lock(mu_);
    sel = model_.select(x, eligible);
  }
  if (!sel.quarantined.empty()) {
    std::unique_lock lock(mu_);
    for (const auto& id : sel.quarantined) model_.quarantine(id);
  }
  return sel;
}

void SharedLinUcb::update(const std::string& arm, const ContextVector& x, int reward) {
  std::unique_lock lock(mu_);
  model_.update(arm, x, reward);
  ++updates_;
}

std::vector<ArmStats> SharedLinUcb::stats() const {
  std::shared_lock lock(mu_);
  return model_.stats();
}

LinUcbModel SharedLinUcb::snapshot() const {
  std::shared_lock lock(mu_);
  return model_;
}

std::uint64_t SharedLinUcb::total_updates() const {
  std::shared_lock lock(mu_);
  return updates_;
}

}  // namespace adgen::bandit
