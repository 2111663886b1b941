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

// Disjoint LinUCB over prompt arms.
//
// Every arm keeps a ridge-regression state (A, b) with A = I + sum x x^T and
// b = sum r x. An arm is scored as
//
//   p = theta^T x + alpha * sqrt(x^T A^-1 x),   theta = A^-1 b
//
// A is never inverted. Each update refactors A = L L^T (Cholesky), and a
// score needs one forward substitution z = L^-1 x:
//
//   x^T A^-1 x = z^T z,   theta^T x = (L^-1 b)^T z.

#pragma once

#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "adgen/bandit/features.hpp"

namespace adgen::bandit {

/// Dense row-major square matrix, just enough for the arm state.
class SquareMatrix {
 public:
  SquareMatrix() = default;
  explicit SquareMatrix(int n, double diagonal = 0.0);

  int size() const noexcept { return n_; }
  double operator()(int r, int c) const noexcept { return data_[index(r, c)]; }
  double& operator()(int r, int c) noexcept { return data_[index(r, c)]; }
  std::span<const double> data() const noexcept { return data_; }
  std::span<double> data() noexcept { return data_; }
  double trace() const noexcept;

  bool operator==(const SquareMatrix&) const = default;

 private:
  std::size_t index(int r, int c) const noexcept {
    return static_cast<std::size_t>(r) * static_cast<std::size_t>(n_) + static_cast<std::size_t>(c);
  }

  int n_ = 0;
  std::vector<double> data_;
};

/// Lower-triangular Cholesky factor of `a`, or nullopt when a pivot is not
/// strictly positive (A is not SPD or holds non-finite values).
std::optional<SquareMatrix> cholesky(const SquareMatrix& a);

/// Solves L z = v for lower-triangular L.
std::vector<double> forward_substitute(const SquareMatrix& lower, std::span<const double> v);

struct ArmState {
  SquareMatrix a;
  std::vector<double> b;
  std::uint64_t pulls = 0;
  double reward_sum = 0.0;
  std::vector<double> context_sum;

  // Derived from (a, b); rebuilt whenever they change.
  SquareMatrix chol;
  std::vector<double> whitened_b;  // L^-1 b
  bool factor_ok = true;

  static ArmState fresh(int d);
  /// Recomputes chol and whitened_b; sets factor_ok.
  void refactor();
};

struct Selection {
  std::string prompt_id;
  double score = 0.0;
  std::vector<double> scores;             // parallel to the eligible list
  std::vector<std::string> quarantined;   // arms whose state failed to factor
};

struct ArmStats {
  std::string prompt_id;
  std::uint64_t pulls = 0;
  double reward_sum = 0.0;
  double trace_a = 0.0;
  /// theta^T x_bar over the contexts the arm was pulled on; empty if never pulled.
  std::optional<double> mean_reward_estimate;
};

class LinUcbModel {
 public:
  explicit LinUcbModel(int dimension, double alpha = 1.0);

  int dimension() const noexcept { return dimension_; }
  double alpha() const noexcept { return alpha_; }

  /// UCB score; a never-seen arm scores as fresh (A = I, b = 0).
  /// Throws Error(kNumericalFailure) when the arm's state cannot be factored.
  double score(std::string_view arm, const ContextVector& x) const;

  /// Confidence width sqrt(x^T A^-1 x) of one arm.
  double confidence_width(std::string_view arm, const ContextVector& x) const;

  /// Argmax over `eligible`; ties go to the earliest position. Arms that fail
  /// to factor are scored as fresh and reported in Selection::quarantined.
  /// Throws Error(kEmptyPool) for an empty list.
  Selection select(const ContextVector& x, std::span<const std::string> eligible) const;

  /// One rank-1 update. Creates the arm on first sight. reward must be 0 or 1.
  void update(const std::string& arm, const ContextVector& x, int reward);

  /// Resets an arm to (I, 0), dropping its history.
  void quarantine(const std::string& arm);

  const ArmState* arm(std::string_view id) const;
  const std::map<std::string, ArmState, std::less<>>& arms() const noexcept { return arms_; }
  std::vector<ArmStats> stats() const;

  /// Installs a deserialized arm; refactors it.
  void restore_arm(const std::string& id, ArmState state);

 private:
  void check_context(const ContextVector& x) const;

  int dimension_;
  double alpha_;
  std::map<std::string, ArmState, std::less<>> arms_;
};

/// Single-writer wrapper: selections share a lock, updates are exclusive.
class SharedLinUcb {
 public:
  explicit SharedLinUcb(LinUcbModel model) : model_(std::move(model)) {}

  /// Selects and then quarantines any arm reported as corrupt.
  Selection select(const ContextVector& x, std::span<const std::string> eligible);
  void update(const std::string& arm, const ContextVector& x, int reward);
  std::vector<ArmStats> stats() const;
  LinUcbModel snapshot() const;
  std::uint64_t total_updates() const;

 private:
  mutable std::shared_mutex mu_;
  LinUcbModel model_;
  std::uint64_t updates_ = 0;
};

}  // namespace adgen::bandit
