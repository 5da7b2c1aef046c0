// Copyright 2026 The tagm Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef TAGM_SYNC_HPP
#define TAGM_SYNC_HPP

#include <optional>
#include <vector>

#include "tagm/params.hpp"
#include "tagm/problem.hpp"
#include "tagm/types.hpp"

namespace tagm {

/// New (x_i, y_i) for one block.
struct BlockUpdate {
  Vector x;
  Vector y;
};

/// One generalized momentum step for block i, reading the full (x, y):
///   x_i+ = P_i[x_i + beta (x_i - y_i) - gamma grad_i f(x + lambda (x - y))]
///   y_i+ = x_i
BlockUpdate sgm_block_update(const Problem& problem, const GMParams& p, int block,
                             const Vector& x, const Vector& y);

/// Double-step update of block i. The first half-step produces y_i+ with the
/// single-step formula. The second half-step runs the same formula from
/// (y_hat, x), where y_hat is y with only block i replaced by y_i+.
BlockUpdate dgm_block_update(const Problem& problem, const GMParams& p, int block,
                             const Vector& x, const Vector& y);

DecisionPair sgm_step(const Problem& problem, const GMParams& p,
                      const DecisionPair& z);
DecisionPair dgm_step(const Problem& problem, const GMParams& p,
                      const DecisionPair& z);

enum class SyncLaw { sGM, dGM };

struct SyncTrace {
  std::vector<DecisionPair> iterates;
  std::vector<double> costs;
  /// Filled only when a reference minimiser was supplied.
  std::vector<double> dist_inf;
  bool converged = false;

  std::size_t size() const { return iterates.size(); }
};

/// Iterates `law` from z0 until ||z - z*||_inf <= epsilon (when z* is given)
/// or `max_iters` steps. Throws std::runtime_error on a non-finite cost.
SyncTrace run_sync(const Problem& problem, const GMParams& p, SyncLaw law,
                   const DecisionPair& z0, int max_iters, double epsilon,
                   const std::optional<Vector>& x_star = std::nullopt);

/// x(0) = y(0) = P_X(0).
DecisionPair default_start(const Problem& problem);

/// Minimiser of f over X to projected-gradient residual `tol`, by
/// accelerated projected gradient with backtracking and adaptive restart.
/// Throws std::runtime_error when the iteration cap is hit first.
Vector solve_reference(const Problem& problem, double tol,
                       int max_iters = 2'000'000);

}  // namespace tagm

#endif  // TAGM_SYNC_HPP
