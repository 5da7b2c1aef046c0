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

#include "tagm/sync.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace tagm {

BlockUpdate sgm_block_update(const Problem& problem, const GMParams& p, int block,
                             const Vector& x, const Vector& y) {
  const BlockPartition& parts = problem.partition;
  const Vector probe = x + p.lambda * (x - y);
  const Vector g = problem.grad_block(block, probe);
  const auto xi = parts.segment(x, block);
  const auto yi = parts.segment(y, block);
  return {problem.project(block, (xi + p.beta * (xi - yi) - p.gamma * g).eval()),
          xi};
}

BlockUpdate dgm_block_update(const Problem& problem, const GMParams& p, int block,
                             const Vector& x, const Vector& y) {
  const BlockPartition& parts = problem.partition;
  const auto xi = parts.segment(x, block);
  const auto yi = parts.segment(y, block);

  const Vector probe = x + p.lambda * (x - y);
  const Vector g_first = problem.grad_block(block, probe);
  const Vector y_new =
      problem.project(block, (xi + p.beta * (xi - yi) - p.gamma * g_first).eval());

  Vector y_hat = y;
  parts.segment(y_hat, block) = y_new;
  const Vector probe_hat = y_hat + p.lambda * (y_hat - x);
  const Vector g_second = problem.grad_block(block, probe_hat);
  Vector x_new = problem.project(
      block, (y_new + p.beta * (y_new - xi) - p.gamma * g_second).eval());
  return {std::move(x_new), y_new};
}

namespace {

template <typename Update>
DecisionPair step_all(const Problem& problem, const DecisionPair& z, Update update) {
  if (z.x.size() != problem.dim() || z.y.size() != problem.dim()) {
    throw std::invalid_argument("decision pair has the wrong dimension");
  }
  DecisionPair out{Vector(z.x.size()), Vector(z.y.size())};
  for (int i = 0; i < problem.num_blocks(); ++i) {
    BlockUpdate u = update(i);
    problem.partition.segment(out.x, i) = u.x;
    problem.partition.segment(out.y, i) = u.y;
  }
  return out;
}

}  // namespace

DecisionPair sgm_step(const Problem& problem, const GMParams& p,
                      const DecisionPair& z) {
  return step_all(problem, z, [&](int i) {
    return sgm_block_update(problem, p, i, z.x, z.y);
  });
}

DecisionPair dgm_step(const Problem& problem, const GMParams& p,
                      const DecisionPair& z) {
  return step_all(problem, z, [&](int i) {
    return dgm_block_update(problem, p, i, z.x, z.y);
  });
}

DecisionPair default_start(const Problem& problem) {
  return DecisionPair::stationary(problem.project(Vector::Zero(problem.dim()).eval()));
}

SyncTrace run_sync(const Problem& problem, const GMParams& p, SyncLaw law,
                   const DecisionPair& z0, int max_iters, double epsilon,
                   const std::optional<Vector>& x_star) {
  p.validate();
  std::optional<DecisionPair> z_star;
  if (x_star) z_star = DecisionPair::stationary(*x_star);

  SyncTrace trace;
  DecisionPair z = z0;
  for (int l = 0;; ++l) {
    const double cost = problem.value(z.x);
    if (!std::isfinite(cost)) {
      std::ostringstream msg;
      msg << "run_sync: non-finite cost at iteration " << l;
      throw std::runtime_error(msg.str());
    }
    trace.iterates.push_back(z);
    trace.costs.push_back(cost);
    if (z_star) {
      trace.dist_inf.push_back(distance_inf(z, *z_star));
      if (trace.dist_inf.back() <= epsilon) {
        trace.converged = true;
        break;
      }
    }
    if (l == max_iters) break;
    z = law == SyncLaw::sGM ? sgm_step(problem, p, z) : dgm_step(problem, p, z);
  }
  return trace;
}

Vector solve_reference(const Problem& problem, double tol, int max_iters) {
  Vector x = default_start(problem).x;
  Vector g_x = grad_full(problem, x);
  Vector probe = x;
  Vector g_probe = g_x;
  double t = 1.0;
  // Lipschitz guess; backtracking grows it as needed.
  double lipschitz = std::max(problem.h_diag_max, 1e-12);

  for (int it = 0; it < max_iters; ++it) {
    if (distance_inf(x, problem.project((x - g_x).eval())) <= tol) return x;

    Vector next, g_next;
    for (;;) {
      next = problem.project((probe - g_probe / lipschitz).eval());
      g_next = grad_full(problem, next);
      const Vector d = next - probe;
      // Curvature test along the step; avoids cancellation in f differences.
      if (d.dot(g_next - g_probe) <= lipschitz * d.squaredNorm()) break;
      lipschitz *= 2.0;
      if (!std::isfinite(lipschitz)) {
        throw std::runtime_error("solve_reference: backtracking diverged");
      }
    }

    // Restart momentum when the step opposes the previous direction.
    if ((probe - next).dot(next - x) > 0.0) {
      t = 1.0;
      probe = x;
      g_probe = g_x;
      continue;
    }
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    const Vector x_prev = x;
    x = std::move(next);
    g_x = std::move(g_next);
    probe = x + ((t - 1.0) / t_next) * (x - x_prev);
    g_probe = grad_full(problem, probe);
    t = t_next;
  }
  throw std::runtime_error("solve_reference: no convergence to tolerance");
}

}  // namespace tagm
