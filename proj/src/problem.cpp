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

#include "tagm/problem.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace tagm {

BlockPartition BlockPartition::from_sizes(const std::vector<Index>& sizes) {
  if (sizes.empty()) throw std::invalid_argument("partition needs at least one block");
  BlockPartition p;
  Index start = 0;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    if (sizes[i] < 1) {
      throw std::invalid_argument("block " + std::to_string(i) + " is empty");
    }
    p.blocks_.push_back({start, sizes[i]});
    p.owner_.insert(p.owner_.end(), sizes[i], static_cast<int>(i));
    start += sizes[i];
  }
  return p;
}

BlockPartition BlockPartition::scalar(Index n) {
  return from_sizes(std::vector<Index>(n, 1));
}

BlockPartition BlockPartition::balanced(Index n, int parts) {
  if (parts < 1 || parts > n) {
    throw std::invalid_argument("cannot split " + std::to_string(n) +
                                " coordinates into " + std::to_string(parts) +
                                " nonempty blocks");
  }
  std::vector<Index> sizes(parts, n / parts);
  for (Index i = 0; i < n % parts; ++i) ++sizes[i];
  return from_sizes(sizes);
}

NeighborGraph::NeighborGraph(int n_processors,
                             const std::vector<std::pair<int, int>>& edges)
    : neighbors_(n_processors) {
  for (auto [a, b] : edges) {
    if (a < 0 || b < 0 || a >= n_processors || b >= n_processors) {
      throw std::invalid_argument("edge endpoint out of range");
    }
    if (a == b) throw std::invalid_argument("self-edges are not allowed");
    neighbors_[a].push_back(b);
    neighbors_[b].push_back(a);
  }
  for (auto& nb : neighbors_) {
    std::sort(nb.begin(), nb.end());
    nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
  }
}

NeighborGraph NeighborGraph::complete(int n_processors) {
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < n_processors; ++i)
    for (int j = i + 1; j < n_processors; ++j) edges.emplace_back(i, j);
  return NeighborGraph(n_processors, edges);
}

bool NeighborGraph::adjacent(int i, int j) const {
  const auto& nb = neighbors_.at(i);
  return std::binary_search(nb.begin(), nb.end(), j);
}

std::size_t NeighborGraph::num_edges() const {
  std::size_t twice = 0;
  for (const auto& nb : neighbors_) twice += nb.size();
  return twice / 2;
}

std::vector<std::pair<int, int>> NeighborGraph::edges() const {
  std::vector<std::pair<int, int>> out;
  for (int i = 0; i < size(); ++i)
    for (int j : neighbors_[i])
      if (i < j) out.emplace_back(i, j);
  return out;
}

BoxConstraint BoxConstraint::uniform(Index n, double lo, double hi) {
  BoxConstraint box{Vector::Constant(n, lo), Vector::Constant(n, hi)};
  box.validate();
  return box;
}

void BoxConstraint::validate() const {
  if (lo.size() != hi.size()) throw std::invalid_argument("box bound sizes differ");
  for (Index i = 0; i < lo.size(); ++i) {
    if (!std::isfinite(lo[i]) || !std::isfinite(hi[i]) || lo[i] > hi[i]) {
      throw std::invalid_argument("box is empty or unbounded at coordinate " +
                                  std::to_string(i));
    }
  }
}

bool BoxConstraint::contains(const Vector& x) const {
  return x.size() == lo.size() && (x.array() >= lo.array()).all() &&
         (x.array() <= hi.array()).all();
}

double BoxConstraint::diameter() const {
  if (lo.size() == 0) return 0.0;
  return (hi - lo).maxCoeff();
}

Vector project_block(const BoxConstraint& box, const BlockRange& range,
                     const Vector& v) {
  if (v.size() != range.size || range.end() > box.dim() || range.start < 0) {
    throw std::invalid_argument("project_block: dimension mismatch");
  }
  return clamp_to(v, box.lo.segment(range.start, range.size),
                  box.hi.segment(range.start, range.size));
}

Vector Problem::project(int block, const Vector& v) const {
  if (projector) return projector(block, v);
  return project_block(box, partition.block(block), v);
}

Vector Problem::project(const Vector& x) const {
  if (!projector) return box.project(x);
  Vector out(x.size());
  for (int i = 0; i < num_blocks(); ++i)
    partition.segment(out, i) = projector(i, partition.segment(x, i).eval());
  return out;
}

void Problem::validate() const {
  box.validate();
  if (box.dim() != partition.dim()) {
    throw std::invalid_argument("box and partition dimensions differ");
  }
  if (graph.size() != partition.num_blocks()) {
    throw std::invalid_argument("graph must have one vertex per block");
  }
  if (!grad_block || !value) throw std::invalid_argument("missing oracle");
  if (!(mu > 0.0) || !std::isfinite(mu)) {
    throw std::invalid_argument("diagonal-dominance margin mu must be positive");
  }
  if (!(h_diag_max >= mu) || !std::isfinite(h_diag_max)) {
    throw std::invalid_argument("h_diag_max must be finite and at least mu");
  }
}

Vector grad_full(const Problem& problem, const Vector& x) {
  if (x.size() != problem.dim()) {
    throw std::invalid_argument("grad_full: dimension mismatch");
  }
  Vector g(x.size());
  for (int i = 0; i < problem.num_blocks(); ++i) {
    problem.partition.segment(g, i) = problem.grad_block(i, x);
  }
  return g;
}

double stationarity_residual(const Problem& problem, const Vector& x) {
  return distance_inf(x, problem.project((x - grad_full(problem, x)).eval()));
}

namespace {

Matrix hessian_at(const Problem& problem, const Vector& x) {
  if (problem.hessian) return problem.hessian(x);
  const Index n = problem.dim();
  Matrix h(n, n);
  if (problem.hessian_entry) {
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < n; ++j) h(i, j) = problem.hessian_entry(i, j, x);
    return h;
  }
  // Central differences of the gradient, one column per coordinate.
  Vector probe = x;
  for (Index j = 0; j < n; ++j) {
    const double step = kFiniteDifferenceStep * std::max(1.0, std::abs(x[j]));
    probe[j] = x[j] + step;
    const Vector plus = grad_full(problem, probe);
    probe[j] = x[j] - step;
    const Vector minus = grad_full(problem, probe);
    probe[j] = x[j];
    h.col(j) = (plus - minus) / (2.0 * step);
  }
  // Symmetrise the differenced estimate.
  return 0.5 * (h + h.transpose());
}

}  // namespace

HessianBounds estimate_hessian_bounds(const Problem& problem,
                                      const std::vector<Vector>& sample_points) {
  if (sample_points.empty()) {
    throw std::invalid_argument("estimate_hessian_bounds needs sample points");
  }
  HessianBounds out;
  out.mu_estimate = std::numeric_limits<double>::infinity();
  out.h_diag_max_estimate = 0.0;
  for (const auto& x : sample_points) {
    if (!problem.box.contains(x)) {
      throw std::invalid_argument("sample point lies outside the box");
    }
    const Matrix h = hessian_at(problem, x);
    for (Index i = 0; i < h.rows(); ++i) {
      const double diag = h(i, i);
      const double off = h.row(i).cwiseAbs().sum() - std::abs(diag);
      out.mu_estimate = std::min(out.mu_estimate, diag - off);
      out.h_diag_max_estimate = std::max(out.h_diag_max_estimate, std::abs(diag));
    }
  }
  out.dominance_ok = out.mu_estimate > 0.0;
  return out;
}

}  // namespace tagm
