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

#ifndef TAGM_PROBLEM_HPP
#define TAGM_PROBLEM_HPP

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "tagm/types.hpp"

namespace tagm {

struct BlockRange {
  Index start = 0;
  Index size = 0;

  Index end() const { return start + size; }
};

/// Contiguous partition of {0..n-1} into one block per processor.
class BlockPartition {
 public:
  BlockPartition() = default;

  /// Blocks are laid out in order; every size must be >= 1.
  static BlockPartition from_sizes(const std::vector<Index>& sizes);
  /// n blocks of size one.
  static BlockPartition scalar(Index n);
  /// `parts` contiguous blocks whose sizes differ by at most one.
  static BlockPartition balanced(Index n, int parts);

  Index dim() const { return static_cast<Index>(owner_.size()); }
  int num_blocks() const { return static_cast<int>(blocks_.size()); }
  const BlockRange& block(int i) const { return blocks_.at(i); }
  const std::vector<BlockRange>& blocks() const { return blocks_; }
  int owner(Index coordinate) const { return owner_.at(coordinate); }

  template <typename Derived>
  auto segment(Eigen::MatrixBase<Derived>& v, int i) const {
    const auto& r = blocks_.at(i);
    return v.segment(r.start, r.size);
  }
  template <typename Derived>
  auto segment(const Eigen::MatrixBase<Derived>& v, int i) const {
    const auto& r = blocks_.at(i);
    return v.segment(r.start, r.size);
  }

 private:
  std::vector<BlockRange> blocks_;
  std::vector<int> owner_;
};

/// Undirected communication graph between processors. Neighbour lists are
/// sorted and exclude the processor itself.
class NeighborGraph {
 public:
  NeighborGraph() = default;
  NeighborGraph(int n_processors, const std::vector<std::pair<int, int>>& edges);

  static NeighborGraph complete(int n_processors);

  int size() const { return static_cast<int>(neighbors_.size()); }
  const std::vector<int>& neighbors(int i) const { return neighbors_.at(i); }
  bool adjacent(int i, int j) const;
  /// Number of undirected edges |E|.
  std::size_t num_edges() const;
  std::vector<std::pair<int, int>> edges() const;

 private:
  std::vector<std::vector<int>> neighbors_;
};

/// X = [lo_1, hi_1] x ... x [lo_n, hi_n].
struct BoxConstraint {
  Vector lo;
  Vector hi;

  static BoxConstraint uniform(Index n, double lo, double hi);

  Index dim() const { return lo.size(); }
  void validate() const;
  bool contains(const Vector& x) const;
  /// Infinity-norm diameter of X (and of Z = X x X).
  double diameter() const;
  Vector project(const Vector& v) const { return clamp_to(v, lo, hi); }
};

/// Clamp `v` into the box restricted to `range`.
Vector project_block(const BoxConstraint& box, const BlockRange& range,
                     const Vector& v);

using GradientOracle = std::function<Vector(int block, const Vector& x)>;
using ValueOracle = std::function<double(const Vector& x)>;
using HessianEntryOracle = std::function<double(Index, Index, const Vector&)>;
using HessianOracle = std::function<Matrix(const Vector& x)>;
using DiagonalOracle = std::function<Vector(const Vector& x)>;
/// Replaces the block-i projection. Must be a nonexpansive projection onto a
/// convex X_i; that is assumed, not checked.
using BlockProjector = std::function<Vector(int block, const Vector& v)>;

/// Block-partitioned objective f(x) = sum_i f_i(x_{V_i}) over a box, together
/// with the Hessian bounds the parameter regions need.
///
/// All oracles are pure. `grad_block(i, x)` must only read the coordinates
/// owned by i and its graph neighbours.
struct Problem {
  std::string name;
  BlockPartition partition;
  NeighborGraph graph;
  BoxConstraint box;

  GradientOracle grad_block;
  ValueOracle value;
  HessianEntryOracle hessian_entry;   // optional
  HessianOracle hessian;              // optional, dense
  DiagonalOracle hessian_diagonal;    // optional
  BlockProjector projector;           // optional, defaults to the box

  double mu = 0.0;
  double h_diag_max = 0.0;

  Index dim() const { return partition.dim(); }
  int num_blocks() const { return partition.num_blocks(); }

  Vector project(int block, const Vector& v) const;
  Vector project(const Vector& x) const;

  /// Throws std::invalid_argument when the pieces are inconsistent.
  void validate() const;
};

/// Concatenation of grad_block over all blocks.
Vector grad_full(const Problem& problem, const Vector& x);

/// Projected-gradient residual ||x - P_X(x - grad f(x))||_inf.
double stationarity_residual(const Problem& problem, const Vector& x);

struct HessianBounds {
  double mu_estimate = 0.0;
  double h_diag_max_estimate = 0.0;
  bool dominance_ok = false;
};

/// Sampled diagonal-dominance check: min over points and rows of
/// H_ii - sum_{j != i} |H_ij|, and max |H_ii|. A sample, not a certificate.
/// Uses the dense Hessian oracle, then the entry oracle, then central
/// differences of grad_full.
HessianBounds estimate_hessian_bounds(const Problem& problem,
                                      const std::vector<Vector>& sample_points);

/// Central finite-difference step used throughout.
inline constexpr double kFiniteDifferenceStep = 1e-5;

}  // namespace tagm

#endif  // TAGM_PROBLEM_HPP
