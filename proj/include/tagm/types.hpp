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

#ifndef TAGM_TYPES_HPP
#define TAGM_TYPES_HPP

#include <algorithm>

#include <Eigen/Core>

namespace tagm {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Stacked current/previous iterate z = (x, y). Every processor keeps one of
/// these as its local copy of the whole network state.
struct DecisionPair {
  Vector x;
  Vector y;

  static DecisionPair stationary(const Vector& x) { return {x, x}; }

  Index dim() const { return x.size(); }
  bool operator==(const DecisionPair&) const = default;
};

/// Coordinate-wise clamp of an expression into [lo, hi].
template <typename Derived, typename Lo, typename Hi>
auto clamp_to(const Eigen::MatrixBase<Derived>& v,
              const Eigen::MatrixBase<Lo>& lo,
              const Eigen::MatrixBase<Hi>& hi) {
  return v.cwiseMax(lo).cwiseMin(hi);
}

template <typename A, typename B>
double distance_inf(const Eigen::MatrixBase<A>& a,
                    const Eigen::MatrixBase<B>& b) {
  if (a.size() == 0) return 0.0;
  return (a - b).template lpNorm<Eigen::Infinity>();
}

inline double distance_inf(const DecisionPair& a, const DecisionPair& b) {
  return std::max(distance_inf(a.x, b.x), distance_inf(a.y, b.y));
}

}  // namespace tagm

#endif  // TAGM_TYPES_HPP
