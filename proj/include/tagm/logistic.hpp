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

#ifndef TAGM_LOGISTIC_HPP
#define TAGM_LOGISTIC_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "tagm/problem.hpp"

namespace tagm {

struct LogisticOptions {
  /// Multiplier applied to the sampled max |H_ii|.
  double h_diag_safety = 1.25;
  /// Replaces the sampled bound entirely when set.
  std::optional<double> h_diag_override;
  /// Random box points used for the diagonal sample (the origin is always
  /// included).
  int diagonal_samples = 8;
  std::uint64_t sample_seed = 0x5eed;
};

/// Multi-class l2-regularised logistic regression
///
///   f(w) = (1/N) sum_i [ log sum_l exp(w_l' phi_i) - w_{xi_i}' phi_i ]
///          + theta/2 ||w||_F^2
///
/// over the column-major vectorisation of the d x K weight matrix. `labels`
/// take values in {1..K}. mu is set to theta; h_diag_max comes from sampling
/// the exact Hessian diagonal.
Problem make_logistic(const Matrix& features, const std::vector<int>& labels,
                      double theta, int num_classes, BlockPartition partition,
                      NeighborGraph graph, BoxConstraint box,
                      const LogisticOptions& options = {});

}  // namespace tagm

#endif  // TAGM_LOGISTIC_HPP
