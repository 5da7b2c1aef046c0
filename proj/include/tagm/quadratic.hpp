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

#ifndef TAGM_QUADRATIC_HPP
#define TAGM_QUADRATIC_HPP

#include <iosfwd>
#include <optional>
#include <string>

#include "tagm/problem.hpp"

namespace tagm {

/// f(x) = 1/2 x'Qx + b'x on a box. Q must be symmetric and strictly
/// diagonally dominant with positive diagonal; mu and h_diag_max are exact and
/// the neighbour graph follows the block sparsity of Q.
Problem make_quadratic(const Matrix& q, const Vector& b, BoxConstraint box,
                       BlockPartition partition);

/// Same objective without the dominance requirement. mu is reported as the
/// (possibly nonpositive) row margin. Intended for diagnostics only.
Problem make_quadratic_unchecked(const Matrix& q, const Vector& b,
                                 BoxConstraint box, BlockPartition partition);

/// Smallest row margin min_i (Q_ii - sum_{j != i} |Q_ij|).
double dominance_margin(const Matrix& q);

struct QuadraticData {
  Matrix q;
  Vector b;
};

/// Reads the quadratic text format:
///
///   # comment
///   dense <n>            |   coo <n>
///   <n rows of n values> |   <i> <j> <value>   (0-based, both triangles)
///   b <n values>         (optional; zero when absent)
///
/// Throws std::runtime_error with the offending line number.
QuadraticData read_quadratic(std::istream& in);
QuadraticData read_quadratic_file(const std::string& path);

}  // namespace tagm

#endif  // TAGM_QUADRATIC_HPP
