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

#ifndef TAGM_BUILTIN_HPP
#define TAGM_BUILTIN_HPP

#include <string>
#include <vector>

#include "tagm/problem.hpp"

namespace tagm {

/// 2x2, Q = [[2, -0.5], [-0.5, 2]], b = 0, box [-1, 1]^2. x* = 0.
Problem builtin_quad2();
/// Same Q with b = (-4, 1): the minimiser sits on the boundary, x* = (1, -0.25).
Problem builtin_quad2_boundary();
/// n = 4 tridiagonal (3 on the diagonal, -1 beside it), box [-1, 1]^4.
Problem builtin_quad4();
/// n = 16 sparse ring with chords, scalar blocks, box [-1, 1]^16, mu = 1.6.
Problem builtin_quad16();
/// The n = 16 matrix of builtin_quad16 split into 8 blocks of size 2,
/// box [-2, 2]^16.
Problem builtin_quad16_blocks();
/// Multi-class logistic toy: N = 4, d = 2, K = 2, theta = 0.1, two blocks.
Problem builtin_logistic_toy();

/// The Hessian of builtin_quad16 and its linear term.
Matrix quad16_matrix();
Vector quad16_rhs();

/// All built-in problems (five quadratics, then the logistic toy).
std::vector<Problem> builtin_problems();
std::vector<std::string> builtin_names();
/// Throws std::invalid_argument on unknown names.
Problem builtin_problem(const std::string& name);

}  // namespace tagm

#endif  // TAGM_BUILTIN_HPP
