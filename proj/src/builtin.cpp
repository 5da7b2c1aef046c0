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

#include "tagm/builtin.hpp"

#include <cmath>
#include <stdexcept>

#include "tagm/logistic.hpp"
#include "tagm/quadratic.hpp"

namespace tagm {

namespace {

Matrix quad2_matrix() {
  Matrix q(2, 2);
  q << 2.0, -0.5, -0.5, 2.0;
  return q;
}

}  // namespace

Problem builtin_quad2() {
  Problem p = make_quadratic(quad2_matrix(), Vector::Zero(2), BoxConstraint::uniform(2, -1, 1),
                             BlockPartition::scalar(2));
  p.name = "quad2";
  return p;
}

Problem builtin_quad2_boundary() {
  Vector b(2);
  b << -4.0, 1.0;
  Problem p = make_quadratic(quad2_matrix(), b, BoxConstraint::uniform(2, -1, 1),
                             BlockPartition::scalar(2));
  p.name = "quad2_boundary";
  return p;
}

Problem builtin_quad4() {
  Matrix q = Matrix::Zero(4, 4);
  for (Index i = 0; i < 4; ++i) {
    q(i, i) = 3.0;
    if (i + 1 < 4) q(i, i + 1) = q(i + 1, i) = -1.0;
  }
  Vector b(4);
  b << 1.0, -2.0, 0.5, 3.0;
  Problem p = make_quadratic(q, b, BoxConstraint::uniform(4, -1, 1), BlockPartition::scalar(4));
  p.name = "quad4";
  return p;
}

Matrix quad16_matrix() {
  constexpr Index n = 16;
  Matrix q = Matrix::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    q(i, i) = 3.0 + 0.1 * static_cast<double>(i % 3);
    q(i, (i + 1) % n) = q((i + 1) % n, i) = -0.4;
    q(i, (i + 4) % n) = q((i + 4) % n, i) = 0.3;
  }
  return q;
}

Vector quad16_rhs() {
  Vector b(16);
  for (Index i = 0; i < 16; ++i) b(i) = 4.0 * std::sin(1.7 * static_cast<double>(i));
  return b;
}

Problem builtin_quad16() {
  Problem p = make_quadratic(quad16_matrix(), quad16_rhs(), BoxConstraint::uniform(16, -1, 1),
                             BlockPartition::scalar(16));
  p.name = "quad16";
  return p;
}

Problem builtin_quad16_blocks() {
  Problem p = make_quadratic(quad16_matrix(), quad16_rhs(), BoxConstraint::uniform(16, -2, 2),
                             BlockPartition::balanced(16, 8));
  p.name = "quad16_blocks";
  return p;
}

Problem builtin_logistic_toy() {
  Matrix phi(4, 2);
  phi << 1.0, 0.5, -0.5, 1.0, 0.8, -1.2, -1.0, -0.3;
  const std::vector<int> labels{1, 2, 1, 2};
  Problem p = make_logistic(phi, labels, 0.1, 2, BlockPartition::balanced(4, 2),
                            NeighborGraph::complete(2), BoxConstraint::uniform(4, -10, 10));
  p.name = "logistic_toy";
  return p;
}

std::vector<Problem> builtin_problems() {
  return {builtin_quad2(),         builtin_quad2_boundary(), builtin_quad4(),
          builtin_quad16(),        builtin_quad16_blocks(),  builtin_logistic_toy()};
}

std::vector<std::string> builtin_names() {
  return {"quad2", "quad2_boundary", "quad4", "quad16", "quad16_blocks", "logistic_toy"};
}

Problem builtin_problem(const std::string& name) {
  if (name == "quad2") return builtin_quad2();
  if (name == "quad2_boundary") return builtin_quad2_boundary();
  if (name == "quad4") return builtin_quad4();
  if (name == "quad16") return builtin_quad16();
  if (name == "quad16_blocks") return builtin_quad16_blocks();
  if (name == "logistic_toy") return builtin_logistic_toy();
  throw std::invalid_argument("unknown built-in problem '" + name + "'");
}

}  // namespace tagm
