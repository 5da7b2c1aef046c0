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

#include "tagm/quadratic.hpp"

#include <Eigen/SparseCore>
#include <cmath>
#include <fstream>
#include <istream>
#include <memory>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>

namespace tagm {

namespace {

using RowMajorSparse = Eigen::SparseMatrix<double, Eigen::RowMajor>;

void check_shapes(const Matrix& q, const Vector& b, const BoxConstraint& box,
                  const BlockPartition& partition) {
  const Index n = q.rows();
  if (q.cols() != n || b.size() != n || box.dim() != n || partition.dim() != n) {
    throw std::invalid_argument("quadratic: inconsistent dimensions");
  }
  const double scale = std::max(1.0, q.cwiseAbs().maxCoeff());
  if ((q - q.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw std::invalid_argument("quadratic: Q is not symmetric");
  }
}

NeighborGraph coupling_graph(const Matrix& q, const BlockPartition& partition) {
  std::set<std::pair<int, int>> edges;
  for (Index r = 0; r < q.rows(); ++r) {
    for (Index c = 0; c < q.cols(); ++c) {
      if (q(r, c) == 0.0) continue;
      const int a = partition.owner(r);
      const int b = partition.owner(c);
      if (a != b) edges.emplace(std::min(a, b), std::max(a, b));
    }
  }
  return NeighborGraph(partition.num_blocks(), {edges.begin(), edges.end()});
}

Problem assemble(const Matrix& q, const Vector& b, BoxConstraint box,
                 BlockPartition partition) {
  auto sparse = std::make_shared<RowMajorSparse>(q.sparseView(1.0, 0.0));
  sparse->makeCompressed();
  auto dense = std::make_shared<const Matrix>(q);
  auto linear = std::make_shared<const Vector>(b);

  Problem p;
  p.name = "quadratic";
  p.graph = coupling_graph(q, partition);
  p.partition = std::move(partition);
  p.box = std::move(box);

  const BlockPartition& parts = p.partition;
  p.grad_block = [sparse, linear, parts](int i, const Vector& x) {
    const BlockRange& r = parts.block(i);
    Vector g(r.size);
    // Only the stored nonzeros of each row are touched, so coordinates of
    // non-neighbours never enter the sum.
    for (Index k = 0; k < r.size; ++k) {
      const Index row = r.start + k;
      double acc = 0.0;
      for (RowMajorSparse::InnerIterator it(*sparse, row); it; ++it) {
        acc += it.value() * x[it.col()];
      }
      g[k] = acc + (*linear)[row];
    }
    return g;
  };
  p.value = [dense, linear](const Vector& x) {
    return 0.5 * x.dot(*dense * x) + linear->dot(x);
  };
  p.hessian = [dense](const Vector&) { return *dense; };
  p.hessian_entry = [dense](Index i, Index j, const Vector&) {
    return (*dense)(i, j);
  };
  p.hessian_diagonal = [dense](const Vector&) -> Vector {
    return dense->diagonal();
  };
  p.mu = dominance_margin(q);
  p.h_diag_max = q.diagonal().cwiseAbs().maxCoeff();
  return p;
}

}  // namespace

double dominance_margin(const Matrix& q) {
  double margin = std::numeric_limits<double>::infinity();
  for (Index i = 0; i < q.rows(); ++i) {
    const double off = q.row(i).cwiseAbs().sum() - std::abs(q(i, i));
    margin = std::min(margin, q(i, i) - off);
  }
  return margin;
}

Problem make_quadratic(const Matrix& q, const Vector& b, BoxConstraint box,
                       BlockPartition partition) {
  check_shapes(q, b, box, partition);
  if ((q.diagonal().array() <= 0.0).any()) {
    throw std::invalid_argument("quadratic: diagonal must be positive");
  }
  const double margin = dominance_margin(q);
  if (!(margin > 0.0)) {
    throw std::invalid_argument(
        "quadratic: Q is not strictly diagonally dominant (margin " +
        std::to_string(margin) + ")");
  }
  Problem p = assemble(q, b, std::move(box), std::move(partition));
  p.validate();
  return p;
}

Problem make_quadratic_unchecked(const Matrix& q, const Vector& b,
                                 BoxConstraint box, BlockPartition partition) {
  check_shapes(q, b, box, partition);
  return assemble(q, b, std::move(box), std::move(partition));
}

QuadraticData read_quadratic(std::istream& in) {
  QuadraticData out;
  std::string line;
  int line_no = 0;
  enum class Mode { header, dense, coo } mode = Mode::header;
  Index n = 0;
  Index dense_row = 0;
  bool have_b = false;

  auto fail = [&](const std::string& what) {
    throw std::runtime_error("quadratic file line " + std::to_string(line_no) +
                             ": " + what);
  };

  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::string head;
    if (!(fields >> head)) continue;

    if (mode == Mode::header) {
      if (head != "dense" && head != "coo") fail("expected 'dense <n>' or 'coo <n>'");
      if (!(fields >> n) || n < 1) fail("bad dimension");
      out.q = Matrix::Zero(n, n);
      out.b = Vector::Zero(n);
      mode = head == "dense" ? Mode::dense : Mode::coo;
      continue;
    }
    if (head == "b") {
      if (have_b) fail("duplicate b line");
      for (Index i = 0; i < n; ++i)
        if (!(fields >> out.b[i])) fail("b needs " + std::to_string(n) + " values");
      have_b = true;
      continue;
    }
    std::istringstream row(line);
    if (mode == Mode::dense) {
      if (dense_row >= n) fail("too many matrix rows");
      for (Index j = 0; j < n; ++j)
        if (!(row >> out.q(dense_row, j))) fail("row needs " + std::to_string(n) + " values");
      ++dense_row;
    } else {
      Index i = 0, j = 0;
      double v = 0.0;
      if (!(row >> i >> j >> v)) fail("expected '<i> <j> <value>'");
      if (i < 0 || j < 0 || i >= n || j >= n) fail("index out of range");
      out.q(i, j) = v;
    }
  }
  if (mode == Mode::header) throw std::runtime_error("quadratic file: missing header");
  if (mode == Mode::dense && dense_row != n) {
    throw std::runtime_error("quadratic file: expected " + std::to_string(n) +
                             " matrix rows, got " + std::to_string(dense_row));
  }
  return out;
}

QuadraticData read_quadratic_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open quadratic file " + path);
  return read_quadratic(in);
}

}  // namespace tagm
