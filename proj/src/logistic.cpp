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

#include "tagm/logistic.hpp"

#include <cmath>
#include <memory>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>

namespace tagm {

namespace {

struct LogisticData {
  Matrix features;  // N x d
  Matrix onehot;    // N x K
  double theta;
  Index d;
  Index k;

  Index samples() const { return features.rows(); }

  /// N x K logits at vec(W) = x.
  Matrix logits(const Vector& x) const {
    Eigen::Map<const Matrix> w(x.data(), d, k);
    Matrix l(samples(), k);
    l.noalias() = features * w;
    return l;
  }

  /// Row-shifted exponentials and their row sums.
  std::pair<Matrix, Vector> shifted_exp(const Vector& x) const {
    Matrix l = logits(x);
    const Vector top = l.rowwise().maxCoeff();
    l.colwise() -= top;
    l = l.array().exp().matrix();
    Vector total = l.rowwise().sum();
    return {std::move(l), std::move(total)};
  }

  /// Row-wise softmax, N x K.
  Matrix probabilities(const Vector& x) const {
    auto [e, total] = shifted_exp(x);
    e.array().colwise() /= total.array();
    return e;
  }

  double value(const Vector& x) const {
    const Matrix l = logits(x);
    const Vector top = l.rowwise().maxCoeff();
    Matrix shifted = l;
    shifted.colwise() -= top;
    shifted = shifted.array().exp().matrix();
    const Vector lse = top.array() + shifted.rowwise().sum().array().log();
    const double fit = l.cwiseProduct(onehot).sum();
    return (lse.sum() - fit) / static_cast<double>(samples()) + 0.5 * theta * x.squaredNorm();
  }

  Vector grad_range(const BlockRange& r, const Vector& x) const {
    const auto [e, total] = shifted_exp(x);
    const double inv_n = 1.0 / static_cast<double>(samples());
    Vector g(r.size);
    Index c = r.start;
    while (c < r.end()) {
      const Index cls = c / d;
      const Index a0 = c - cls * d;
      const Index len = std::min(r.end(), (cls + 1) * d) - c;
      const Vector residual = (e.col(cls).array() / total.array()).matrix() - onehot.col(cls);
      g.segment(c - r.start, len) =
          inv_n * (features.middleCols(a0, len).transpose() * residual) +
          theta * x.segment(c, len);
      c += len;
    }
    return g;
  }

  Matrix hessian(const Vector& x) const {
    const Matrix p = probabilities(x);
    const double inv_n = 1.0 / static_cast<double>(samples());
    Matrix h(d * k, d * k);
    for (Index l = 0; l < k; ++l) {
      for (Index m = l; m < k; ++m) {
        Vector weight = -p.col(l).cwiseProduct(p.col(m));
        if (l == m) weight += p.col(l);
        const Matrix block =
            inv_n * features.transpose() * weight.asDiagonal() * features;
        h.block(l * d, m * d, d, d) = block;
        if (l != m) h.block(m * d, l * d, d, d) = block.transpose();
      }
    }
    h.diagonal().array() += theta;
    return h;
  }

  double hessian_entry(Index r, Index c, const Vector& x) const {
    const Matrix p = probabilities(x);
    const Index a = r % d, l = r / d;
    const Index b = c % d, m = c / d;
    Vector weight = -p.col(l).cwiseProduct(p.col(m));
    if (l == m) weight += p.col(l);
    double h = features.col(a).cwiseProduct(features.col(b)).dot(weight) /
               static_cast<double>(samples());
    if (r == c) h += theta;
    return h;
  }

  Vector hessian_diagonal(const Vector& x) const {
    const Matrix p = probabilities(x);
    const Matrix curvature = p.array() * (1.0 - p.array());
    const Matrix diag = features.cwiseAbs2().transpose() * curvature /
                        static_cast<double>(samples());
    Vector out = Eigen::Map<const Vector>(diag.data(), diag.size());
    out.array() += theta;
    return out;
  }
};

}  // namespace

Problem make_logistic(const Matrix& features, const std::vector<int>& labels,
                      double theta, int num_classes, BlockPartition partition,
                      NeighborGraph graph, BoxConstraint box,
                      const LogisticOptions& options) {
  const Index n_samples = features.rows();
  if (n_samples == 0 || features.cols() == 0) {
    throw std::invalid_argument("logistic: empty dataset");
  }
  if (static_cast<Index>(labels.size()) != n_samples) {
    throw std::invalid_argument("logistic: label count differs from sample count");
  }
  if (num_classes < 2) throw std::invalid_argument("logistic: need K >= 2");
  if (!(theta > 0.0)) throw std::invalid_argument("logistic: theta must be positive");

  auto data = std::make_shared<LogisticData>();
  data->features = features;
  data->onehot = Matrix::Zero(n_samples, num_classes);
  data->theta = theta;
  data->d = features.cols();
  data->k = num_classes;
  for (Index i = 0; i < n_samples; ++i) {
    const int label = labels[static_cast<std::size_t>(i)];
    if (label < 1 || label > num_classes) {
      throw std::invalid_argument("logistic: label " + std::to_string(label) +
                                  " outside {1.." + std::to_string(num_classes) + "}");
    }
    data->onehot(i, label - 1) = 1.0;
  }
  if (partition.dim() != data->d * data->k) {
    throw std::invalid_argument("logistic: partition must cover d*K coordinates");
  }
  const bool coupled = features.cwiseAbs().maxCoeff() > 0.0;
  if (coupled && graph.num_edges() !=
                     static_cast<std::size_t>(partition.num_blocks()) *
                         (partition.num_blocks() - 1) / 2) {
    throw std::invalid_argument(
        "logistic: every pair of blocks is coupled, the graph must be complete");
  }

  Problem p;
  p.name = "logistic";
  p.partition = std::move(partition);
  p.graph = std::move(graph);
  p.box = std::move(box);
  const BlockPartition& parts = p.partition;
  p.grad_block = [data, parts](int i, const Vector& x) {
    return data->grad_range(parts.block(i), x);
  };
  p.value = [data](const Vector& x) { return data->value(x); };
  p.hessian = [data](const Vector& x) { return data->hessian(x); };
  p.hessian_entry = [data](Index r, Index c, const Vector& x) {
    return data->hessian_entry(r, c, x);
  };
  p.hessian_diagonal = [data](const Vector& x) { return data->hessian_diagonal(x); };
  p.mu = theta;

  if (options.h_diag_override) {
    p.h_diag_max = *options.h_diag_override;
  } else {
    std::mt19937_64 rng(options.sample_seed);
    double top = data->hessian_diagonal(Vector::Zero(p.dim())).maxCoeff();
    for (int s = 0; s < options.diagonal_samples; ++s) {
      Vector x(p.dim());
      for (Index c = 0; c < x.size(); ++c) {
        const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
        x[c] = p.box.lo[c] + u * (p.box.hi[c] - p.box.lo[c]);
      }
      top = std::max(top, data->hessian_diagonal(x).maxCoeff());
    }
    p.h_diag_max = std::max(options.h_diag_safety * top, p.mu);
  }
  p.validate();
  return p;
}

}  // namespace tagm
