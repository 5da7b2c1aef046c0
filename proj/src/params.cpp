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

#include "tagm/params.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <stdexcept>
#include <string>

namespace tagm {

void GMParams::validate() const {
  if (!std::isfinite(gamma) || !std::isfinite(lambda) || !std::isfinite(beta)) {
    throw std::invalid_argument("GM parameters must be finite");
  }
  if (!(gamma > 0.0)) throw std::invalid_argument("gamma must be positive");
  if (lambda < 0.0 || beta < 0.0) {
    throw std::invalid_argument("lambda and beta must be nonnegative");
  }
}

std::string_view to_string(Algorithm algo) {
  switch (algo) {
    case Algorithm::GD: return "GD";
    case Algorithm::HB: return "HB";
    case Algorithm::NAG: return "NAG";
    case Algorithm::GM: return "GM";
  }
  return "?";
}

Algorithm parse_algorithm(std::string_view name) {
  std::string upper(name);
  std::transform(upper.begin(), upper.end(), upper.begin(),
                 [](unsigned char c) { return std::toupper(c); });
  if (upper == "GD") return Algorithm::GD;
  if (upper == "HB") return Algorithm::HB;
  if (upper == "NAG") return Algorithm::NAG;
  if (upper == "GM") return Algorithm::GM;
  throw std::invalid_argument("unknown algorithm '" + std::string(name) + "'");
}

GMParams specialize(Algorithm algo, double gamma, double beta, double lambda) {
  GMParams p;
  switch (algo) {
    case Algorithm::GD:
      if (beta != 0.0 || lambda != 0.0) {
        throw std::invalid_argument("GD takes no momentum (beta = lambda = 0)");
      }
      p = {gamma, 0.0, 0.0};
      break;
    case Algorithm::HB:
      if (lambda != 0.0) throw std::invalid_argument("HB requires lambda = 0");
      p = {gamma, 0.0, beta};
      break;
    case Algorithm::NAG:
      if (beta != lambda) throw std::invalid_argument("NAG requires beta = lambda");
      p = {gamma, lambda, beta};
      break;
    case Algorithm::GM:
      p = {gamma, lambda, beta};
      break;
  }
  p.validate();
  return p;
}

bool in_c1(const GMParams& p, double mu, double h_diag_max) {
  const auto [gamma, lambda, beta] = p;
  // lambda = 0 forces beta = 0 and leaves the gamma bound undefined; that
  // corner belongs to C2.
  if (lambda == 0.0) return false;
  const double gm = gamma * mu;
  if (gm >= 1.0) return false;
  const bool chain = 0.0 <= beta && beta <= lambda && lambda < gm / (2.0 * (1.0 - gm));
  const bool step = 0.0 < gamma && gamma < beta / (lambda * h_diag_max);
  return chain && step;
}

bool in_c2(const GMParams& p, double mu, double h_diag_max) {
  const auto [gamma, lambda, beta] = p;
  const bool chain = 0.0 <= lambda && lambda <= beta &&
                     beta < 0.5 * gamma * mu * (1.0 + 2.0 * lambda);
  const bool step = 0.0 < gamma && gamma < 1.0 / h_diag_max;
  return chain && step;
}

ContractionReport contraction_report(const GMParams& p, double mu,
                                     double h_diag_max) {
  const auto [gamma, lambda, beta] = p;
  const double gm = gamma * mu;
  const double lead = 1.0 + beta - gm * (1.0 + lambda);
  const double lag = beta - gamma * lambda * mu;

  ContractionReport r;
  r.in_c1 = in_c1(p, mu, h_diag_max);
  r.in_c2 = in_c2(p, mu, h_diag_max);
  r.admissible = r.in_c1 || r.in_c2;
  r.alpha1 = lead * lead + lag * (2.0 + beta - gm * (1.0 + lambda));
  r.alpha2 = 1.0 - gm + 2.0 * lag;
  r.alpha = std::max(r.alpha1, r.alpha2);
  if (r.admissible && !(r.alpha > 0.0 && r.alpha < 1.0)) {
    throw std::logic_error("admissible parameters produced alpha = " +
                           std::to_string(r.alpha));
  }
  return r;
}

double ops_budget(double diameter, double epsilon, double alpha) {
  if (!(diameter > 0.0)) throw std::invalid_argument("diameter must be positive");
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::invalid_argument("alpha must lie in (0, 1)");
  }
  if (epsilon >= diameter) return 0.0;
  return std::log(diameter / epsilon) / std::log(1.0 / alpha);
}

}  // namespace tagm
