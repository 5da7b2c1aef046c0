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

#ifndef TAGM_PARAMS_HPP
#define TAGM_PARAMS_HPP

#include <string>
#include <string_view>

namespace tagm {

/// Step size gamma, gradient-extrapolation weight lambda and momentum weight
/// beta of the generalized momentum update
///   x+ = P[x + beta (x - x_prev) - gamma grad f(x + lambda (x - x_prev))].
struct GMParams {
  double gamma = 0.0;
  double lambda = 0.0;
  double beta = 0.0;

  /// Throws std::invalid_argument unless all values are finite, nonnegative
  /// and gamma > 0.
  void validate() const;
  bool operator==(const GMParams&) const = default;
};

enum class Algorithm { GD, HB, NAG, GM };

std::string_view to_string(Algorithm algo);
/// Case-insensitive; throws std::invalid_argument on unknown names.
Algorithm parse_algorithm(std::string_view name);

/// GD -> (gamma, 0, 0); HB -> (gamma, 0, beta); NAG -> (gamma, beta, beta);
/// GM -> (gamma, lambda, beta). Inconsistent inputs are rejected.
GMParams specialize(Algorithm algo, double gamma, double beta = 0.0,
                    double lambda = 0.0);

bool in_c1(const GMParams& p, double mu, double h_diag_max);
bool in_c2(const GMParams& p, double mu, double h_diag_max);

struct ContractionReport {
  bool in_c1 = false;
  bool in_c2 = false;
  double alpha1 = 0.0;
  double alpha2 = 0.0;
  double alpha = 0.0;
  bool admissible = false;
};

/// alpha1 = (1 + beta - gamma mu (1 + lambda))^2
///          + (beta - gamma lambda mu)(2 + beta - gamma mu (1 + lambda))
/// alpha2 = 1 - gamma mu + 2 (beta - lambda gamma mu)
/// For admissible parameters alpha = max(alpha1, alpha2) lies in (0, 1);
/// a violation throws std::logic_error.
ContractionReport contraction_report(const GMParams& p, double mu,
                                     double h_diag_max);

/// Operation cycles sufficient to reach the epsilon ball from diameter D:
/// log(D / eps) / log(1 / alpha). Zero when eps >= D.
double ops_budget(double diameter, double epsilon, double alpha);

}  // namespace tagm

#endif  // TAGM_PARAMS_HPP
