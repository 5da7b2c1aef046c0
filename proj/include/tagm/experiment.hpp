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

#ifndef TAGM_EXPERIMENT_HPP
#define TAGM_EXPERIMENT_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "tagm/async.hpp"
#include "tagm/params.hpp"
#include "tagm/problem.hpp"
#include "tagm/schedule.hpp"
#include "tagm/sync.hpp"

namespace tagm {

/// Unreadable or inconsistent configuration; the message names the line or
/// field.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class ProblemKind { builtin, quadratic, logistic, synthetic };

std::string_view to_string(ProblemKind kind);
ProblemKind parse_problem_kind(std::string_view name);

/// INI-style configuration (`key = value` under `[section]` headers):
///
///   [problem]   kind, builtin, path, data_dir, per_class, data_seed,
///               synthetic_dim, synthetic_spread, theta, processors,
///               box_lo, box_hi, h_diag_max
///   [algorithm] name, gamma, lambda, beta (missing values come from the
///               default parameter table)
///   [schedule]  kind, p, p_deliver, send_mode, fifo, seed, script
///   [stop]      epsilon, max_ticks, rule, reference_tol
///   [sweep]     p_values, algorithms, seeds (comma separated)
///   [output]    dir, stride
struct ExperimentConfig {
  ProblemKind problem = ProblemKind::synthetic;
  std::string builtin = "quad16";
  std::string quadratic_path;
  std::string data_dir;
  Index per_class = 100;
  std::uint64_t data_seed = 1;
  Index synthetic_dim = 16;
  double synthetic_spread = 0.15;
  double theta = 0.01;
  int processors = 16;
  double box_lo = -10.0;
  double box_hi = 10.0;
  std::optional<double> h_diag_max;

  Algorithm algorithm = Algorithm::GM;
  std::optional<double> gamma;
  std::optional<double> lambda;
  std::optional<double> beta;

  ScheduleKind schedule = ScheduleKind::bernoulli;
  double p = 1.0;
  double p_deliver = 1.0;
  SendMode send_mode = SendMode::bernoulli;
  bool fifo = true;
  std::uint64_t seed = 1;
  std::string script_path;

  double epsilon = 1e-4;
  long max_ticks = 200'000;
  StopRule stop_rule = StopRule::distance;
  /// epsilon / 100 when unset.
  std::optional<double> reference_tol;

  std::vector<double> p_values{1.0, 0.9, 0.8, 0.7, 0.6, 0.5, 0.4, 0.3, 0.2, 0.1, 0.05};
  std::vector<Algorithm> algorithms{Algorithm::GD, Algorithm::HB, Algorithm::NAG, Algorithm::GM};
  std::vector<std::uint64_t> seeds{1};

  std::string out_dir = ".";
  long stride = 1;

  /// Throws ConfigError.
  void validate() const;
};

ExperimentConfig read_config(std::istream& in);
ExperimentConfig read_config_file(const std::string& path);
/// Resolved configuration in the same format, one line per key.
std::string write_config(const ExperimentConfig& config);

/// Defaults: GD gamma 0.1; HB beta 0.075; NAG beta = lambda = 0.35;
/// GM beta 0.5, lambda 0.05 (all with gamma 0.1).
GMParams default_params(Algorithm algo);
/// Config parameters merged over the defaults for `algo` and checked by
/// specialize. Throws ConfigError.
GMParams resolve_params(const ExperimentConfig& config, Algorithm algo);

struct PreparedProblem {
  Problem problem;
  Vector x_star;
  double f_star = 0.0;
  std::vector<std::string> notes;
};

/// Builds the configured problem. Throws ConfigError.
Problem build_problem(const ExperimentConfig& config);
/// Builds the problem and its reference minimiser.
PreparedProblem prepare_problem(const ExperimentConfig& config);
Schedule make_schedule(const ExperimentConfig& config, double p, std::uint64_t seed);

struct ResultRow {
  Algorithm algorithm = Algorithm::GM;
  double p = 1.0;
  std::uint64_t seed = 0;
  /// First tick at which the stop rule holds; empty for DNF.
  std::optional<long> iterations_to_eps;
  long ops_at_stop = 0;
  double final_cost = 0.0;

  bool dnf() const { return !iterations_to_eps.has_value(); }
};

/// One (algorithm, p, seed) cell. `trace_out` receives the trace when given.
ResultRow run_cell(const PreparedProblem& prepared, const ExperimentConfig& config,
                   Algorithm algo, double p, std::uint64_t seed,
                   AsyncTrace* trace_out = nullptr);

/// All cells of the sweep, ordered by p, then seed, then algorithm. DNF rows
/// are kept.
std::vector<ResultRow> run_table2(const PreparedProblem& prepared,
                                  const ExperimentConfig& config);

void write_results(std::ostream& out, const std::vector<ResultRow>& rows);
std::vector<ResultRow> read_results(std::istream& in);

/// 100 (baseline - gm) / baseline.
double percent_reduction(double baseline, double gm);

struct Reduction {
  Algorithm baseline = Algorithm::GD;
  double p = 1.0;
  std::uint64_t seed = 0;
  long baseline_iterations = 0;
  long gm_iterations = 0;
  double percent = 0.0;
};

/// Pairs each non-GM row with the GM row of equal (p, seed). Unpaired or DNF
/// rows are skipped with a message in `warnings`.
std::vector<Reduction> percent_reduction(const std::vector<ResultRow>& rows,
                                         std::vector<std::string>* warnings = nullptr);
void write_reductions(std::ostream& out, const std::vector<Reduction>& reductions);

/// Rows of a `k,ops,cost,dist_inf` trace file.
struct TraceTable {
  std::vector<long> k;
  std::vector<long> ops;
  std::vector<double> cost;
  /// Empty entries when the minimiser was unknown.
  std::vector<std::optional<double>> dist_inf;

  std::size_t size() const { return k.size(); }
};

TraceTable to_table(const AsyncTrace& trace);
/// Sync iterates as a trace with ops(l) = l.
TraceTable to_table(const SyncTrace& trace);

/// CSV with header `k,ops,cost,dist_inf`, reals at 17 significant digits.
/// Each preamble line is written first behind `# `.
void write_trace(std::ostream& out, const TraceTable& trace,
                 const std::vector<std::string>& preamble = {});
/// Throws std::invalid_argument on an empty trace and std::runtime_error when
/// the file cannot be written.
void emit_trace(const TraceTable& trace, const std::string& path,
                const std::vector<std::string>& preamble = {});
TraceTable read_trace(std::istream& in);
TraceTable read_trace_file(const std::string& path);

struct ValidationReport {
  Algorithm algorithm = Algorithm::GM;
  GMParams params;
  double mu = 0.0;
  double h_diag_max = 0.0;
  ContractionReport contraction;
  double diameter = 0.0;
  double epsilon = 0.0;
  /// Only for admissible parameters.
  std::optional<double> rho;
  std::optional<long> rho_cycles;
  std::vector<std::string> notes;
  std::vector<std::string> warnings;
};

/// Region membership, contraction factor and cycle budget for the configured
/// algorithm on `problem`.
ValidationReport validate_config(const ExperimentConfig& config, const Problem& problem);
/// Builds the problem first. Throws ConfigError on bad configuration.
ValidationReport validate_config(const ExperimentConfig& config);
std::string format_report(const ValidationReport& report);

}  // namespace tagm

#endif  // TAGM_EXPERIMENT_HPP
