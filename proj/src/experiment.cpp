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

#include "tagm/experiment.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

#include "tagm/builtin.hpp"
#include "tagm/dataset.hpp"
#include "tagm/logistic.hpp"
#include "tagm/quadratic.hpp"

namespace tagm {

namespace {

/// Shortest text that reads back to the same double.
std::string shortest(double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_real(const std::string& s, std::size_t line) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size()) {
    throw std::runtime_error("line " + std::to_string(line) + ": bad number '" + s + "'");
  }
  return v;
}

long parse_long(const std::string& s, std::size_t line) {
  char* end = nullptr;
  const long v = std::strtol(s.c_str(), &end, 10);
  if (s.empty() || end != s.c_str() + s.size()) {
    throw std::runtime_error("line " + std::to_string(line) + ": bad integer '" + s + "'");
  }
  return v;
}

Problem logistic_from(const SampleSet& set, const ExperimentConfig& c) {
  const Index n = set.dim() * set.num_classes;
  if (c.processors > n) throw ConfigError("problem.processors exceeds the dimension");
  LogisticOptions options;
  options.h_diag_override = c.h_diag_max;
  Problem p = make_logistic(set.train_features(), set.train_labels(), c.theta, set.num_classes,
                            BlockPartition::balanced(n, c.processors),
                            NeighborGraph::complete(c.processors),
                            BoxConstraint::uniform(n, c.box_lo, c.box_hi), options);
  return p;
}

}  // namespace

Problem build_problem(const ExperimentConfig& c) {
  try {
    switch (c.problem) {
      case ProblemKind::builtin:
        return builtin_problem(c.builtin);
      case ProblemKind::quadratic: {
        const QuadraticData data = read_quadratic_file(c.quadratic_path);
        const Index n = data.q.rows();
        if (c.processors > n) throw ConfigError("problem.processors exceeds the dimension");
        Problem p = make_quadratic(data.q, data.b, BoxConstraint::uniform(n, c.box_lo, c.box_hi),
                                   BlockPartition::balanced(n, c.processors));
        p.name = c.quadratic_path;
        return p;
      }
      case ProblemKind::logistic: {
        const SampleSet set = subsample(load_fashion_mnist(c.data_dir), c.per_class, c.data_seed);
        Problem p = logistic_from(set, c);
        p.name = "fashion-mnist";
        return p;
      }
      case ProblemKind::synthetic: {
        const SampleSet set = synthetic_blobs(c.per_class, kFashionClasses, c.synthetic_dim,
                                              c.synthetic_spread, c.data_seed);
        Problem p = logistic_from(set, c);
        p.name = "synthetic-blobs";
        return p;
      }
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("[problem] ") + e.what());
  }
  throw std::logic_error("unhandled problem kind");
}

PreparedProblem prepare_problem(const ExperimentConfig& config) {
  PreparedProblem out{build_problem(config), {}, 0.0, {}};
  const double tol = config.reference_tol.value_or(config.epsilon / 100.0);
  out.x_star = solve_reference(out.problem, tol);
  out.f_star = out.problem.value(out.x_star);
  const Problem& p = out.problem;
  out.notes.push_back("problem " + p.name + ", n = " + std::to_string(p.dim()) + ", blocks = " +
                      std::to_string(p.num_blocks()));
  out.notes.push_back("box [" + shortest(p.box.lo.minCoeff()) + ", " + shortest(p.box.hi.maxCoeff()) +
                      "], mu = " + shortest(p.mu) + ", h_diag_max = " + shortest(p.h_diag_max));
  out.notes.push_back("reference tol " + shortest(tol) + ", f* = " + shortest(out.f_star));
  return out;
}

Schedule make_schedule(const ExperimentConfig& config, double p, std::uint64_t seed) {
  Schedule s;
  if (config.schedule == ScheduleKind::scripted) {
    s = Schedule::scripted(read_script_file(config.script_path));
  } else if (config.send_mode == SendMode::bernoulli) {
    s = Schedule::replication(p, seed);
    s.p_deliver = config.p_deliver;
  } else {
    s = Schedule::bernoulli(p, seed, config.p_deliver);
  }
  s.seed = seed;
  s.fifo = config.fifo;
  s.validate();
  return s;
}

ResultRow run_cell(const PreparedProblem& prepared, const ExperimentConfig& config,
                   Algorithm algo, double p, std::uint64_t seed, AsyncTrace* trace_out) {
  const GMParams params = resolve_params(config, algo);
  AsyncOptions options;
  options.max_ticks = config.max_ticks;
  options.x_star = prepared.x_star;
  options.stop = config.stop_rule;
  options.epsilon = config.epsilon;
  options.stride = config.stride;
  AsyncTrace trace = run_async(prepared.problem, params, make_schedule(config, p, seed),
                               {default_start(prepared.problem)}, options);

  ResultRow row;
  row.algorithm = algo;
  row.p = p;
  row.seed = seed;
  if (trace.converged) row.iterations_to_eps = trace.stop_tick;
  row.ops_at_stop = trace.ops.back();
  row.final_cost = trace.cost.back();
  if (trace_out) *trace_out = std::move(trace);
  return row;
}

std::vector<ResultRow> run_table2(const PreparedProblem& prepared, const ExperimentConfig& config) {
  std::vector<ResultRow> rows;
  for (double p : config.p_values)
    for (std::uint64_t seed : config.seeds)
      for (Algorithm algo : config.algorithms) rows.push_back(run_cell(prepared, config, algo, p, seed));
  return rows;
}

void write_results(std::ostream& out, const std::vector<ResultRow>& rows) {
  out << "algorithm,p,seed,iterations_to_eps,ops_at_stop,final_cost\n";
  for (const auto& r : rows) {
    out << to_string(r.algorithm) << ',' << shortest(r.p) << ',' << r.seed << ','
        << (r.dnf() ? std::string("DNF") : std::to_string(*r.iterations_to_eps)) << ','
        << r.ops_at_stop << ',' << shortest(r.final_cost) << '\n';
  }
}

std::vector<ResultRow> read_results(std::istream& in) {
  std::vector<ResultRow> rows;
  std::string line;
  std::size_t lineno = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    if (!header) {
      if (line != "algorithm,p,seed,iterations_to_eps,ops_at_stop,final_cost") {
        throw std::runtime_error("line " + std::to_string(lineno) + ": unexpected header");
      }
      header = true;
      continue;
    }
    const auto cells = split_csv(line);
    if (cells.size() != 6) {
      throw std::runtime_error("line " + std::to_string(lineno) + ": expected 6 columns");
    }
    ResultRow r;
    try {
      r.algorithm = parse_algorithm(cells[0]);
    } catch (const std::invalid_argument& e) {
      throw std::runtime_error("line " + std::to_string(lineno) + ": " + e.what());
    }
    r.p = parse_real(cells[1], lineno);
    r.seed = static_cast<std::uint64_t>(std::stoull(cells[2]));
    if (cells[3] != "DNF") r.iterations_to_eps = parse_long(cells[3], lineno);
    r.ops_at_stop = parse_long(cells[4], lineno);
    r.final_cost = parse_real(cells[5], lineno);
    rows.push_back(r);
  }
  if (!header) throw std::runtime_error("missing results header");
  return rows;
}

double percent_reduction(double baseline, double gm) {
  if (!(baseline > 0.0)) throw std::invalid_argument("baseline count must be positive");
  return 100.0 * (baseline - gm) / baseline;
}

std::vector<Reduction> percent_reduction(const std::vector<ResultRow>& rows,
                                         std::vector<std::string>* warnings) {
  auto warn = [&](const std::string& w) {
    if (warnings) warnings->push_back(w);
  };
  std::map<std::pair<double, std::uint64_t>, const ResultRow*> gm;
  for (const auto& r : rows) {
    if (r.algorithm == Algorithm::GM) gm[{r.p, r.seed}] = &r;
  }
  std::vector<Reduction> out;
  for (const auto& r : rows) {
    if (r.algorithm == Algorithm::GM) continue;
    const std::string cell = std::string(to_string(r.algorithm)) + " at p = " + shortest(r.p) +
                             ", seed " + std::to_string(r.seed);
    const auto it = gm.find({r.p, r.seed});
    if (it == gm.end()) {
      warn(cell + ": no GM row to compare with");
      continue;
    }
    if (r.dnf() || it->second->dnf()) {
      warn(cell + ": DNF, no reduction");
      continue;
    }
    Reduction red;
    red.baseline = r.algorithm;
    red.p = r.p;
    red.seed = r.seed;
    red.baseline_iterations = *r.iterations_to_eps;
    red.gm_iterations = *it->second->iterations_to_eps;
    if (red.baseline_iterations <= 0) {
      warn(cell + ": baseline reached the target at tick 0");
      continue;
    }
    red.percent = percent_reduction(static_cast<double>(red.baseline_iterations),
                                    static_cast<double>(red.gm_iterations));
    out.push_back(red);
  }
  return out;
}

void write_reductions(std::ostream& out, const std::vector<Reduction>& reductions) {
  out << "baseline,p,seed,baseline_iterations,gm_iterations,percent_reduction\n";
  for (const auto& r : reductions) {
    out << to_string(r.baseline) << ',' << shortest(r.p) << ',' << r.seed << ','
        << r.baseline_iterations << ',' << r.gm_iterations << ',' << shortest(r.percent) << '\n';
  }
}

TraceTable to_table(const AsyncTrace& trace) {
  TraceTable t;
  t.k = trace.ticks;
  t.ops = trace.ops;
  t.cost = trace.cost;
  for (std::size_t i = 0; i < trace.size(); ++i) {
    t.dist_inf.push_back(trace.dist_inf.empty() ? std::nullopt
                                                : std::optional<double>(trace.dist_inf[i]));
  }
  return t;
}

TraceTable to_table(const SyncTrace& trace) {
  TraceTable t;
  for (std::size_t i = 0; i < trace.size(); ++i) {
    t.k.push_back(static_cast<long>(i));
    t.ops.push_back(static_cast<long>(i));
    t.cost.push_back(trace.costs[i]);
    t.dist_inf.push_back(trace.dist_inf.empty() ? std::nullopt
                                                : std::optional<double>(trace.dist_inf[i]));
  }
  return t;
}

void write_trace(std::ostream& out, const TraceTable& trace,
                 const std::vector<std::string>& preamble) {
  for (const auto& line : preamble) out << "# " << line << '\n';
  out << "k,ops,cost,dist_inf\n";
  for (std::size_t i = 0; i < trace.size(); ++i) {
    out << trace.k[i] << ',' << trace.ops[i] << ',' << shortest(trace.cost[i]) << ',';
    if (trace.dist_inf[i]) out << shortest(*trace.dist_inf[i]);
    out << '\n';
  }
}

void emit_trace(const TraceTable& trace, const std::string& path,
                const std::vector<std::string>& preamble) {
  if (trace.size() == 0) throw std::invalid_argument("trace is empty");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  write_trace(out, trace, preamble);
  out.flush();
  if (!out) throw std::runtime_error("write error on '" + path + "'");
}

TraceTable read_trace(std::istream& in) {
  TraceTable t;
  std::string line;
  std::size_t lineno = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    if (!header) {
      if (line != "k,ops,cost,dist_inf") {
        throw std::runtime_error("line " + std::to_string(lineno) + ": unexpected header");
      }
      header = true;
      continue;
    }
    const auto cells = split_csv(line);
    if (cells.size() != 4) {
      throw std::runtime_error("line " + std::to_string(lineno) + ": expected 4 columns");
    }
    t.k.push_back(parse_long(cells[0], lineno));
    t.ops.push_back(parse_long(cells[1], lineno));
    t.cost.push_back(parse_real(cells[2], lineno));
    t.dist_inf.push_back(cells[3].empty() ? std::nullopt
                                          : std::optional<double>(parse_real(cells[3], lineno)));
  }
  if (!header) throw std::runtime_error("missing trace header");
  return t;
}

TraceTable read_trace_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  return read_trace(in);
}

ValidationReport validate_config(const ExperimentConfig& config, const Problem& problem) {
  ValidationReport r;
  r.algorithm = config.algorithm;
  r.params = resolve_params(config, config.algorithm);
  r.mu = problem.mu;
  r.h_diag_max = problem.h_diag_max;
  r.diameter = problem.box.diameter();
  r.epsilon = config.epsilon;
  if (!(r.mu > 0.0) || !(r.h_diag_max > 0.0)) {
    r.warnings.push_back("problem has no positive mu / h_diag_max; regions undefined");
    return r;
  }
  r.contraction = contraction_report(r.params, r.mu, r.h_diag_max);
  if (r.contraction.admissible) {
    r.rho = ops_budget(r.diameter, r.epsilon, r.contraction.alpha);
    r.rho_cycles = static_cast<long>(std::ceil(*r.rho));
    if (r.epsilon >= r.diameter) r.notes.push_back("epsilon >= D: rho = 0, already within tolerance");
  } else {
    r.warnings.push_back("parameters lie outside C1 and C2: no convergence guarantee");
  }

  constexpr Index kDenseSampleLimit = 1000;
  if (problem.dim() <= kDenseSampleLimit) {
    std::vector<Vector> samples{problem.project(Vector::Zero(problem.dim()))};
    std::mt19937_64 rng(config.seed);
    for (int s = 0; s < 3; ++s) {
      Vector x(problem.dim());
      for (Index i = 0; i < x.size(); ++i) {
        x(i) = std::uniform_real_distribution<double>(problem.box.lo(i), problem.box.hi(i))(rng);
      }
      samples.push_back(x);
    }
    const HessianBounds b = estimate_hessian_bounds(problem, samples);
    if (!b.dominance_ok) {
      r.warnings.push_back("sampled diagonal dominance fails (margin " + shortest(b.mu_estimate) +
                           "); mu is a working value");
    }
    if (b.h_diag_max_estimate > r.h_diag_max * (1.0 + 1e-12)) {
      r.warnings.push_back("sampled max |H_ii| " + shortest(b.h_diag_max_estimate) +
                           " exceeds h_diag_max");
    }
  } else {
    r.notes.push_back("dominance sampling skipped (dimension " + std::to_string(problem.dim()) + ")");
  }
  return r;
}

ValidationReport validate_config(const ExperimentConfig& config) {
  config.validate();
  return validate_config(config, build_problem(config));
}

std::string format_report(const ValidationReport& r) {
  std::ostringstream out;
  out << "algorithm " << to_string(r.algorithm) << ": gamma = " << shortest(r.params.gamma)
      << ", lambda = " << shortest(r.params.lambda) << ", beta = " << shortest(r.params.beta) << '\n'
      << "mu = " << shortest(r.mu) << ", h_diag_max = " << shortest(r.h_diag_max) << '\n'
      << "in_c1 = " << (r.contraction.in_c1 ? "true" : "false")
      << ", in_c2 = " << (r.contraction.in_c2 ? "true" : "false")
      << ", admissible = " << (r.contraction.admissible ? "true" : "false") << '\n'
      << "alpha1 = " << shortest(r.contraction.alpha1) << ", alpha2 = " << shortest(r.contraction.alpha2)
      << ", alpha = " << shortest(r.contraction.alpha) << '\n'
      << "D = " << shortest(r.diameter) << ", epsilon = " << shortest(r.epsilon);
  if (r.rho) out << ", rho = " << shortest(*r.rho) << ", cycles = " << *r.rho_cycles;
  out << '\n';
  for (const auto& n : r.notes) out << "note: " << n << '\n';
  for (const auto& w : r.warnings) out << "warning: " << w << '\n';
  return out.str();
}

}  // namespace tagm
