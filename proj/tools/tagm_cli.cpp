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

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "tagm/dataset.hpp"
#include "tagm/experiment.hpp"

namespace {

using namespace tagm;

constexpr int kOk = 0;
constexpr int kConfigError = 1;
constexpr int kRuntimeAbort = 2;
constexpr int kDnf = 3;

struct Flags {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<double> p;
  std::optional<std::string> algo;
  bool synthetic = false;
  std::optional<Index> per_class;
  std::optional<std::string> data;
  std::string results;
};

ExperimentConfig load(const Flags& f) {
  ExperimentConfig c;
  if (!f.config.empty()) c = read_config_file(f.config);
  if (f.data) {
    c.problem = ProblemKind::logistic;
    c.data_dir = *f.data;
  }
  if (f.synthetic) c.problem = ProblemKind::synthetic;
  if (f.per_class) c.per_class = *f.per_class;
  if (f.seed) {
    c.seed = *f.seed;
    c.seeds = {*f.seed};
  }
  if (f.p) {
    c.p = *f.p;
    c.p_values = {*f.p};
  }
  if (f.algo) {
    try {
      c.algorithm = parse_algorithm(*f.algo);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("--algo: ") + e.what());
    }
    c.algorithms = {c.algorithm};
  }
  if (!f.out.empty()) c.out_dir = f.out;
  c.validate();
  return c;
}

std::vector<std::string> preamble(const ExperimentConfig& c, const PreparedProblem& prepared) {
  std::vector<std::string> lines;
  std::istringstream cfg(write_config(c));
  for (std::string line; std::getline(cfg, line);) lines.push_back(line);
  for (const auto& n : prepared.notes) lines.push_back(n);
  std::istringstream report(format_report(validate_config(c, prepared.problem)));
  for (std::string line; std::getline(report, line);) lines.push_back(line);
  return lines;
}

std::filesystem::path out_dir(const ExperimentConfig& c) {
  std::filesystem::path dir(c.out_dir);
  std::filesystem::create_directories(dir);
  return dir;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  out.flush();
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
}

std::string commented(const std::vector<std::string>& lines) {
  std::string s;
  for (const auto& l : lines) s += "# " + l + "\n";
  return s;
}

int cmd_validate(const Flags& f) {
  const ExperimentConfig c = load(f);
  std::cout << format_report(validate_config(c));
  return kOk;
}

int cmd_run(const Flags& f) {
  const ExperimentConfig c = load(f);
  const PreparedProblem prepared = prepare_problem(c);
  AsyncTrace trace;
  const ResultRow row = run_cell(prepared, c, c.algorithm, c.p, c.seed, &trace);
  const auto dir = out_dir(c);
  const auto lines = preamble(c, prepared);
  emit_trace(to_table(trace), (dir / "trace.csv").string(), lines);
  std::ostringstream result;
  result << commented(lines);
  write_results(result, {row});
  write_file(dir / "result.csv", result.str());
  write_results(std::cout, {row});
  return row.dnf() ? kDnf : kOk;
}

int cmd_sweep(const Flags& f) {
  const ExperimentConfig c = load(f);
  const PreparedProblem prepared = prepare_problem(c);
  const auto rows = run_table2(prepared, c);
  const auto dir = out_dir(c);
  const auto lines = preamble(c, prepared);

  std::ostringstream table;
  table << commented(lines);
  write_results(table, rows);
  write_file(dir / "table2.csv", table.str());

  std::vector<std::string> warnings;
  const auto reductions = percent_reduction(rows, &warnings);
  std::ostringstream red;
  write_reductions(red, reductions);
  write_file(dir / "reduction.csv", red.str());
  for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';

  write_results(std::cout, rows);
  for (const auto& r : rows) {
    if (r.dnf()) return kDnf;
  }
  return kOk;
}

int cmd_reduce(const Flags& f) {
  std::ifstream in(f.results);
  if (!in) throw ConfigError("cannot open '" + f.results + "'");
  std::vector<ResultRow> rows;
  try {
    rows = read_results(in);
  } catch (const std::runtime_error& e) {
    throw ConfigError(f.results + ": " + e.what());
  }
  std::vector<std::string> warnings;
  const auto reductions = percent_reduction(rows, &warnings);
  for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
  std::ostringstream text;
  write_reductions(text, reductions);
  if (!f.out.empty()) {
    std::filesystem::create_directories(f.out);
    write_file(std::filesystem::path(f.out) / "reduction.csv", text.str());
  }
  std::cout << text.str();
  for (const auto& r : rows) {
    if (r.dnf()) return kDnf;
  }
  return kOk;
}

int cmd_ingest_check(const Flags& f) {
  const ExperimentConfig c = load(f);
  SampleSet set;
  if (c.problem == ProblemKind::logistic) {
    set = load_fashion_mnist(c.data_dir);
    std::cout << "loaded " << set.size() << " samples of dimension " << set.dim() << '\n';
    if (f.per_class) set = subsample(set, c.per_class, c.data_seed);
  } else if (c.problem == ProblemKind::synthetic) {
    set = synthetic_blobs(c.per_class, kFashionClasses, c.synthetic_dim, c.synthetic_spread,
                          c.data_seed);
    std::cout << "synthetic blobs\n";
  } else {
    throw ConfigError("ingest-check needs --data <dir>, --synthetic or a dataset config");
  }
  std::cout << "samples " << set.size() << ", dimension " << set.dim() << ", train "
            << set.train.size() << ", test " << set.test.size() << '\n'
            << "feature range [" << set.features.minCoeff() << ", " << set.features.maxCoeff()
            << "]\nclass counts";
  for (Index n : set.class_counts()) std::cout << ' ' << n;
  std::cout << '\n';
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Totally asynchronous generalized momentum simulator"};
  app.require_subcommand(1);
  Flags flags;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", flags.config, "Configuration file");
    sub->add_option("--out", flags.out, "Output directory");
    sub->add_option("--seed", flags.seed, "Schedule seed");
    sub->add_option("--p", flags.p, "Computation/communication probability");
    sub->add_option("--algo", flags.algo, "GD, HB, NAG or GM");
    sub->add_flag("--synthetic", flags.synthetic, "Use the synthetic Gaussian-blob dataset");
    sub->add_option("--per-class", flags.per_class, "Samples per class");
    sub->add_option("--data", flags.data, "Directory holding the IDX files");
  };

  auto* validate = app.add_subcommand("validate", "Report parameter regions, alpha and rho");
  auto* run = app.add_subcommand("run", "Run one cell and export its trace");
  auto* sweep = app.add_subcommand("sweep", "Run the algorithm x p x seed sweep");
  auto* reduce = app.add_subcommand("reduce", "Percent reductions from a results table");
  auto* ingest = app.add_subcommand("ingest-check", "Dataset sanity report");
  for (auto* sub : {validate, run, sweep, ingest}) add_common(sub);
  reduce->add_option("results", flags.results, "Results CSV from sweep")->required();
  reduce->add_option("--out", flags.out, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (*validate) return cmd_validate(flags);
    if (*run) return cmd_run(flags);
    if (*sweep) return cmd_sweep(flags);
    if (*reduce) return cmd_reduce(flags);
    if (*ingest) return cmd_ingest_check(flags);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntimeAbort;
  }
  return kConfigError;
}
