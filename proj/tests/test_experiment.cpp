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

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "tagm/builtin.hpp"
#include "tagm/experiment.hpp"
#include "tagm/quadratic.hpp"

namespace tagm {
namespace {

ExperimentConfig parse(const std::string& text) {
  std::istringstream in(text);
  return read_config(in);
}

std::string error_of(const std::string& text) {
  try {
    parse(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

/// quad16 with C2 parameters for GM.
ExperimentConfig quad16_config() {
  const Problem p = builtin_quad16();
  ExperimentConfig c;
  c.problem = ProblemKind::builtin;
  c.builtin = "quad16";
  c.algorithm = Algorithm::GM;
  c.gamma = 0.8 / p.h_diag_max;
  c.lambda = 0.05;
  c.beta = 0.5 * (0.05 + 0.5 * *c.gamma * p.mu * 1.1);
  c.schedule = ScheduleKind::bernoulli;
  c.send_mode = SendMode::on_compute;
  c.epsilon = 1e-6;
  c.max_ticks = 20000;
  c.reference_tol = 1e-13;
  c.algorithms = {Algorithm::GM};
  return c;
}

TEST(ReadConfig, ParsesEverySection) {
  const ExperimentConfig c = parse(R"(
[problem]
kind = synthetic
per_class = 20
synthetic_dim = 8
theta = 0.02
processors = 4
box_lo = -5
box_hi = 5
[algorithm]
name = nag
gamma = 0.05
lambda = 0.3
beta = 0.3
[schedule]
p = 0.5
send_mode = on_compute
fifo = false
seed = 42
[stop]
epsilon = 1e-5
max_ticks = 1000
rule = cost
[sweep]
p_values = 1.0, 0.5
algorithms = GD, GM
seeds = 1, 2, 3
[output]
dir = out
stride = 5
)");
  EXPECT_EQ(c.problem, ProblemKind::synthetic);
  EXPECT_EQ(c.per_class, 20);
  EXPECT_EQ(c.synthetic_dim, 8);
  EXPECT_EQ(c.processors, 4);
  EXPECT_EQ(c.algorithm, Algorithm::NAG);
  EXPECT_EQ(*c.gamma, 0.05);
  EXPECT_EQ(c.p, 0.5);
  EXPECT_EQ(c.send_mode, SendMode::on_compute);
  EXPECT_FALSE(c.fifo);
  EXPECT_EQ(c.seed, 42u);
  EXPECT_EQ(c.stop_rule, StopRule::cost);
  EXPECT_EQ(c.p_values, (std::vector<double>{1.0, 0.5}));
  EXPECT_EQ(c.algorithms, (std::vector<Algorithm>{Algorithm::GD, Algorithm::GM}));
  EXPECT_EQ(c.seeds, (std::vector<std::uint64_t>{1, 2, 3}));
  EXPECT_EQ(c.stride, 5);
  EXPECT_EQ(resolve_params(c, Algorithm::NAG), (GMParams{0.05, 0.3, 0.3}));
  EXPECT_EQ(resolve_params(c, Algorithm::GD), default_params(Algorithm::GD));
}

TEST(ReadConfig, ResolvedConfigRoundTrips) {
  ExperimentConfig c = quad16_config();
  c.p_values = {0.3, 0.1};
  c.seeds = {7};
  const std::string text = write_config(c);
  const ExperimentConfig back = parse(text);
  EXPECT_EQ(write_config(back), text);
}

TEST(ReadConfig, ErrorsNameTheLineOrField) {
  EXPECT_NE(error_of("[problem\nkind = builtin\n").find("line 1"), std::string::npos);
  EXPECT_NE(error_of("[stop]\nepsilon = abc\n").find("stop.epsilon"), std::string::npos);
  EXPECT_NE(error_of("[stop]\nepsilon = 0\n").find("epsilon"), std::string::npos);
  EXPECT_NE(error_of("[schedule]\np = 1.5\n").find("schedule.p"), std::string::npos);
  EXPECT_NE(error_of("[schedule]\npp = 1\n").find("schedule.pp"), std::string::npos);
  EXPECT_NE(error_of("[algorithm]\nname = adam\n").find("algorithm.name"), std::string::npos);
  EXPECT_NE(error_of("[algorithm]\nname = NAG\nbeta = 0.2\n").find("NAG"), std::string::npos);
  EXPECT_NE(error_of("[bogus]\nx = 1\n").find("bogus"), std::string::npos);
  EXPECT_NE(error_of("[algorithm]\ngamma = 0\n").find("gamma"), std::string::npos);
}

TEST(DefaultParams, TableValues) {
  EXPECT_EQ(default_params(Algorithm::GD), (GMParams{0.1, 0.0, 0.0}));
  EXPECT_EQ(default_params(Algorithm::HB), (GMParams{0.1, 0.0, 0.075}));
  EXPECT_EQ(default_params(Algorithm::NAG), (GMParams{0.1, 0.35, 0.35}));
  EXPECT_EQ(default_params(Algorithm::GM), (GMParams{0.1, 0.05, 0.5}));
}

TEST(PercentReduction, Examples) {
  EXPECT_NEAR(percent_reduction(666, 168), 74.8, 0.05);
  EXPECT_NEAR(percent_reduction(309, 168), 45.6, 0.05);
  EXPECT_EQ(percent_reduction(200, 200), 0.0);
  EXPECT_DOUBLE_EQ(percent_reduction(666, 168), percent_reduction(6660, 1680));
  EXPECT_THROW(percent_reduction(0, 1), std::invalid_argument);
}

TEST(PercentReduction, PairsRowsAndWarns) {
  std::vector<ResultRow> rows{
      {Algorithm::GD, 1.0, 1, 666, 600, 0.5},  {Algorithm::HB, 1.0, 1, 309, 300, 0.5},
      {Algorithm::GM, 1.0, 1, 168, 160, 0.5},  {Algorithm::GD, 0.5, 1, 900, 90, 0.5},
      {Algorithm::NAG, 1.0, 1, std::nullopt, 10, 0.5}};
  std::vector<std::string> warnings;
  const auto red = percent_reduction(rows, &warnings);
  ASSERT_EQ(red.size(), 2u);
  EXPECT_EQ(red[0].baseline, Algorithm::GD);
  EXPECT_NEAR(red[0].percent, 74.8, 0.05);
  EXPECT_NEAR(red[1].percent, 45.6, 0.05);
  EXPECT_EQ(warnings.size(), 2u);
}

TEST(Results, CsvRoundTrip) {
  std::vector<ResultRow> rows{{Algorithm::GD, 0.05, 3, 1234, 56, 0.123456789012345678},
                              {Algorithm::GM, 0.05, 3, std::nullopt, 7, 1.0 / 3.0}};
  std::stringstream text;
  write_results(text, rows);
  const auto back = read_results(text);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0].iterations_to_eps, 1234);
  EXPECT_EQ(back[0].final_cost, rows[0].final_cost);
  EXPECT_TRUE(back[1].dnf());
  EXPECT_EQ(back[1].final_cost, rows[1].final_cost);
}

class TraceFiles : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = std::filesystem::temp_directory_path() /
           ("tagm_trace_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    std::filesystem::create_directories(dir_);
  }
  void TearDown() override { std::filesystem::remove_all(dir_); }
  std::filesystem::path dir_;
};

TEST_F(TraceFiles, ThreeTicksGiveFourLines) {
  TraceTable t;
  t.k = {0, 1, 2};
  t.ops = {0, 1, 1};
  t.cost = {1.0, 0.1 + 0.2, std::acos(-1.0)};
  t.dist_inf = {0.5, std::nullopt, 1e-300};
  const std::string path = (dir_ / "t.csv").string();
  emit_trace(t, path);
  std::ifstream in(path);
  std::vector<std::string> lines;
  for (std::string l; std::getline(in, l);) lines.push_back(l);
  ASSERT_EQ(lines.size(), 4u);
  EXPECT_EQ(lines[0], "k,ops,cost,dist_inf");
  EXPECT_EQ(lines[2], "1,1,0.30000000000000004,");
  const TraceTable back = read_trace_file(path);
  EXPECT_EQ(back.k, t.k);
  EXPECT_EQ(back.ops, t.ops);
  EXPECT_EQ(back.cost, t.cost);
  EXPECT_EQ(back.dist_inf, t.dist_inf);
}

TEST_F(TraceFiles, PreambleAndErrors) {
  TraceTable t;
  t.k = {0};
  t.ops = {0};
  t.cost = {2.0};
  t.dist_inf = {std::nullopt};
  const std::string path = (dir_ / "p.csv").string();
  emit_trace(t, path, {"box [-10, 10]"});
  std::ifstream in(path);
  std::string first;
  std::getline(in, first);
  EXPECT_EQ(first, "# box [-10, 10]");
  EXPECT_EQ(read_trace_file(path).size(), 1u);
  EXPECT_THROW(emit_trace(TraceTable{}, path), std::invalid_argument);
  EXPECT_THROW(emit_trace(t, (dir_ / "missing" / "x.csv").string()), std::runtime_error);
}

TEST(ValidateConfig, ReportsRegionsAndAlpha) {
  Matrix q(2, 2);
  q << 2.0, -1.0, -1.0, 2.0;
  const Problem p = make_quadratic(q, Vector::Zero(2), BoxConstraint::uniform(2, -1, 1),
                                   BlockPartition::scalar(2));
  ASSERT_EQ(p.mu, 1.0);
  ASSERT_EQ(p.h_diag_max, 2.0);
  ExperimentConfig c;
  c.algorithm = Algorithm::GM;
  const ValidationReport r = validate_config(c, p);
  const ContractionReport expect = contraction_report(default_params(Algorithm::GM), 1.0, 2.0);
  EXPECT_EQ(r.contraction.in_c1, expect.in_c1);
  EXPECT_EQ(r.contraction.in_c2, expect.in_c2);
  EXPECT_EQ(r.contraction.alpha, expect.alpha);
  const std::string text = format_report(r);
  EXPECT_NE(text.find("in_c1"), std::string::npos);
  EXPECT_NE(text.find("alpha"), std::string::npos);
}

TEST(ValidateConfig, EpsilonAboveDiameter) {
  ExperimentConfig c = quad16_config();
  c.epsilon = 5.0;
  const ValidationReport r = validate_config(c);
  ASSERT_TRUE(r.rho.has_value());
  EXPECT_EQ(*r.rho, 0.0);
  EXPECT_FALSE(r.notes.empty());
}

TEST(ValidateConfig, ZeroStepIsRejected) {
  ExperimentConfig c = quad16_config();
  c.gamma = 0.0;
  EXPECT_THROW(validate_config(c), ConfigError);
}

TEST(ValidateConfig, InadmissibleWarns) {
  ExperimentConfig c;
  c.per_class = 5;
  c.synthetic_dim = 4;
  const ValidationReport r = validate_config(c);
  EXPECT_FALSE(r.contraction.admissible);
  EXPECT_FALSE(r.warnings.empty());
}

TEST(RunCell, FullProbabilityMatchesSynchronousCount) {
  const ExperimentConfig c = quad16_config();
  const PreparedProblem prepared = prepare_problem(c);
  const ResultRow row = run_cell(prepared, c, Algorithm::GM, 1.0, 1);
  ASSERT_FALSE(row.dnf());
  const SyncTrace sync = run_sync(prepared.problem, resolve_params(c, Algorithm::GM), SyncLaw::dGM,
                                  default_start(prepared.problem), 20000, c.epsilon, prepared.x_star);
  ASSERT_TRUE(sync.converged);
  EXPECT_EQ(*row.iterations_to_eps, static_cast<long>(sync.size()) - 1);
}

TEST(RunCell, CostNonincreasingAfterFirstCycleAtFullProbability) {
  for (const std::string& name : {"quad2", "quad4", "quad16", "quad16_blocks"}) {
    ExperimentConfig c = quad16_config();
    c.builtin = name;
    const Problem p = builtin_problem(name);
    c.gamma = 0.8 / p.h_diag_max;
    c.beta = 0.5 * (0.05 + 0.5 * *c.gamma * p.mu * 1.1);
    const PreparedProblem prepared = prepare_problem(c);
    AsyncTrace trace;
    run_cell(prepared, c, Algorithm::GM, 1.0, 1, &trace);
    for (std::size_t k = 2; k < trace.size(); ++k) {
      EXPECT_LE(trace.cost[k], trace.cost[k - 1] + 1e-15) << name << " tick " << k;
    }
  }
}

TEST(RunCell, AdmissibleRunsStayWithinTheCycleBudget) {
  ExperimentConfig c = quad16_config();
  const PreparedProblem prepared = prepare_problem(c);
  const ValidationReport report = validate_config(c, prepared.problem);
  ASSERT_TRUE(report.rho_cycles.has_value());
  for (double p : {1.0, 0.5, 0.1}) {
    for (std::uint64_t seed : {1u, 2u}) {
      const ResultRow row = run_cell(prepared, c, Algorithm::GM, p, seed);
      ASSERT_FALSE(row.dnf());
      EXPECT_LE(row.ops_at_stop, *report.rho_cycles);
    }
  }
}

TEST(RunTable2, DeterministicCsv) {
  ExperimentConfig c = quad16_config();
  c.algorithms = {Algorithm::GD, Algorithm::GM};
  c.gamma.reset();
  c.beta.reset();
  c.lambda.reset();
  c.p_values = {1.0, 0.3};
  c.seeds = {7};
  const PreparedProblem prepared = prepare_problem(c);
  std::ostringstream a, b;
  write_results(a, run_table2(prepared, c));
  write_results(b, run_table2(prepared, c));
  const std::string text = a.str();
  EXPECT_EQ(text, b.str());
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 5);
}

TEST(RunTable2, SmallLogisticOrdering) {
  ExperimentConfig c;
  c.per_class = 20;
  c.synthetic_dim = 4;
  c.processors = 8;
  c.p_values = {1.0};
  c.seeds = {1};
  c.max_ticks = 50000;
  const PreparedProblem prepared = prepare_problem(c);
  const auto rows = run_table2(prepared, c);
  ASSERT_EQ(rows.size(), 4u);
  for (const auto& r : rows) ASSERT_FALSE(r.dnf()) << to_string(r.algorithm);
  EXPECT_LT(*rows[3].iterations_to_eps, *rows[0].iterations_to_eps);
}

}  // namespace
}  // namespace tagm
