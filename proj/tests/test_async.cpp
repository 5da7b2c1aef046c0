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

#include <cmath>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "tagm/async.hpp"
#include "tagm/builtin.hpp"
#include "tagm/sync.hpp"

namespace tagm {
namespace {

constexpr double kSlack = 1e-12;

GMParams theory_params(const Problem& p) {
  const double gamma = 0.8 / p.h_diag_max;
  const double lambda = 0.05;
  const double beta = 0.5 * (lambda + 0.5 * gamma * p.mu * (1.0 + 2.0 * lambda));
  return {gamma, lambda, beta};
}

ScriptEvents two_processor_script() {
  // P0 computes at 0 and its message reaches P1 at 5; P1 computes at 6.
  ScriptEvents s;
  s.computes = {{0, 0}, {1, 6}};
  s.sends = {{0, 1, 0}, {1, 0, 6}};
  s.delivers = {{0, 1, 0, 5}, {1, 0, 6, 6}};
  return s;
}

TEST(Network, SynchronousLimitMatchesDgm) {
  const Problem p = builtin_quad16();
  const GMParams params = theory_params(p);
  const DecisionPair z0 = default_start(p);
  Network net(p, params, Schedule::synchronous(), {z0});
  DecisionPair z = z0;
  for (int k = 0; k < 100; ++k) {
    net.tick();
    z = dgm_step(p, params, z);
    const DecisionPair truth = net.true_state();
    ASSERT_EQ(truth.x, z.x) << "tick " << k;
    ASSERT_EQ(truth.y, z.y) << "tick " << k;
    for (int i = 0; i < net.size(); ++i) {
      for (int m : net.relevant_blocks(i)) {
        ASSERT_EQ(p.partition.segment(net.processor(i).local.x, m), p.partition.segment(z.x, m));
        ASSERT_EQ(p.partition.segment(net.processor(i).local.y, m), p.partition.segment(z.y, m));
      }
    }
    EXPECT_EQ(net.ops(), k + 1);
  }
}

TEST(Network, ScriptedPayloadIsTheComputedValue) {
  const Problem p = builtin_quad2();
  const GMParams params{0.2, 0.1, 0.15};
  DecisionPair z0{Vector::Constant(2, 0.8), Vector::Constant(2, -0.3)};
  Network net(p, params, Schedule::scripted(two_processor_script()), {z0});

  net.tick();  // tick 0: P0 computes and sends
  const Vector x0 = net.processor(0).last_x;
  const Vector y0 = net.processor(0).last_y;
  EXPECT_EQ(net.processor(0).last_compute, 0);
  const BlockUpdate expect0 = dgm_block_update(p, params, 0, z0.x, z0.y);
  EXPECT_EQ(x0, expect0.x);

  for (int k = 1; k <= 5; ++k) {
    EXPECT_EQ(net.processor(1).local.x(0), 0.8) << "not delivered before the end of tick 5";
    net.tick();
  }
  // Delivered at tick 5; overwrite is exact.
  EXPECT_EQ(net.processor(1).local.x(0), x0(0));
  EXPECT_EQ(net.processor(1).local.y(0), y0(0));
  EXPECT_EQ(net.processor(1).stamp[0], 0);

  const Vector local_x = net.processor(1).local.x;
  const Vector local_y = net.processor(1).local.y;
  net.tick();  // tick 6: P1 computes from P0's tick-0 payload
  const BlockUpdate expect1 = dgm_block_update(p, params, 1, local_x, local_y);
  EXPECT_EQ(net.processor(1).last_x, expect1.x);
  EXPECT_EQ(net.processor(1).last_y, expect1.y);
}

TEST(Network, IdleProcessorHoldsItsBlock) {
  const Problem p = builtin_quad4();
  ScriptEvents s;
  for (long k = 0; k < 20; ++k)
    for (int i : {0, 1, 3}) s.computes.push_back({i, k});
  Schedule sched = Schedule::scripted(s);
  sched.require_liveness = false;
  Network net(p, theory_params(p), sched, {default_start(p)});
  const Vector held = net.processor(2).last_x;
  for (int k = 0; k < 20; ++k) {
    net.tick();
    EXPECT_EQ(net.processor(2).last_x, held);
    EXPECT_EQ(net.true_state().x(2), held(0));
  }
}

TEST(Network, PoisoningUnreadEntriesChangesNothing) {
  const Problem p = builtin_quad16();
  const GMParams params = theory_params(p);
  const Schedule sched = Schedule::bernoulli(0.5, 3, 0.5);
  Network clean(p, params, sched, {default_start(p)});
  Network poisoned(p, params, sched, {default_start(p)});
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> junk(-1e6, 1e6);
  poisoned.set_poisoner([&](int i, DecisionPair& local) {
    const auto& rel = poisoned.relevant_blocks(i);
    for (int m = 0; m < p.num_blocks(); ++m) {
      if (std::binary_search(rel.begin(), rel.end(), m)) continue;
      p.partition.segment(local.x, m).setConstant(junk(rng));
      p.partition.segment(local.y, m).setConstant(junk(rng));
    }
  });
  for (int k = 0; k < 300; ++k) {
    clean.tick();
    poisoned.tick();
    for (int i = 0; i < p.num_blocks(); ++i) {
      ASSERT_EQ(clean.processor(i).last_x, poisoned.processor(i).last_x);
      ASSERT_EQ(clean.processor(i).last_y, poisoned.processor(i).last_y);
    }
  }
}

TEST(Network, FifoDeliveriesNeverGoBackInTime) {
  const Problem p = builtin_quad16();
  Network net(p, theory_params(p), Schedule::bernoulli(0.6, 5, 0.2), {default_start(p)});
  std::vector<std::vector<long>> last(16, std::vector<long>(16, -1));
  for (int k = 0; k < 500; ++k) {
    net.tick();
    for (int i = 0; i < 16; ++i) {
      for (int j = 0; j < 16; ++j) {
        const long s = net.processor(i).stamp[static_cast<std::size_t>(j)];
        EXPECT_GE(s, last[i][j]);
        last[i][j] = s;
      }
    }
  }
}

TEST(Network, NonFifoDiscardsStalePayloads) {
  const Problem p = builtin_quad2();
  ScriptEvents s;
  s.computes = {{0, 0}, {0, 1}, {1, 0}};
  s.sends = {{0, 1, 0}, {0, 1, 1}, {1, 0, 0}};
  s.delivers = {{0, 1, 0, 5}, {0, 1, 1, 3}, {1, 0, 0, 0}};
  Schedule sched = Schedule::scripted(s);
  sched.fifo = false;
  Network net(p, GMParams{0.2, 0.0, 0.1}, sched, {default_start(p)});
  net.tick();
  net.tick();
  const Vector newest = net.processor(0).last_x;
  for (int k = 2; k <= 5; ++k) net.tick();
  EXPECT_EQ(net.processor(1).stamp[0], 1);
  EXPECT_EQ(net.processor(1).local.x(0), newest(0));
  EXPECT_EQ(net.in_flight(), 0u);
}

TEST(Network, FixedPointUnderAnySchedule) {
  const Problem p = builtin_quad16();
  const Vector x_star = solve_reference(p, 1e-13);
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    Network net(p, theory_params(p), Schedule::bernoulli(0.3, seed, 0.4),
                {DecisionPair::stationary(x_star)});
    for (int k = 0; k < 200; ++k) net.tick();
    EXPECT_LE(net.max_distance(x_star), 1e-10);
  }
}

TEST(Network, RejectsBadInitialState) {
  const Problem p = builtin_quad2();
  EXPECT_THROW(Network(p, GMParams{0.1, 0, 0}, Schedule::synchronous(),
                       {DecisionPair::stationary(Vector::Constant(2, 5.0))}),
               std::invalid_argument);
  EXPECT_THROW(Network(p, GMParams{0.1, 0, 0}, Schedule::synchronous(),
                       {default_start(p), default_start(p), default_start(p)}),
               std::invalid_argument);
}

TEST(OpsCounter, SynchronousCountsEveryTick) {
  const Problem p = builtin_quad4();
  AsyncOptions opt;
  opt.max_ticks = 10;
  const AsyncTrace trace = run_async(p, theory_params(p), Schedule::synchronous(),
                                     {default_start(p)}, opt);
  EXPECT_EQ(ops_of(trace, 0), 0);
  EXPECT_EQ(ops_of(trace, 7), 7);
  EXPECT_THROW(ops_of(trace, 11), std::out_of_range);
  EXPECT_THROW(ops_of(trace, -1), std::out_of_range);
}

TEST(OpsCounter, WaitsForTheSlowestEdge) {
  const Problem p = builtin_quad2();
  ScriptEvents s;
  for (long k = 0; k < 150; ++k) {
    s.computes.push_back({0, k});
    s.computes.push_back({1, k});
    s.sends.push_back({1, 0, k});
    s.delivers.push_back({1, 0, k, k});
  }
  s.sends.push_back({0, 1, 0});
  s.delivers.push_back({0, 1, 0, 100});
  AsyncOptions opt;
  opt.max_ticks = 150;
  const AsyncTrace trace = run_async(p, theory_params(p), Schedule::scripted(s),
                                     {default_start(p)}, opt);
  for (long k = 0; k <= 100; ++k) EXPECT_EQ(ops_of(trace, k), 0) << k;
  EXPECT_EQ(ops_of(trace, 101), 1);
  EXPECT_EQ(ops_of(trace, 150), 1);
}

TEST(OpsCounter, NondecreasingAndLive) {
  const Problem p = builtin_quad16();
  const long horizon = 2000;
  for (double prob : {0.05, 0.2, 0.5}) {
    AsyncOptions opt;
    opt.max_ticks = horizon;
    const AsyncTrace trace =
        run_async(p, theory_params(p), Schedule::bernoulli(prob, 4), {default_start(p)}, opt);
    for (std::size_t k = 1; k < trace.ops_by_tick.size(); ++k) {
      EXPECT_GE(trace.ops_by_tick[k], trace.ops_by_tick[k - 1]);
    }
    double harmonic = 0.0;
    for (int i = 1; i <= 16; ++i) harmonic += 1.0 / i;
    const double expected_cycles = static_cast<double>(horizon) / (1.0 + harmonic / prob);
    EXPECT_GE(static_cast<double>(trace.ops_by_tick.back()), expected_cycles / 2.0) << prob;
  }
}

TEST(RunAsync, RateBoundUnderBernoulliSchedules) {
  const Problem p = builtin_quad16();
  const Vector x_star = solve_reference(p, 1e-13);
  const GMParams params = theory_params(p);
  const double alpha = contraction_report(params, p.mu, p.h_diag_max).alpha;
  for (double prob : {0.1, 0.5, 1.0}) {
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
      AsyncOptions opt;
      opt.max_ticks = 400;
      opt.x_star = x_star;
      const AsyncTrace trace =
          run_async(p, params, Schedule::bernoulli(prob, seed, 0.5), {default_start(p)}, opt);
      for (std::size_t r = 0; r < trace.size(); ++r) {
        EXPECT_LE(trace.dist_inf[r],
                  std::pow(alpha, static_cast<double>(trace.ops[r])) * trace.dist_inf[0] + kSlack);
      }
    }
  }
}

TEST(RunAsync, ReachesTheBallWithinTheCycleBudget) {
  const Problem p = builtin_quad16();
  const Vector x_star = solve_reference(p, 1e-13);
  const GMParams params = theory_params(p);
  const double alpha = contraction_report(params, p.mu, p.h_diag_max).alpha;
  for (double eps : {1e-3, 1e-6}) {
    const long budget = static_cast<long>(std::ceil(ops_budget(p.box.diameter(), eps, alpha)));
    AsyncOptions opt;
    opt.max_ticks = 20000;
    opt.x_star = x_star;
    opt.epsilon = eps;
    const AsyncTrace trace =
        run_async(p, params, Schedule::bernoulli(0.3, 7), {default_start(p)}, opt);
    ASSERT_TRUE(trace.converged);
    EXPECT_LE(trace.ops.back(), budget);
  }
}

TEST(RunAsync, StrideAndCostStop) {
  const Problem p = builtin_quad4();
  const Vector x_star = solve_reference(p, 1e-13);
  AsyncOptions opt;
  opt.max_ticks = 25;
  opt.stride = 10;
  opt.x_star = x_star;
  AsyncTrace trace = run_async(p, theory_params(p), Schedule::synchronous(), {default_start(p)}, opt);
  EXPECT_EQ(trace.ticks, (std::vector<long>{0, 10, 20, 25}));
  EXPECT_EQ(trace.ops.size(), trace.cost.size());
  EXPECT_EQ(trace.dist_inf.size(), trace.size());

  opt.stride = 1;
  opt.max_ticks = 10000;
  opt.stop = StopRule::cost;
  opt.epsilon = 1e-10;
  trace = run_async(p, theory_params(p), Schedule::synchronous(), {default_start(p)}, opt);
  EXPECT_TRUE(trace.converged);
  EXPECT_LE(trace.cost.back() - p.value(x_star), 1e-10);
}

TEST(RunAsync, DeterministicForEqualSeeds) {
  const Problem p = builtin_quad16();
  AsyncOptions opt;
  opt.max_ticks = 300;
  opt.record_states = true;
  const auto a = run_async(p, theory_params(p), Schedule::bernoulli(0.3, 7, 0.3), {default_start(p)}, opt);
  const auto b = run_async(p, theory_params(p), Schedule::bernoulli(0.3, 7, 0.3), {default_start(p)}, opt);
  EXPECT_EQ(a.cost, b.cost);
  EXPECT_EQ(a.ops_by_tick, b.ops_by_tick);
  EXPECT_EQ(a.computations, b.computations);
  ASSERT_EQ(a.true_state.size(), b.true_state.size());
  for (std::size_t i = 0; i < a.true_state.size(); ++i) EXPECT_EQ(a.true_state[i], b.true_state[i]);
  const auto c = run_async(p, theory_params(p), Schedule::bernoulli(0.3, 8, 0.3), {default_start(p)}, opt);
  EXPECT_NE(a.cost, c.cost);
}

TEST(RunAsync, RejectsNonLiveScripts) {
  const Problem p = builtin_quad2();
  ScriptEvents s;
  s.computes = {{0, 0}};
  AsyncOptions opt;
  opt.max_ticks = 10;
  EXPECT_THROW(run_async(p, theory_params(p), Schedule::scripted(s), {default_start(p)}, opt),
               std::invalid_argument);
}

TEST(RunAsync, NonFiniteValuesAbortWithTheTick) {
  Problem p = builtin_quad2();
  p.grad_block = [](int, const Vector&) { return Vector::Constant(1, NAN); };
  AsyncOptions opt;
  opt.max_ticks = 5;
  try {
    run_async(p, GMParams{0.1, 0, 0}, Schedule::synchronous(), {default_start(p)}, opt);
    FAIL();
  } catch (const std::runtime_error& e) {
    EXPECT_NE(std::string(e.what()).find("tick 0"), std::string::npos) << e.what();
  }
}

TEST(InvarianceProbe, CleanOnRandomSchedules) {
  const Problem p = builtin_quad16();
  const Vector x_star = solve_reference(p, 1e-13);
  const GMParams params = theory_params(p);
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.05, 1.0);
  for (int s = 0; s < 200; ++s) {
    const DecisionPair z0{testing::random_point(p.box, rng), testing::random_point(p.box, rng)};
    Schedule sched = Schedule::bernoulli(u(rng), static_cast<std::uint64_t>(s), u(rng));
    sched.fifo = s % 2 == 0;
    const auto report = invariance_probe(p, params, sched, {z0}, 60, x_star);
    EXPECT_TRUE(report.clean) << "schedule " << s << " tick " << report.violation_tick;
  }
}

TEST(InvarianceProbe, HorizonZeroIsClean) {
  const Problem p = builtin_quad4();
  const auto report = invariance_probe(p, theory_params(p), Schedule::synchronous(),
                                       {default_start(p)}, 0);
  EXPECT_TRUE(report.clean);
  EXPECT_EQ(report.ticks_checked, 1);
}

TEST(InvarianceProbe, InadmissibleParametersAreInformational) {
  const Problem p = builtin_quad16();
  const GMParams wild{10.0 / p.h_diag_max, 0.0, 0.0};
  const auto report = invariance_probe(p, wild, Schedule::synchronous(), {default_start(p)}, 50);
  if (!report.clean) {
    EXPECT_GE(report.violation_tick, 0);
    EXPECT_GT(report.violation_distance, report.violation_radius);
  }
}

TEST(Schedule, ScriptRoundTripAndErrors) {
  const ScriptEvents s = two_processor_script();
  std::stringstream text;
  write_script(text, s);
  const ScriptEvents back = read_script(text);
  EXPECT_EQ(back.computes.size(), s.computes.size());
  EXPECT_EQ(back.delivers.size(), s.delivers.size());

  std::istringstream causal("SEND 0 1 4\nDELIVER 0 1 4 2\n");
  EXPECT_THROW(read_script(causal), std::invalid_argument);
  std::istringstream orphan("DELIVER 0 1 4 6\n");
  EXPECT_THROW(read_script(orphan), std::invalid_argument);
  std::istringstream garbled("COMPUTE 0\n");
  EXPECT_THROW(read_script(garbled), std::runtime_error);

  ScriptEvents off_graph;
  off_graph.sends = {{0, 2, 0}};
  EXPECT_THROW(off_graph.validate_against(NeighborGraph(3, {{0, 1}})), std::invalid_argument);
}

TEST(Schedule, AdversarialScriptsAreLive) {
  const Problem p = builtin_quad16();
  for (auto pattern : {AdversarialPattern::growing_delays, AdversarialPattern::growing_compute_gaps,
                       AdversarialPattern::straggler}) {
    const ScriptEvents s = adversarial_script(p.graph, 2000, pattern, 1.05);
    EXPECT_TRUE(lint_liveness(s, p.graph, 2000).empty());
  }
  EXPECT_THROW(adversarial_script(p.graph, 100, AdversarialPattern::straggler, 1.0),
               std::invalid_argument);
}

TEST(Schedule, RejectsBadProbabilities) {
  EXPECT_THROW(Schedule::bernoulli(0.0, 1), std::invalid_argument);
  EXPECT_THROW(Schedule::bernoulli(1.5, 1), std::invalid_argument);
  EXPECT_THROW(Schedule::bernoulli(0.5, 1, 0.0), std::invalid_argument);
}

}  // namespace
}  // namespace tagm
