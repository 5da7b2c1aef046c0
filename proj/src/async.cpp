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

#include "tagm/async.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "tagm/sync.hpp"

namespace tagm {

namespace {

enum StreamTag : std::uint32_t { kProcessorStream = 1, kEdgeStream = 2 };

std::mt19937_64 make_stream(std::uint64_t seed, std::uint32_t tag, int a, int b) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32), tag,
                    static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b)};
  return std::mt19937_64(seq);
}

/// Uniform draw in [0, 1) from the top 53 bits.
double unit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

OpsCounter::OpsCounter(const NeighborGraph& graph)
    : computed_(graph.size(), false), delivered_(graph.size()) {
  for (int i = 0; i < graph.size(); ++i) {
    neighbors_.push_back(graph.neighbors(i));
    delivered_[i].assign(graph.neighbors(i).size(), false);
    pending_ += 1 + static_cast<long>(graph.neighbors(i).size());
  }
}

void OpsCounter::record_compute(int processor, long tick) {
  if (tick > last_close_ && !computed_[processor]) {
    computed_[processor] = true;
    --pending_;
  }
}

void OpsCounter::record_delivery(int sender, int receiver, long compute_time) {
  if (compute_time <= last_close_) return;
  const auto& nb = neighbors_[receiver];
  const auto it = std::lower_bound(nb.begin(), nb.end(), sender);
  if (it == nb.end() || *it != sender) return;
  auto flag = delivered_[receiver][static_cast<std::size_t>(it - nb.begin())];
  if (!flag) {
    flag = true;
    --pending_;
  }
}

bool OpsCounter::close_if_complete(long tick) {
  if (pending_ > 0) return false;
  ++cycles_;
  last_close_ = tick;
  std::fill(computed_.begin(), computed_.end(), false);
  pending_ = 0;
  for (std::size_t i = 0; i < delivered_.size(); ++i) {
    std::fill(delivered_[i].begin(), delivered_[i].end(), false);
    pending_ += 1 + static_cast<long>(delivered_[i].size());
  }
  return true;
}

Network::Network(const Problem& problem, const GMParams& params, Schedule schedule,
                 const std::vector<DecisionPair>& z0)
    : problem_(problem),
      params_(params),
      schedule_(std::move(schedule)),
      ops_(problem.graph) {
  params_.validate();
  schedule_.validate();
  const int n = problem.num_blocks();
  if (z0.size() != 1 && z0.size() != static_cast<std::size_t>(n)) {
    throw std::invalid_argument("z0 must hold one pair or one per processor");
  }
  for (const auto& z : z0) {
    if (z.x.size() != problem.dim() || z.y.size() != problem.dim() ||
        !problem.box.contains(z.x) || !problem.box.contains(z.y)) {
      throw std::invalid_argument("initial state must lie in Z = X x X");
    }
  }

  for (int i = 0; i < n; ++i) {
    ProcessorState s;
    s.id = i;
    s.local = z0.size() == 1 ? z0.front() : z0[static_cast<std::size_t>(i)];
    s.stamp.assign(static_cast<std::size_t>(n), -1);
    s.last_x = problem.partition.segment(s.local.x, i);
    s.last_y = problem.partition.segment(s.local.y, i);
    procs_.push_back(std::move(s));

    std::vector<int> rel = problem.graph.neighbors(i);
    rel.insert(std::lower_bound(rel.begin(), rel.end(), i), i);
    relevant_.push_back(std::move(rel));

    processor_rng_.push_back(make_stream(schedule_.seed, kProcessorStream, i, 0));
    for (int j : problem.graph.neighbors(i)) {
      edge_rng_.emplace(std::pair{i, j}, make_stream(schedule_.seed, kEdgeStream, i, j));
    }
  }

  if (schedule_.kind == ScheduleKind::scripted) {
    const ScriptEvents& script = *schedule_.script;
    script.validate_against(problem.graph);
    for (const auto& c : script.computes) script_computes_.emplace(c.tick, c.processor);
    for (const auto& s : script.sends)
      script_sends_.emplace(s.tick, std::pair{s.sender, s.receiver});
    for (const auto& d : script.delivers)
      script_deliveries_.emplace(std::tuple{d.sender, d.receiver, d.send_tick},
                                 d.deliver_tick);
  }
}

bool Network::draw(std::mt19937_64& rng, double p) { return unit(rng) < p; }

long Network::draw_delay(std::mt19937_64& rng) {
  const double u = 1.0 - unit(rng);  // (0, 1]
  if (schedule_.p_deliver >= 1.0) return 0;
  return static_cast<long>(std::floor(std::log(u) / std::log1p(-schedule_.p_deliver)));
}

void Network::send(int sender, int receiver, long deliver_time) {
  const ProcessorState& from = procs_[static_cast<std::size_t>(sender)];
  if (schedule_.fifo) {
    auto& last = edge_last_delivery_[{sender, receiver}];
    deliver_time = std::max(deliver_time, last);
    last = deliver_time;
  }
  Message m{sender,        receiver,  from.last_x, from.last_y, from.last_compute,
            time_,         deliver_time, next_sequence_++};
  in_flight_.emplace(std::pair{m.deliver_time, m.sequence}, std::move(m));
}

void Network::deliver(const Message& m) {
  ProcessorState& to = procs_[static_cast<std::size_t>(m.receiver)];
  auto& stamp = to.stamp[static_cast<std::size_t>(m.sender)];
  if (!schedule_.fifo && m.compute_time < stamp) return;
  problem_.partition.segment(to.local.x, m.sender) = m.x;
  problem_.partition.segment(to.local.y, m.sender) = m.y;
  stamp = m.compute_time;
  ops_.record_delivery(m.sender, m.receiver, m.compute_time);
}

void Network::tick() {
  const long k = time_;
  const int n = size();
  const bool scripted = schedule_.kind == ScheduleKind::scripted;

  if (poisoner_) {
    for (auto& s : procs_) poisoner_(s.id, s.local);
  }

  std::vector<bool> computes(static_cast<std::size_t>(n), false);
  if (scripted) {
    auto [lo, hi] = script_computes_.equal_range(k);
    for (auto it = lo; it != hi; ++it) computes[static_cast<std::size_t>(it->second)] = true;
  } else {
    for (int i = 0; i < n; ++i)
      computes[static_cast<std::size_t>(i)] =
          draw(processor_rng_[static_cast<std::size_t>(i)], schedule_.p_compute);
  }

  // Each processor reads and writes only its own copy, so the order of the
  // updates below does not matter.
  for (int i = 0; i < n; ++i) {
    if (!computes[static_cast<std::size_t>(i)]) continue;
    ProcessorState& s = procs_[static_cast<std::size_t>(i)];
    BlockUpdate u = dgm_block_update(problem_, params_, i, s.local.x, s.local.y);
    if (!u.x.allFinite() || !u.y.allFinite()) {
      std::ostringstream msg;
      msg << "non-finite update at tick " << k << " on processor " << i
          << "\n  x_i = " << u.x.transpose() << "\n  y_i = " << u.y.transpose()
          << "\n  local x = " << s.local.x.transpose()
          << "\n  local y = " << s.local.y.transpose();
      throw std::runtime_error(msg.str());
    }
    problem_.partition.segment(s.local.x, i) = u.x;
    problem_.partition.segment(s.local.y, i) = u.y;
    s.last_x = std::move(u.x);
    s.last_y = std::move(u.y);
    s.last_compute = k;
    s.stamp[static_cast<std::size_t>(i)] = k;
    ++s.computations;
    ops_.record_compute(i, k);
  }

  if (scripted) {
    auto [lo, hi] = script_sends_.equal_range(k);
    for (auto it = lo; it != hi; ++it) {
      const auto [from, to] = it->second;
      const auto found = script_deliveries_.find({from, to, k});
      if (found == script_deliveries_.end()) continue;  // never arrives
      send(from, to, found->second);
    }
  } else {
    for (int i = 0; i < n; ++i) {
      bool sends = false;
      if (schedule_.send_mode == SendMode::on_compute) {
        sends = computes[static_cast<std::size_t>(i)];
      } else {
        sends = draw(processor_rng_[static_cast<std::size_t>(i)], schedule_.p_send);
      }
      if (!sends) continue;
      for (int j : problem_.graph.neighbors(i)) {
        send(i, j, k + draw_delay(edge_rng_.at({i, j})));
      }
    }
  }

  while (!in_flight_.empty() && in_flight_.begin()->first.first <= k) {
    deliver(in_flight_.begin()->second);
    in_flight_.erase(in_flight_.begin());
  }

  ops_.close_if_complete(k);
  ++time_;
}

DecisionPair Network::true_state() const {
  DecisionPair z{Vector(problem_.dim()), Vector(problem_.dim())};
  for (const auto& s : procs_) {
    problem_.partition.segment(z.x, s.id) = s.last_x;
    problem_.partition.segment(z.y, s.id) = s.last_y;
  }
  return z;
}

double Network::local_distance(int i, const Vector& x_star) const {
  const ProcessorState& s = procs_.at(i);
  double d = 0.0;
  for (int m : relevant_[static_cast<std::size_t>(i)]) {
    const auto star = problem_.partition.segment(x_star, m);
    d = std::max(d, distance_inf(problem_.partition.segment(s.local.x, m), star));
    d = std::max(d, distance_inf(problem_.partition.segment(s.local.y, m), star));
  }
  return d;
}

double Network::max_distance(const Vector& x_star) const {
  double d = 0.0;
  for (int i = 0; i < size(); ++i) d = std::max(d, local_distance(i, x_star));
  return d;
}

AsyncTrace run_async(const Problem& problem, const GMParams& params,
                     const Schedule& schedule, const std::vector<DecisionPair>& z0,
                     const AsyncOptions& options) {
  if (options.stride < 1) throw std::invalid_argument("stride must be >= 1");
  if (schedule.kind == ScheduleKind::scripted && schedule.require_liveness) {
    const auto issues = lint_liveness(*schedule.script, problem.graph, options.max_ticks);
    if (!issues.empty()) {
      throw std::invalid_argument("schedule script is not live: " + issues.front());
    }
  }
  Network net(problem, params, schedule, z0);

  double f_star = 0.0;
  if (options.x_star) f_star = problem.value(*options.x_star);

  AsyncTrace trace;
  auto record = [&](bool force) {
    const long k = net.time();
    if (!force && k % options.stride != 0) return;
    const DecisionPair truth = net.true_state();
    const double cost = problem.value(truth.x);
    if (!std::isfinite(cost)) {
      throw std::runtime_error("non-finite cost at tick " + std::to_string(k));
    }
    trace.ticks.push_back(k);
    trace.ops.push_back(net.ops());
    trace.cost.push_back(cost);
    if (options.x_star) trace.dist_inf.push_back(net.max_distance(*options.x_star));
    if (options.record_states) trace.true_state.push_back(truth);
  };
  auto reached = [&]() {
    if (!options.x_star || options.epsilon <= 0.0) return false;
    if (options.stop == StopRule::distance) {
      return net.max_distance(*options.x_star) <= options.epsilon;
    }
    return problem.value(net.true_state().x) - f_star <= options.epsilon;
  };

  trace.ops_by_tick.push_back(0);
  trace.converged = reached();
  record(true);
  while (!trace.converged && net.time() < options.max_ticks) {
    net.tick();
    trace.ops_by_tick.push_back(net.ops());
    trace.converged = reached();
    record(trace.converged || net.time() == options.max_ticks);
  }
  trace.stop_tick = net.time();
  for (int i = 0; i < net.size(); ++i) {
    trace.computations.push_back(net.processor(i).computations);
  }
  return trace;
}

long ops_of(const AsyncTrace& trace, long k) {
  if (k < 0 || k >= static_cast<long>(trace.ops_by_tick.size())) {
    throw std::out_of_range("tick " + std::to_string(k) + " is outside the trace");
  }
  return trace.ops_by_tick[static_cast<std::size_t>(k)];
}

InvarianceReport invariance_probe(const Problem& problem, const GMParams& params,
                                  const Schedule& schedule,
                                  const std::vector<DecisionPair>& z0, long horizon,
                                  const Vector& x_star) {
  constexpr double kSlack = 1e-12;
  const double alpha = contraction_report(params, problem.mu, problem.h_diag_max).alpha;
  Network net(problem, params, schedule, z0);
  const double radius0 = net.max_distance(x_star);

  InvarianceReport report;
  for (;;) {
    const double radius = std::pow(alpha, static_cast<double>(net.ops())) * radius0;
    for (int i = 0; i < net.size(); ++i) {
      const auto& local = net.processor(i).local;
      const double d = net.local_distance(i, x_star);
      const bool in_box = problem.box.contains(local.x) && problem.box.contains(local.y);
      if (!in_box || d > radius + kSlack) {
        report.clean = false;
        report.violation_tick = net.time();
        report.violation_processor = i;
        report.violation_distance = d;
        report.violation_radius = radius;
        return report;
      }
    }
    ++report.ticks_checked;
    if (net.time() >= horizon) break;
    net.tick();
  }
  return report;
}

InvarianceReport invariance_probe(const Problem& problem, const GMParams& params,
                                  const Schedule& schedule,
                                  const std::vector<DecisionPair>& z0, long horizon) {
  return invariance_probe(problem, params, schedule, z0, horizon,
                          solve_reference(problem, 1e-12));
}

}  // namespace tagm
