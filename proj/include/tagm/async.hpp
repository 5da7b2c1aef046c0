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

#ifndef TAGM_ASYNC_HPP
#define TAGM_ASYNC_HPP

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <tuple>
#include <vector>

#include "tagm/params.hpp"
#include "tagm/problem.hpp"
#include "tagm/schedule.hpp"
#include "tagm/types.hpp"

namespace tagm {

/// One processor's view of the network.
struct ProcessorState {
  int id = 0;
  /// Full-length local copies (x^i, y^i).
  DecisionPair local;
  /// Per block: tick at which the held value was computed by its owner,
  /// -1 for initial values.
  std::vector<long> stamp;
  /// Own block as last computed (initial values before the first compute).
  Vector last_x;
  Vector last_y;
  long last_compute = -1;
  long computations = 0;
};

struct Message {
  int sender = 0;
  int receiver = 0;
  Vector x;
  Vector y;
  long compute_time = -1;
  long send_time = 0;
  long deliver_time = 0;
  std::uint64_t sequence = 0;
};

/// ops(k): a cycle closes at the end of the first tick by which every
/// processor has computed and every directed edge has delivered a payload
/// computed after the previous close.
class OpsCounter {
 public:
  OpsCounter() = default;
  explicit OpsCounter(const NeighborGraph& graph);

  void record_compute(int processor, long tick);
  void record_delivery(int sender, int receiver, long compute_time);
  /// Closes a cycle at `tick` when complete; returns whether it did.
  bool close_if_complete(long tick);

  long cycles() const { return cycles_; }
  long last_close() const { return last_close_; }

 private:
  std::vector<std::vector<int>> neighbors_;
  std::vector<bool> computed_;
  std::vector<std::vector<bool>> delivered_;  // [receiver][index in neighbours]
  long pending_ = 0;
  long cycles_ = 0;
  long last_close_ = -1;
};

/// Deterministic discrete-time simulation of the totally asynchronous
/// algorithm. Within tick k: computations (k in K^i) update the owner's block
/// from its local copy, messages are enqueued, then every message whose
/// deliver_time is k overwrites the receiver's copy. State after the tick is
/// the state at time k + 1.
class Network {
 public:
  using Poisoner = std::function<void(int processor, DecisionPair& local)>;

  /// `z0` holds either one pair shared by all processors or one per processor.
  Network(const Problem& problem, const GMParams& params, Schedule schedule,
          const std::vector<DecisionPair>& z0);
  Network(const Network&) = delete;
  Network& operator=(const Network&) = delete;

  void tick();

  long time() const { return time_; }
  long ops() const { return ops_.cycles(); }
  int size() const { return static_cast<int>(procs_.size()); }
  const ProcessorState& processor(int i) const { return procs_.at(i); }
  std::size_t in_flight() const { return in_flight_.size(); }

  /// Blocks processor i reads: itself and its neighbours, sorted.
  const std::vector<int>& relevant_blocks(int i) const { return relevant_.at(i); }

  /// (x_1^1, ..., x_n^n), (y_1^1, ..., y_n^n).
  DecisionPair true_state() const;
  /// ||z^i - z*||_inf over the blocks processor i reads.
  double local_distance(int i, const Vector& x_star) const;
  double max_distance(const Vector& x_star) const;

  /// Called for every processor at the start of each tick (tests use it to
  /// scramble entries a processor never reads).
  void set_poisoner(Poisoner poisoner) { poisoner_ = std::move(poisoner); }

 private:
  bool draw(std::mt19937_64& rng, double p);
  long draw_delay(std::mt19937_64& rng);
  void send(int sender, int receiver, long deliver_time);
  void deliver(const Message& m);

  const Problem& problem_;
  GMParams params_;
  Schedule schedule_;
  std::vector<ProcessorState> procs_;
  std::vector<std::vector<int>> relevant_;
  OpsCounter ops_;
  long time_ = 0;
  std::uint64_t next_sequence_ = 0;

  std::vector<std::mt19937_64> processor_rng_;
  std::map<std::pair<int, int>, std::mt19937_64> edge_rng_;
  std::map<std::pair<int, int>, long> edge_last_delivery_;
  std::map<std::pair<long, std::uint64_t>, Message> in_flight_;

  // Scripted schedules, indexed by tick.
  std::multimap<long, int> script_computes_;
  std::multimap<long, std::pair<int, int>> script_sends_;
  std::map<std::tuple<int, int, long>, long> script_deliveries_;

  Poisoner poisoner_;
};

enum class StopRule { distance, cost };

struct AsyncOptions {
  long max_ticks = 10'000;
  /// Needed for distance columns and for stopping.
  std::optional<Vector> x_star;
  StopRule stop = StopRule::distance;
  /// No early stop when epsilon <= 0.
  double epsilon = 0.0;
  long stride = 1;
  bool record_states = false;
};

struct AsyncTrace {
  std::vector<long> ticks;
  std::vector<long> ops;
  std::vector<double> cost;
  std::vector<double> dist_inf;  // empty without x_star
  std::vector<DecisionPair> true_state;  // only with record_states
  /// ops(k) for every k in [0, final tick].
  std::vector<long> ops_by_tick;
  std::vector<long> computations;
  bool converged = false;
  long stop_tick = 0;

  std::size_t size() const { return ticks.size(); }
};

/// Runs the network until the stop rule holds or max_ticks. Throws
/// std::runtime_error, with a dump of the offending tick, on non-finite values.
AsyncTrace run_async(const Problem& problem, const GMParams& params,
                     const Schedule& schedule, const std::vector<DecisionPair>& z0,
                     const AsyncOptions& options);

/// ops(k) from a trace; std::out_of_range past the final tick.
long ops_of(const AsyncTrace& trace, long k);

struct InvarianceReport {
  bool clean = true;
  long ticks_checked = 0;
  long violation_tick = -1;
  int violation_processor = -1;
  double violation_distance = 0.0;
  double violation_radius = 0.0;
};

/// Checks at every tick k that every processor's copy lies in the box and
/// within alpha^{ops(k)} max_i ||z^i(0) - z*||_inf of z*. Informational when
/// the parameters are not admissible.
InvarianceReport invariance_probe(const Problem& problem, const GMParams& params,
                                  const Schedule& schedule,
                                  const std::vector<DecisionPair>& z0, long horizon,
                                  const Vector& x_star);
InvarianceReport invariance_probe(const Problem& problem, const GMParams& params,
                                  const Schedule& schedule,
                                  const std::vector<DecisionPair>& z0, long horizon);

}  // namespace tagm

#endif  // TAGM_ASYNC_HPP
