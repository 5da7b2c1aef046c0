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

#ifndef TAGM_SCHEDULE_HPP
#define TAGM_SCHEDULE_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "tagm/problem.hpp"

namespace tagm {

/// Explicit event lists for a scripted schedule. Ticks are 0-based.
///
/// Text form, one event per line (`#` starts a comment):
///   COMPUTE <i> <k>                    processor i computes at tick k
///   SEND <i> <j> <k>                   i sends its latest block to j at k
///   DELIVER <i> <j> <k_send> <k_deliver>
/// A DELIVER must match a SEND with the same (i, j, k_send) and
/// k_deliver >= k_send. A SEND without DELIVER stays in flight forever.
struct ScriptEvents {
  struct Compute {
    int processor;
    long tick;
  };
  struct Send {
    int sender;
    int receiver;
    long tick;
  };
  struct Deliver {
    int sender;
    int receiver;
    long send_tick;
    long deliver_tick;
  };

  std::vector<Compute> computes;
  std::vector<Send> sends;
  std::vector<Deliver> delivers;

  /// Causality and matching checks; throws std::invalid_argument.
  void validate() const;
  /// Throws unless every processor index is < n and every send follows an edge.
  void validate_against(const NeighborGraph& graph) const;
};

ScriptEvents read_script(std::istream& in);
ScriptEvents read_script_file(const std::string& path);
void write_script(std::ostream& out, const ScriptEvents& script);

/// Problems that would permanently silence a processor or an edge before
/// `horizon`: a processor that never computes, or a directed edge that never
/// delivers. Empty when the script is live.
std::vector<std::string> lint_liveness(const ScriptEvents& script,
                                       const NeighborGraph& graph, long horizon);

enum class ScheduleKind { bernoulli, scripted };

/// on_compute: send to all neighbours right after each computation.
/// bernoulli: each tick, with probability p_send, send the latest computed
/// block to all neighbours.
enum class SendMode { on_compute, bernoulli };

struct Schedule {
  ScheduleKind kind = ScheduleKind::bernoulli;
  double p_compute = 1.0;
  double p_send = 1.0;
  /// Per-message delivery delay is geometric: P(delay = d) = (1-q)^d q with
  /// q = p_deliver. q = 1 means same-tick delivery.
  double p_deliver = 1.0;
  SendMode send_mode = SendMode::on_compute;
  /// Per-edge FIFO. Otherwise messages may overtake each other and a payload
  /// older than the receiver's copy is discarded.
  bool fifo = true;
  std::uint64_t seed = 0;
  std::optional<ScriptEvents> script;
  bool require_liveness = true;

  /// Everyone computes every tick; zero delay.
  static Schedule synchronous();
  /// Compute probability p, send after every compute, geometric(p_deliver)
  /// delays.
  static Schedule bernoulli(double p, std::uint64_t seed,
                            double p_deliver = 1.0);
  /// Compute with probability p, independently send with probability p,
  /// zero delay.
  static Schedule replication(double p, std::uint64_t seed);
  static Schedule scripted(ScriptEvents events);

  void validate() const;
};

std::string_view to_string(SendMode mode);
SendMode parse_send_mode(std::string_view name);

/// Shapes of unbounded-delay scripts.
enum class AdversarialPattern {
  /// Everyone computes every tick; the s-th message on each edge waits
  /// ceil(growth^s) ticks.
  growing_delays,
  /// The gap before the s-th computation of each processor is ceil(growth^s)
  /// (staggered per processor); messages go out on compute, delay 1.
  growing_compute_gaps,
  /// Processor 0 computes with growing gaps and its outgoing messages have
  /// growing delays; the others compute every tick with unit delay.
  straggler,
};

ScriptEvents adversarial_script(const NeighborGraph& graph, long horizon,
                                AdversarialPattern pattern, double growth);

}  // namespace tagm

#endif  // TAGM_SCHEDULE_HPP
