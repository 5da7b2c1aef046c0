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

#include "tagm/schedule.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <tuple>

namespace tagm {

namespace {

using SendKey = std::tuple<int, int, long>;

}  // namespace

void ScriptEvents::validate() const {
  std::set<std::pair<int, long>> seen_computes;
  for (const auto& c : computes) {
    if (c.processor < 0 || c.tick < 0) {
      throw std::invalid_argument("COMPUTE with negative processor or tick");
    }
    if (!seen_computes.emplace(c.processor, c.tick).second) {
      throw std::invalid_argument("duplicate COMPUTE " + std::to_string(c.processor) +
                                  " " + std::to_string(c.tick));
    }
  }
  std::set<SendKey> seen_sends;
  for (const auto& s : sends) {
    if (s.sender < 0 || s.receiver < 0 || s.tick < 0) {
      throw std::invalid_argument("SEND with negative field");
    }
    if (s.sender == s.receiver) throw std::invalid_argument("SEND to self");
    if (!seen_sends.emplace(s.sender, s.receiver, s.tick).second) {
      throw std::invalid_argument("duplicate SEND");
    }
  }
  std::set<SendKey> seen_delivers;
  for (const auto& d : delivers) {
    const SendKey key{d.sender, d.receiver, d.send_tick};
    if (!seen_sends.count(key)) {
      throw std::invalid_argument(
          "DELIVER " + std::to_string(d.sender) + " " + std::to_string(d.receiver) +
          " " + std::to_string(d.send_tick) + " has no matching SEND");
    }
    if (d.deliver_tick < d.send_tick) {
      throw std::invalid_argument("DELIVER before its SEND (causality)");
    }
    if (!seen_delivers.insert(key).second) {
      throw std::invalid_argument("message delivered twice");
    }
  }
}

void ScriptEvents::validate_against(const NeighborGraph& graph) const {
  const int n = graph.size();
  for (const auto& c : computes) {
    if (c.processor >= n) throw std::invalid_argument("COMPUTE for unknown processor");
  }
  for (const auto& s : sends) {
    if (s.sender >= n || s.receiver >= n) {
      throw std::invalid_argument("SEND for unknown processor");
    }
    if (!graph.adjacent(s.sender, s.receiver)) {
      throw std::invalid_argument("SEND " + std::to_string(s.sender) + " -> " +
                                  std::to_string(s.receiver) +
                                  " does not follow a graph edge");
    }
  }
}

ScriptEvents read_script(std::istream& in) {
  ScriptEvents script;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::string verb;
    if (!(fields >> verb)) continue;
    std::transform(verb.begin(), verb.end(), verb.begin(),
                   [](unsigned char c) { return std::toupper(c); });
    bool ok = false;
    if (verb == "COMPUTE") {
      ScriptEvents::Compute c{};
      ok = static_cast<bool>(fields >> c.processor >> c.tick);
      script.computes.push_back(c);
    } else if (verb == "SEND") {
      ScriptEvents::Send s{};
      ok = static_cast<bool>(fields >> s.sender >> s.receiver >> s.tick);
      script.sends.push_back(s);
    } else if (verb == "DELIVER") {
      ScriptEvents::Deliver d{};
      ok = static_cast<bool>(fields >> d.sender >> d.receiver >> d.send_tick >>
                             d.deliver_tick);
      script.delivers.push_back(d);
    }
    std::string extra;
    if (!ok || (fields >> extra)) {
      throw std::runtime_error("schedule script line " + std::to_string(line_no) +
                               ": malformed event '" + line + "'");
    }
  }
  script.validate();
  return script;
}

ScriptEvents read_script_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open schedule script " + path);
  return read_script(in);
}

void write_script(std::ostream& out, const ScriptEvents& script) {
  for (const auto& c : script.computes) out << "COMPUTE " << c.processor << ' ' << c.tick << '\n';
  for (const auto& s : script.sends)
    out << "SEND " << s.sender << ' ' << s.receiver << ' ' << s.tick << '\n';
  for (const auto& d : script.delivers)
    out << "DELIVER " << d.sender << ' ' << d.receiver << ' ' << d.send_tick << ' '
        << d.deliver_tick << '\n';
}

std::vector<std::string> lint_liveness(const ScriptEvents& script,
                                       const NeighborGraph& graph, long horizon) {
  std::vector<std::string> issues;
  std::vector<bool> computes(graph.size(), false);
  for (const auto& c : script.computes)
    if (c.processor < graph.size() && c.tick < horizon) computes[c.processor] = true;
  for (int i = 0; i < graph.size(); ++i)
    if (!computes[i]) issues.push_back("processor " + std::to_string(i) + " never computes");

  std::set<std::pair<int, int>> delivered;
  for (const auto& d : script.delivers)
    if (d.deliver_tick < horizon) delivered.emplace(d.sender, d.receiver);
  for (int i = 0; i < graph.size(); ++i) {
    for (int j : graph.neighbors(i)) {
      if (!delivered.count({i, j})) {
        issues.push_back("edge " + std::to_string(i) + " -> " + std::to_string(j) +
                         " never delivers");
      }
    }
  }
  return issues;
}

Schedule Schedule::synchronous() { return Schedule{}; }

Schedule Schedule::bernoulli(double p, std::uint64_t seed, double p_deliver) {
  Schedule s;
  s.p_compute = p;
  s.p_send = p;
  s.p_deliver = p_deliver;
  s.seed = seed;
  s.validate();
  return s;
}

Schedule Schedule::replication(double p, std::uint64_t seed) {
  Schedule s = bernoulli(p, seed, 1.0);
  s.send_mode = SendMode::bernoulli;
  return s;
}

Schedule Schedule::scripted(ScriptEvents events) {
  events.validate();
  Schedule s;
  s.kind = ScheduleKind::scripted;
  s.script = std::move(events);
  return s;
}

void Schedule::validate() const {
  auto probability = [](double p, const char* what) {
    if (!(p > 0.0 && p <= 1.0)) {
      throw std::invalid_argument(std::string(what) + " must lie in (0, 1]");
    }
  };
  if (kind == ScheduleKind::bernoulli) {
    probability(p_compute, "p_compute");
    probability(p_send, "p_send");
    probability(p_deliver, "p_deliver");
  } else {
    if (!script) throw std::invalid_argument("scripted schedule without events");
    script->validate();
  }
}

std::string_view to_string(SendMode mode) {
  return mode == SendMode::on_compute ? "on_compute" : "bernoulli";
}

SendMode parse_send_mode(std::string_view name) {
  if (name == "on_compute") return SendMode::on_compute;
  if (name == "bernoulli") return SendMode::bernoulli;
  throw std::invalid_argument("unknown send_mode '" + std::string(name) + "'");
}

ScriptEvents adversarial_script(const NeighborGraph& graph, long horizon,
                                AdversarialPattern pattern, double growth) {
  if (!(growth > 1.0)) throw std::invalid_argument("growth must exceed 1");
  const int n = graph.size();
  ScriptEvents script;

  // Capped past the horizon, where the exact value no longer matters.
  auto grown = [growth, horizon](long s) {
    const double g = std::ceil(std::pow(growth, static_cast<double>(s)));
    return g > static_cast<double>(horizon) ? horizon + 1 : static_cast<long>(g);
  };

  // Compute ticks per processor.
  std::vector<std::vector<long>> compute_ticks(n);
  for (int i = 0; i < n; ++i) {
    const bool slow = pattern == AdversarialPattern::growing_compute_gaps ||
                      (pattern == AdversarialPattern::straggler && i == 0);
    long k = slow && pattern == AdversarialPattern::growing_compute_gaps ? i % 3 : 0;
    for (long s = 0; k < horizon; ++s) {
      compute_ticks[i].push_back(k);
      k += slow ? grown(s) : 1;
    }
  }

  for (int i = 0; i < n; ++i) {
    for (long k : compute_ticks[i]) script.computes.push_back({i, k});
    for (int j : graph.neighbors(i)) {
      long last_delivery = 0;
      long s = 0;
      for (long k : compute_ticks[i]) {
        long delay = 1;
        if (pattern == AdversarialPattern::growing_delays ||
            (pattern == AdversarialPattern::straggler && i == 0)) {
          delay = grown(s);
        }
        ++s;
        // Keep the edge FIFO.
        const long deliver = std::max(k + delay, last_delivery);
        script.sends.push_back({i, j, k});
        if (deliver < horizon) {
          script.delivers.push_back({i, j, k, deliver});
          last_delivery = deliver;
        }
      }
    }
  }
  script.validate();
  return script;
}

}  // namespace tagm
