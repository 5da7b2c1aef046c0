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

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "tagm/experiment.hpp"

namespace tagm {

namespace {

namespace pt = boost::property_tree;

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

std::string_view to_string(ScheduleKind kind) {
  return kind == ScheduleKind::bernoulli ? "bernoulli" : "scripted";
}

std::string_view to_string(StopRule rule) {
  return rule == StopRule::distance ? "distance" : "cost";
}

[[noreturn]] void bad_field(const std::string& field, const std::string& value,
                            const std::string& why) {
  throw ConfigError("field '" + field + "' = '" + value + "': " + why);
}

double to_double(const std::string& field, const std::string& value) {
  const std::string v = trim(value);
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size() || v.empty()) {
    bad_field(field, value, "expected a number");
  }
  return out;
}

template <typename Int>
Int to_int(const std::string& field, const std::string& value) {
  const std::string v = trim(value);
  Int out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size() || v.empty()) {
    bad_field(field, value, "expected an integer");
  }
  return out;
}

bool to_bool(const std::string& field, const std::string& value) {
  const std::string v = lower(trim(value));
  if (v == "true" || v == "yes" || v == "1" || v == "on") return true;
  if (v == "false" || v == "no" || v == "0" || v == "off") return false;
  bad_field(field, value, "expected true or false");
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

template <typename Parse>
auto parse_enum(const std::string& field, const std::string& value, Parse parse) {
  try {
    return parse(lower(trim(value)));
  } catch (const std::invalid_argument& e) {
    bad_field(field, value, e.what());
  }
}

ScheduleKind parse_schedule_kind(const std::string& name) {
  if (name == "bernoulli") return ScheduleKind::bernoulli;
  if (name == "scripted") return ScheduleKind::scripted;
  throw std::invalid_argument("unknown schedule kind");
}

StopRule parse_stop_rule(const std::string& name) {
  if (name == "distance") return StopRule::distance;
  if (name == "cost") return StopRule::cost;
  throw std::invalid_argument("unknown stop rule");
}

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys{
      "problem.kind",         "problem.builtin",        "problem.path",
      "problem.data_dir",     "problem.per_class",      "problem.data_seed",
      "problem.synthetic_dim", "problem.synthetic_spread", "problem.theta",
      "problem.processors",   "problem.box_lo",         "problem.box_hi",
      "problem.h_diag_max",   "algorithm.name",         "algorithm.gamma",
      "algorithm.lambda",     "algorithm.beta",         "schedule.kind",
      "schedule.p",           "schedule.p_deliver",     "schedule.send_mode",
      "schedule.fifo",        "schedule.seed",          "schedule.script",
      "stop.epsilon",         "stop.max_ticks",         "stop.rule",
      "stop.reference_tol",   "sweep.p_values",         "sweep.algorithms",
      "sweep.seeds",          "output.dir",             "output.stride"};
  return keys;
}

std::string fmt(double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace

std::string_view to_string(ProblemKind kind) {
  switch (kind) {
    case ProblemKind::builtin: return "builtin";
    case ProblemKind::quadratic: return "quadratic";
    case ProblemKind::logistic: return "logistic";
    case ProblemKind::synthetic: return "synthetic";
  }
  return "?";
}

ProblemKind parse_problem_kind(std::string_view name) {
  const std::string n = lower(std::string(name));
  if (n == "builtin") return ProblemKind::builtin;
  if (n == "quadratic") return ProblemKind::quadratic;
  if (n == "logistic") return ProblemKind::logistic;
  if (n == "synthetic") return ProblemKind::synthetic;
  throw std::invalid_argument("unknown problem kind '" + std::string(name) + "'");
}

void ExperimentConfig::validate() const {
  auto fail = [](const std::string& what) { throw ConfigError(what); };
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) fail("stop.epsilon must be > 0");
  if (max_ticks < 0) fail("stop.max_ticks must be >= 0");
  if (reference_tol && !(*reference_tol > 0.0)) fail("stop.reference_tol must be > 0");
  auto check_p = [&](double v, const char* field) {
    if (!(v > 0.0 && v <= 1.0)) fail(std::string(field) + " must lie in (0, 1]");
  };
  check_p(p, "schedule.p");
  check_p(p_deliver, "schedule.p_deliver");
  for (double v : p_values) check_p(v, "sweep.p_values");
  if (p_values.empty() || algorithms.empty() || seeds.empty()) fail("sweep lists must be nonempty");
  if (processors < 1) fail("problem.processors must be >= 1");
  if (!(box_lo <= box_hi)) fail("problem.box_lo must not exceed problem.box_hi");
  if (!(theta > 0.0)) fail("problem.theta must be > 0");
  if (per_class < 1) fail("problem.per_class must be >= 1");
  if (synthetic_dim < 1) fail("problem.synthetic_dim must be >= 1");
  if (h_diag_max && !(*h_diag_max > 0.0)) fail("problem.h_diag_max must be > 0");
  if (stride < 1) fail("output.stride must be >= 1");
  if (problem == ProblemKind::quadratic && quadratic_path.empty()) fail("problem.path is required");
  if (problem == ProblemKind::logistic && data_dir.empty()) fail("problem.data_dir is required");
  if (schedule == ScheduleKind::scripted && script_path.empty()) fail("schedule.script is required");
  for (Algorithm a : algorithms) resolve_params(*this, a);
}

ExperimentConfig read_config(std::istream& in) {
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError("line " + std::to_string(e.line()) + ": " + e.message());
  }

  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty()) {
      throw ConfigError("key '" + section + "' outside a section");
    }
    static const std::set<std::string> sections{"problem", "algorithm", "schedule",
                                                "stop",    "sweep",     "output"};
    if (!sections.count(section)) throw ConfigError("unknown section [" + section + "]");
    for (const auto& kv : body) {
      const std::string field = section + "." + kv.first;
      if (!known_keys().count(field)) throw ConfigError("unknown field '" + field + "'");
    }
  }

  ExperimentConfig c;
  auto get = [&](const std::string& field) -> std::optional<std::string> {
    if (auto v = tree.get_optional<std::string>(pt::ptree::path_type(field, '.'))) return trim(*v);
    return std::nullopt;
  };

  if (auto v = get("problem.kind")) c.problem = parse_enum("problem.kind", *v, parse_problem_kind);
  if (auto v = get("problem.builtin")) c.builtin = *v;
  if (auto v = get("problem.path")) c.quadratic_path = *v;
  if (auto v = get("problem.data_dir")) c.data_dir = *v;
  if (auto v = get("problem.per_class")) c.per_class = to_int<Index>("problem.per_class", *v);
  if (auto v = get("problem.data_seed"))
    c.data_seed = to_int<std::uint64_t>("problem.data_seed", *v);
  if (auto v = get("problem.synthetic_dim"))
    c.synthetic_dim = to_int<Index>("problem.synthetic_dim", *v);
  if (auto v = get("problem.synthetic_spread"))
    c.synthetic_spread = to_double("problem.synthetic_spread", *v);
  if (auto v = get("problem.theta")) c.theta = to_double("problem.theta", *v);
  if (auto v = get("problem.processors")) c.processors = to_int<int>("problem.processors", *v);
  if (auto v = get("problem.box_lo")) c.box_lo = to_double("problem.box_lo", *v);
  if (auto v = get("problem.box_hi")) c.box_hi = to_double("problem.box_hi", *v);
  if (auto v = get("problem.h_diag_max")) c.h_diag_max = to_double("problem.h_diag_max", *v);

  if (auto v = get("algorithm.name"))
    c.algorithm = parse_enum("algorithm.name", *v, [](const std::string& s) { return parse_algorithm(s); });
  if (auto v = get("algorithm.gamma")) c.gamma = to_double("algorithm.gamma", *v);
  if (auto v = get("algorithm.lambda")) c.lambda = to_double("algorithm.lambda", *v);
  if (auto v = get("algorithm.beta")) c.beta = to_double("algorithm.beta", *v);

  if (auto v = get("schedule.kind")) c.schedule = parse_enum("schedule.kind", *v, parse_schedule_kind);
  if (auto v = get("schedule.p")) c.p = to_double("schedule.p", *v);
  if (auto v = get("schedule.p_deliver")) c.p_deliver = to_double("schedule.p_deliver", *v);
  if (auto v = get("schedule.send_mode"))
    c.send_mode = parse_enum("schedule.send_mode", *v, [](const std::string& s) { return parse_send_mode(s); });
  if (auto v = get("schedule.fifo")) c.fifo = to_bool("schedule.fifo", *v);
  if (auto v = get("schedule.seed")) c.seed = to_int<std::uint64_t>("schedule.seed", *v);
  if (auto v = get("schedule.script")) c.script_path = *v;

  if (auto v = get("stop.epsilon")) c.epsilon = to_double("stop.epsilon", *v);
  if (auto v = get("stop.max_ticks")) c.max_ticks = to_int<long>("stop.max_ticks", *v);
  if (auto v = get("stop.rule")) c.stop_rule = parse_enum("stop.rule", *v, parse_stop_rule);
  if (auto v = get("stop.reference_tol")) c.reference_tol = to_double("stop.reference_tol", *v);

  if (auto v = get("sweep.p_values")) {
    c.p_values.clear();
    for (const auto& item : split_list(*v)) c.p_values.push_back(to_double("sweep.p_values", item));
  }
  if (auto v = get("sweep.algorithms")) {
    c.algorithms.clear();
    for (const auto& item : split_list(*v))
      c.algorithms.push_back(
          parse_enum("sweep.algorithms", item, [](const std::string& s) { return parse_algorithm(s); }));
  }
  if (auto v = get("sweep.seeds")) {
    c.seeds.clear();
    for (const auto& item : split_list(*v)) c.seeds.push_back(to_int<std::uint64_t>("sweep.seeds", item));
  }

  if (auto v = get("output.dir")) c.out_dir = *v;
  if (auto v = get("output.stride")) c.stride = to_int<long>("output.stride", *v);

  c.validate();
  return c;
}

ExperimentConfig read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  try {
    return read_config(in);
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

std::string write_config(const ExperimentConfig& c) {
  std::ostringstream out;
  auto list = [](const auto& items, auto&& show) {
    std::string s;
    for (std::size_t i = 0; i < items.size(); ++i) {
      if (i) s += ", ";
      s += show(items[i]);
    }
    return s;
  };
  out << "[problem]\n"
      << "kind = " << to_string(c.problem) << "\n";
  switch (c.problem) {
    case ProblemKind::builtin: out << "builtin = " << c.builtin << "\n"; break;
    case ProblemKind::quadratic: out << "path = " << c.quadratic_path << "\n"; break;
    case ProblemKind::logistic: out << "data_dir = " << c.data_dir << "\n"; break;
    case ProblemKind::synthetic:
      out << "synthetic_dim = " << c.synthetic_dim << "\n"
          << "synthetic_spread = " << fmt(c.synthetic_spread) << "\n";
      break;
  }
  if (c.problem == ProblemKind::logistic || c.problem == ProblemKind::synthetic) {
    out << "per_class = " << c.per_class << "\n"
        << "data_seed = " << c.data_seed << "\n"
        << "theta = " << fmt(c.theta) << "\n"
        << "processors = " << c.processors << "\n"
        << "box_lo = " << fmt(c.box_lo) << "\n"
        << "box_hi = " << fmt(c.box_hi) << "\n";
    if (c.h_diag_max) out << "h_diag_max = " << fmt(*c.h_diag_max) << "\n";
  } else if (c.problem == ProblemKind::quadratic) {
    out << "processors = " << c.processors << "\n"
        << "box_lo = " << fmt(c.box_lo) << "\n"
        << "box_hi = " << fmt(c.box_hi) << "\n";
  }
  const GMParams params = resolve_params(c, c.algorithm);
  out << "[algorithm]\n"
      << "name = " << to_string(c.algorithm) << "\n"
      << "gamma = " << fmt(params.gamma) << "\n"
      << "lambda = " << fmt(params.lambda) << "\n"
      << "beta = " << fmt(params.beta) << "\n"
      << "[schedule]\n"
      << "kind = " << to_string(c.schedule) << "\n";
  if (c.schedule == ScheduleKind::scripted) {
    out << "script = " << c.script_path << "\n";
  } else {
    out << "p = " << fmt(c.p) << "\n"
        << "p_deliver = " << fmt(c.p_deliver) << "\n"
        << "send_mode = " << to_string(c.send_mode) << "\n";
  }
  out << "fifo = " << (c.fifo ? "true" : "false") << "\n"
      << "seed = " << c.seed << "\n"
      << "[stop]\n"
      << "epsilon = " << fmt(c.epsilon) << "\n"
      << "max_ticks = " << c.max_ticks << "\n"
      << "rule = " << to_string(c.stop_rule) << "\n"
      << "reference_tol = " << fmt(c.reference_tol.value_or(c.epsilon / 100.0)) << "\n"
      << "[sweep]\n"
      << "p_values = " << list(c.p_values, fmt) << "\n"
      << "algorithms = "
      << list(c.algorithms, [](Algorithm a) { return std::string(to_string(a)); }) << "\n"
      << "seeds = " << list(c.seeds, [](std::uint64_t s) { return std::to_string(s); }) << "\n"
      << "[output]\n"
      << "dir = " << c.out_dir << "\n"
      << "stride = " << c.stride << "\n";
  return out.str();
}

GMParams default_params(Algorithm algo) {
  switch (algo) {
    case Algorithm::GD: return specialize(algo, 0.1);
    case Algorithm::HB: return specialize(algo, 0.1, 0.075);
    case Algorithm::NAG: return specialize(algo, 0.1, 0.35, 0.35);
    case Algorithm::GM: return specialize(algo, 0.1, 0.5, 0.05);
  }
  throw std::logic_error("unhandled algorithm");
}

GMParams resolve_params(const ExperimentConfig& config, Algorithm algo) {
  const GMParams d = default_params(algo);
  // Explicit values only apply to the configured algorithm.
  const bool own = algo == config.algorithm;
  const double gamma = own && config.gamma ? *config.gamma : d.gamma;
  const double beta = own && config.beta ? *config.beta : d.beta;
  const double lambda = own && config.lambda ? *config.lambda : d.lambda;
  try {
    GMParams p = specialize(algo, gamma, beta, lambda);
    p.validate();
    return p;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("[algorithm] ") + std::string(to_string(algo)) + ": " + e.what());
  }
}

}  // namespace tagm
