// Copyright 2026 The dfgp Authors. All rights reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef DFGP_IO_CONFIG_HPP_
#define DFGP_IO_CONFIG_HPP_

#include <cstdint>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "dfgp/core.hpp"
#include "dfgp/engine.hpp"
#include "dfgp/feasible_set.hpp"
#include "dfgp/game.hpp"
#include "dfgp/games.hpp"

namespace dfgp::io {

using Json = nlohmann::ordered_json;

enum class Mode { kRun, kRestart, kVerify, kSweep, kCertify };

inline std::string to_string(Mode mode) {
  switch (mode) {
    case Mode::kRun: return "run";
    case Mode::kRestart: return "restart";
    case Mode::kVerify: return "verify";
    case Mode::kSweep: return "sweep";
    case Mode::kCertify: return "certify";
  }
  return "run";
}

// Config errors carry every problem found, not just the first.
class ConfigError : public Error {
 public:
  explicit ConfigError(std::vector<std::string> problems)
      : Error(ErrorKind::kConfiguration, join(problems)), problems_(std::move(problems)) {}
  const std::vector<std::string>& problems() const { return problems_; }

 private:
  static std::string join(const std::vector<std::string>& problems) {
    std::string out = "invalid configuration:";
    for (const auto& p : problems) out += "\n  - " + p;
    return out;
  }
  std::vector<std::string> problems_;
};

struct SetConfig {
  std::string kind = "ball";  // ball | box | ball-box
  double radius = 1.0;
  std::vector<double> lower;
  std::vector<double> upper;

  bool operator==(const SetConfig&) const = default;
};

struct GameConfig {
  std::string builtin;  // non-empty selects a built-in game
  std::string family = "linear-quadratic";  // or quartic
  std::vector<int> dims;
  std::vector<std::vector<double>> matrix;  // row-major rows
  std::vector<double> linear;
  std::vector<double> offsets;
  std::vector<double> quartic;
  std::vector<SetConfig> sets;  // empty means unit balls
  std::optional<double> inner_radius;
  std::optional<double> outer_radius;
  std::optional<GameConstants> constants;

  bool operator==(const GameConfig&) const = default;
};

struct ScheduleConfig {
  std::string kind = "theorem";  // theorem | constant | custom
  double eta = 0.0;
  std::vector<double> etas;

  bool operator==(const ScheduleConfig&) const = default;
};

struct RunSection {
  std::string estimator = "single-point";
  std::optional<double> epsilon;
  std::string variant = "iterate-only";
  std::optional<double> delta;
  std::optional<long> horizon;
  ScheduleConfig schedule;
  std::vector<double> x0;
  long replicates = 100;
  std::uint64_t seed = 0;
  long record_every = 0;

  bool operator==(const RunSection&) const = default;
};

struct RestartSection {
  double q = 0.5;
  int stages = 4;

  bool operator==(const RestartSection&) const = default;
};

struct SweepSection {
  std::vector<double> epsilons;

  bool operator==(const SweepSection&) const = default;
};

struct VerifySection {
  double delta = 0.05;
  long draws = 1'000'000;
  long probes = 100;
  long pairs = 1000;
  double c = 0.5;
  long horizon = 100'000;
  long replicates = 200;
  long mc_replicates = 100'000;

  bool operator==(const VerifySection&) const = default;
};

struct CertifySection {
  bool skip = false;
  long samples = 1000;
  std::uint64_t seed = 0;

  bool operator==(const CertifySection&) const = default;
};

struct ExperimentConfig {
  Mode mode = Mode::kRun;
  GameConfig game;
  RunSection run;
  RestartSection restart;
  SweepSection sweep;
  VerifySection verify;
  CertifySection certify;
  std::string output_dir = "out";

  bool operator==(const ExperimentConfig&) const = default;
};

// Game construction ---------------------------------------------------------

inline GameSpec build_game(const GameConfig& g) {
  if (!g.builtin.empty()) return builtin_game(g.builtin);
  PolynomialGameParams p;
  p.dims = g.dims;
  const int d = [&] {
    int total = 0;
    for (int di : g.dims) total += di;
    return total;
  }();
  p.matrix = Matrix::Zero(d, d);
  for (int a = 0; a < d && a < static_cast<int>(g.matrix.size()); ++a) {
    for (int b = 0; b < d && b < static_cast<int>(g.matrix[a].size()); ++b) {
      p.matrix(a, b) = g.matrix[a][b];
    }
  }
  p.linear = Vector::Zero(d);
  if (!g.linear.empty()) {
    p.linear = Eigen::Map<const Vector>(g.linear.data(), static_cast<Eigen::Index>(g.linear.size()));
  }
  p.offsets = g.offsets;
  if (!g.sets.empty()) {
    std::vector<PlayerSet> sets;
    for (std::size_t i = 0; i < g.sets.size(); ++i) {
      const SetConfig& s = g.sets[i];
      const int di = i < g.dims.size() ? g.dims[i] : 1;
      auto vec = [](const std::vector<double>& v) {
        return Vector(Eigen::Map<const Vector>(v.data(), v.size()));
      };
      if (s.kind == "ball") {
        sets.push_back(PlayerSet::ball(di, s.radius));
      } else if (s.kind == "box") {
        sets.push_back(PlayerSet::box(vec(s.lower), vec(s.upper)));
      } else {
        sets.push_back(PlayerSet::ball_box(s.radius, vec(s.lower), vec(s.upper)));
      }
    }
    p.set = FeasibleSet(std::move(sets), g.inner_radius, g.outer_radius);
  } else if (g.inner_radius || g.outer_radius) {
    std::vector<PlayerSet> sets;
    for (int di : g.dims) sets.push_back(PlayerSet::ball(di, 1.0));
    p.set = FeasibleSet(std::move(sets), g.inner_radius, g.outer_radius);
  }
  p.declared = g.constants;
  if (g.family == "quartic") {
    return make_quartic(p, g.quartic.empty() ? std::vector<double>(g.dims.size(), 0.0) : g.quartic,
                        "quartic");
  }
  return make_linear_quadratic(p, "linear-quadratic");
}

inline StepSchedule build_schedule(const ScheduleConfig& s, double alpha) {
  if (s.kind == "constant") return StepSchedule::constant(s.eta);
  if (s.kind == "custom") return StepSchedule::custom(s.etas);
  return StepSchedule::theorem(alpha);
}

inline EstimatorKind parse_estimator(const std::string& name) {
  if (name == "two-point") return EstimatorKind::kTwoPoint;
  return EstimatorKind::kSinglePoint;
}

inline GuaranteeVariant parse_variant(const std::string& name) {
  return name == "both-guarantees" ? GuaranteeVariant::kBothGuarantees
                                   : GuaranteeVariant::kIterateOnly;
}

// JSON ------------------------------------------------------------------------

namespace detail {

class Reader {
 public:
  explicit Reader(std::vector<std::string>& problems) : problems_(problems) {}

  void check_keys(const Json& obj, const std::string& where,
                  std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) {
      problems_.push_back(where + " must be an object");
      return;
    }
    std::set<std::string> ok(allowed.begin(), allowed.end());
    for (auto it = obj.begin(); it != obj.end(); ++it) {
      if (!ok.count(it.key())) {
        problems_.push_back("unknown key '" + (where.empty() ? "" : where + ".") + it.key() + "'");
      }
    }
  }

  template <class T>
  void get(const Json& obj, const char* key, const std::string& where, T& out) {
    if (!obj.is_object() || !obj.contains(key) || obj.at(key).is_null()) return;
    try {
      out = obj.at(key).get<T>();
    } catch (const std::exception&) {
      problems_.push_back("key '" + where + "." + key + "' has the wrong type");
    }
  }

  template <class T>
  void get(const Json& obj, const char* key, const std::string& where, std::optional<T>& out) {
    if (!obj.is_object() || !obj.contains(key) || obj.at(key).is_null()) return;
    try {
      out = obj.at(key).get<T>();
    } catch (const std::exception&) {
      problems_.push_back("key '" + where + "." + key + "' has the wrong type");
    }
  }

 private:
  std::vector<std::string>& problems_;
};

inline std::optional<Mode> parse_mode(const std::string& s) {
  if (s == "run") return Mode::kRun;
  if (s == "restart") return Mode::kRestart;
  if (s == "verify") return Mode::kVerify;
  if (s == "sweep") return Mode::kSweep;
  if (s == "certify") return Mode::kCertify;
  return std::nullopt;
}

}  // namespace detail

inline Json to_json(const ExperimentConfig& c) {
  Json j;
  j["mode"] = to_string(c.mode);
  Json g;
  if (!c.game.builtin.empty()) {
    g["builtin"] = c.game.builtin;
  } else {
    g["family"] = c.game.family;
    g["dims"] = c.game.dims;
    g["matrix"] = c.game.matrix;
    g["linear"] = c.game.linear;
    if (!c.game.offsets.empty()) g["offsets"] = c.game.offsets;
    if (!c.game.quartic.empty()) g["quartic"] = c.game.quartic;
    if (!c.game.sets.empty()) {
      Json sets = Json::array();
      for (const auto& s : c.game.sets) {
        Json sj;
        sj["kind"] = s.kind;
        if (s.kind != "box") sj["radius"] = s.radius;
        if (s.kind != "ball") {
          sj["lower"] = s.lower;
          sj["upper"] = s.upper;
        }
        sets.push_back(sj);
      }
      g["sets"] = sets;
    }
    if (c.game.inner_radius) g["inner_radius"] = *c.game.inner_radius;
    if (c.game.outer_radius) g["outer_radius"] = *c.game.outer_radius;
    if (c.game.constants) {
      g["constants"] = {{"alpha", c.game.constants->alpha},
                        {"beta", c.game.constants->beta},
                        {"L", c.game.constants->lipschitz_jacobian},
                        {"f_star", c.game.constants->f_star}};
    }
  }
  j["game"] = g;

  Json r;
  r["estimator"] = c.run.estimator;
  if (c.run.epsilon) r["epsilon"] = *c.run.epsilon;
  r["variant"] = c.run.variant;
  if (c.run.delta) r["delta"] = *c.run.delta;
  if (c.run.horizon) r["horizon"] = *c.run.horizon;
  Json s;
  s["kind"] = c.run.schedule.kind;
  if (c.run.schedule.kind == "constant") s["eta"] = c.run.schedule.eta;
  if (c.run.schedule.kind == "custom") s["etas"] = c.run.schedule.etas;
  r["schedule"] = s;
  if (!c.run.x0.empty()) r["x0"] = c.run.x0;
  r["replicates"] = c.run.replicates;
  r["seed"] = c.run.seed;
  r["record_every"] = c.run.record_every;
  j["run"] = r;

  j["restart"] = {{"q", c.restart.q}, {"stages", c.restart.stages}};
  j["sweep"] = {{"epsilons", c.sweep.epsilons}};
  j["verify"] = {{"delta", c.verify.delta},         {"draws", c.verify.draws},
                 {"probes", c.verify.probes},       {"pairs", c.verify.pairs},
                 {"c", c.verify.c},                 {"horizon", c.verify.horizon},
                 {"replicates", c.verify.replicates}, {"mc_replicates", c.verify.mc_replicates}};
  j["certify"] = {{"skip", c.certify.skip}, {"samples", c.certify.samples},
                  {"seed", c.certify.seed}};
  j["output"] = {{"dir", c.output_dir}};
  return j;
}

inline std::string serialize(const ExperimentConfig& c) { return to_json(c).dump(2) + "\n"; }

// Checks that need a constructed game: delta range, the accuracy threshold and
// the starting point.
inline void validate_against_game(const ExperimentConfig& c, const GameSpec& game,
                                  std::vector<std::string>& problems) {
  const double r = game.set().inner_radius();
  if (c.run.delta && !(*c.run.delta > 0.0 && *c.run.delta < r)) {
    std::ostringstream msg;
    msg << "run.delta = " << *c.run.delta << " violates radius δ ∈ (0, r) with r = " << r;
    problems.push_back(msg.str());
  }
  const GuaranteeVariant variant = parse_variant(c.run.variant);
  const double max_eps = admissible_epsilon(game, variant);
  auto check_eps = [&](double eps, const std::string& where) {
    if (!(eps > 0.0 && eps < max_eps)) {
      std::ostringstream msg;
      msg << where << " = " << eps << " is above the admissible accuracy threshold; "
          << "the admissible maximum is " << max_eps;
      problems.push_back(msg.str());
    }
  };
  if (c.run.epsilon) check_eps(*c.run.epsilon, "run.epsilon");
  if (c.mode == Mode::kSweep) {
    for (double e : c.sweep.epsilons) check_eps(e, "sweep.epsilons entry");
  }
  if (!c.run.x0.empty() && static_cast<int>(c.run.x0.size()) != game.total_dim()) {
    problems.push_back("run.x0 must have length d = " + std::to_string(game.total_dim()));
  }
  if (c.mode == Mode::kVerify && !(c.verify.delta > 0.0 && c.verify.delta < r)) {
    std::ostringstream msg;
    msg << "verify.delta = " << c.verify.delta << " violates radius δ ∈ (0, r) with r = " << r;
    problems.push_back(msg.str());
  }
}

// mode_override replaces the file's mode before any mode-dependent check.
inline ExperimentConfig from_json(const Json& j, std::optional<Mode> mode_override = std::nullopt) {
  std::vector<std::string> problems;
  detail::Reader rd(problems);
  ExperimentConfig c;
  rd.check_keys(j, "", {"mode", "game", "run", "restart", "sweep", "verify", "certify", "output"});
  if (!j.is_object()) throw ConfigError(problems);

  std::string mode = "run";
  rd.get(j, "mode", "", mode);
  if (auto m = detail::parse_mode(mode)) {
    c.mode = *m;
  } else {
    problems.push_back("mode must be one of run, restart, verify, sweep, certify");
  }
  if (mode_override) c.mode = *mode_override;

  if (!j.contains("game")) {
    problems.push_back("missing section 'game'");
  } else {
    const Json& g = j.at("game");
    rd.check_keys(g, "game", {"builtin", "family", "dims", "matrix", "linear", "offsets",
                              "quartic", "sets", "inner_radius", "outer_radius", "constants"});
    rd.get(g, "builtin", "game", c.game.builtin);
    rd.get(g, "family", "game", c.game.family);
    rd.get(g, "dims", "game", c.game.dims);
    rd.get(g, "matrix", "game", c.game.matrix);
    rd.get(g, "linear", "game", c.game.linear);
    rd.get(g, "offsets", "game", c.game.offsets);
    rd.get(g, "quartic", "game", c.game.quartic);
    rd.get(g, "inner_radius", "game", c.game.inner_radius);
    rd.get(g, "outer_radius", "game", c.game.outer_radius);
    if (g.is_object() && g.contains("sets")) {
      if (!g.at("sets").is_array()) {
        problems.push_back("game.sets must be an array");
      } else {
        for (const Json& sj : g.at("sets")) {
          SetConfig s;
          rd.check_keys(sj, "game.sets[]", {"kind", "radius", "lower", "upper"});
          rd.get(sj, "kind", "game.sets[]", s.kind);
          rd.get(sj, "radius", "game.sets[]", s.radius);
          rd.get(sj, "lower", "game.sets[]", s.lower);
          rd.get(sj, "upper", "game.sets[]", s.upper);
          if (s.kind != "ball" && s.kind != "box" && s.kind != "ball-box") {
            problems.push_back("game.sets[].kind must be ball, box or ball-box");
          }
          c.game.sets.push_back(s);
        }
      }
    }
    if (g.is_object() && g.contains("constants")) {
      const Json& k = g.at("constants");
      rd.check_keys(k, "game.constants", {"alpha", "beta", "L", "f_star"});
      GameConstants gc;
      rd.get(k, "alpha", "game.constants", gc.alpha);
      rd.get(k, "beta", "game.constants", gc.beta);
      rd.get(k, "L", "game.constants", gc.lipschitz_jacobian);
      rd.get(k, "f_star", "game.constants", gc.f_star);
      c.game.constants = gc;
    }
    if (c.game.builtin.empty()) {
      const int n = static_cast<int>(c.game.dims.size());
      int d = 0;
      for (int di : c.game.dims) {
        if (di < 1) problems.push_back("game.dims entries must be >= 1");
        d += di;
      }
      if (n == 0) problems.push_back("game.dims must list at least one player");
      if (static_cast<int>(c.game.matrix.size()) != d) {
        problems.push_back("game.matrix must have d = " + std::to_string(d) + " rows");
      }
      for (const auto& row : c.game.matrix) {
        if (static_cast<int>(row.size()) != d) {
          problems.push_back("game.matrix rows must have d = " + std::to_string(d) + " entries");
          break;
        }
      }
      if (!c.game.linear.empty() && static_cast<int>(c.game.linear.size()) != d) {
        problems.push_back("game.linear must have length d = " + std::to_string(d));
      }
      if (!c.game.offsets.empty() && static_cast<int>(c.game.offsets.size()) != n) {
        problems.push_back("game.offsets must have one entry per player");
      }
      if (!c.game.quartic.empty() && static_cast<int>(c.game.quartic.size()) != n) {
        problems.push_back("game.quartic must have one entry per player");
      }
      if (!c.game.sets.empty() && static_cast<int>(c.game.sets.size()) != n) {
        problems.push_back("game.sets must have one entry per player");
      }
      for (std::size_t i = 0; i < c.game.sets.size() && i < c.game.dims.size(); ++i) {
        const auto& s = c.game.sets[i];
        if (s.kind != "ball" && (static_cast<int>(s.lower.size()) != c.game.dims[i] ||
                                 static_cast<int>(s.upper.size()) != c.game.dims[i])) {
          problems.push_back("game.sets[" + std::to_string(i) + "] bounds must match dims");
        }
      }
      if (c.game.family != "linear-quadratic" && c.game.family != "quartic") {
        problems.push_back("game.family must be linear-quadratic or quartic");
      }
    }
  }

  if (j.contains("run")) {
    const Json& r = j.at("run");
    rd.check_keys(r, "run", {"estimator", "epsilon", "variant", "delta", "horizon", "schedule",
                             "x0", "replicates", "seed", "record_every"});
    rd.get(r, "estimator", "run", c.run.estimator);
    rd.get(r, "epsilon", "run", c.run.epsilon);
    rd.get(r, "variant", "run", c.run.variant);
    rd.get(r, "delta", "run", c.run.delta);
    rd.get(r, "horizon", "run", c.run.horizon);
    rd.get(r, "x0", "run", c.run.x0);
    rd.get(r, "replicates", "run", c.run.replicates);
    rd.get(r, "seed", "run", c.run.seed);
    rd.get(r, "record_every", "run", c.run.record_every);
    if (r.is_object() && r.contains("schedule")) {
      const Json& s = r.at("schedule");
      rd.check_keys(s, "run.schedule", {"kind", "eta", "etas"});
      rd.get(s, "kind", "run.schedule", c.run.schedule.kind);
      rd.get(s, "eta", "run.schedule", c.run.schedule.eta);
      rd.get(s, "etas", "run.schedule", c.run.schedule.etas);
    }
  }
  if (c.run.estimator != "single-point" && c.run.estimator != "two-point") {
    problems.push_back("run.estimator must be single-point or two-point");
  }
  if (c.run.variant != "iterate-only" && c.run.variant != "both-guarantees") {
    problems.push_back("run.variant must be iterate-only or both-guarantees");
  }
  const std::string& sk = c.run.schedule.kind;
  if (sk != "theorem" && sk != "constant" && sk != "custom") {
    problems.push_back("run.schedule.kind must be theorem, constant or custom");
  }
  if (sk == "constant" && !(c.run.schedule.eta > 0.0)) {
    problems.push_back("run.schedule.eta must be > 0");
  }
  if (c.run.replicates < 1) problems.push_back("run.replicates must be >= 1");
  if (c.run.record_every < 0) problems.push_back("run.record_every must be >= 0");
  if (c.run.horizon && *c.run.horizon < 0) problems.push_back("run.horizon must be >= 0");
  if (c.mode == Mode::kRun) {
    const bool has_eps = c.run.epsilon.has_value();
    const bool has_explicit = c.run.delta.has_value() && c.run.horizon.has_value();
    if (has_eps == has_explicit || (has_eps && (c.run.delta || c.run.horizon))) {
      problems.push_back("run mode needs exactly one of run.epsilon or (run.delta, run.horizon)");
    }
  }

  if (j.contains("restart")) {
    const Json& s = j.at("restart");
    rd.check_keys(s, "restart", {"q", "stages"});
    rd.get(s, "q", "restart", c.restart.q);
    rd.get(s, "stages", "restart", c.restart.stages);
  }
  if (!(c.restart.q > 0.0 && c.restart.q < 1.0)) problems.push_back("restart.q must lie in (0, 1)");
  if (c.restart.stages < 1) problems.push_back("restart.stages must be >= 1");

  if (j.contains("sweep")) {
    const Json& s = j.at("sweep");
    rd.check_keys(s, "sweep", {"epsilons"});
    rd.get(s, "epsilons", "sweep", c.sweep.epsilons);
  }
  if (c.mode == Mode::kSweep && c.sweep.epsilons.empty()) {
    problems.push_back("sweep mode needs a non-empty sweep.epsilons list");
  }

  if (j.contains("verify")) {
    const Json& s = j.at("verify");
    rd.check_keys(s, "verify", {"delta", "draws", "probes", "pairs", "c", "horizon",
                                "replicates", "mc_replicates"});
    rd.get(s, "delta", "verify", c.verify.delta);
    rd.get(s, "draws", "verify", c.verify.draws);
    rd.get(s, "probes", "verify", c.verify.probes);
    rd.get(s, "pairs", "verify", c.verify.pairs);
    rd.get(s, "c", "verify", c.verify.c);
    rd.get(s, "horizon", "verify", c.verify.horizon);
    rd.get(s, "replicates", "verify", c.verify.replicates);
    rd.get(s, "mc_replicates", "verify", c.verify.mc_replicates);
  }
  if (!(c.verify.c > 0.0 && c.verify.c < 1.0)) problems.push_back("verify.c must lie in (0, 1)");
  if (c.verify.draws < 2 || c.verify.probes < 1 || c.verify.pairs < 1 ||
      c.verify.replicates < 1 || c.verify.horizon < 1 || c.verify.mc_replicates < 2) {
    problems.push_back("verify counts must be positive (draws and mc_replicates >= 2)");
  }

  if (j.contains("certify")) {
    const Json& s = j.at("certify");
    rd.check_keys(s, "certify", {"skip", "samples", "seed"});
    rd.get(s, "skip", "certify", c.certify.skip);
    rd.get(s, "samples", "certify", c.certify.samples);
    rd.get(s, "seed", "certify", c.certify.seed);
  }
  if (c.certify.samples < 2) problems.push_back("certify.samples must be >= 2");

  if (j.contains("output")) {
    const Json& s = j.at("output");
    rd.check_keys(s, "output", {"dir"});
    rd.get(s, "dir", "output", c.output_dir);
  }

  // Game-dependent checks only make sense once the structure is sound.
  if (problems.empty()) {
    try {
      const GameSpec game = build_game(c.game);
      validate_against_game(c, game, problems);
    } catch (const Error& e) {
      problems.push_back(std::string("game: ") + e.what());
    }
  }
  if (!problems.empty()) throw ConfigError(std::move(problems));
  return c;
}

inline ExperimentConfig parse_config_text(const std::string& text,
                                          std::optional<Mode> mode_override = std::nullopt) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ConfigError({std::string("malformed JSON: ") + e.what()});
  }
  return from_json(j, mode_override);
}

inline ExperimentConfig parse_config(const std::string& path,
                                     std::optional<Mode> mode_override = std::nullopt) {
  std::ifstream in(path);
  if (!in) throw ConfigError({"cannot open config file '" + path + "'"});
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str(), mode_override);
}

}  // namespace dfgp::io

#endif  // DFGP_IO_CONFIG_HPP_
