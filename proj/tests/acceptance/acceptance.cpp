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


// Desk-scale acceptance run. Prints one PASS/FAIL line per criterion and
// exits non-zero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "dfgp/dfgp.hpp"
#include "dfgp/io/config.hpp"
#include "dfgp/io/execute.hpp"
#include "support/oracles.hpp"

namespace {

using dfgp::EquilibriumOptions;
using dfgp::ErrorCurve;
using dfgp::GameSpec;
using dfgp::LemmaReport;
using dfgp::RunConfig;
using dfgp::SmoothingMode;
using dfgp::Vector;

// Tolerances and sizes.
constexpr long kUnbiasedDraws = 1'000'000;
constexpr double kQuarticDelta = 0.05;
constexpr long kGapProbes = 100;
constexpr long kMonotonePairs = 1000;
constexpr double kSolverTolerance = 1e-10;
constexpr double kGridTolerance = 1e-7;
constexpr long kBoundHorizon = 100'000;
constexpr long kBoundReplicates = 200;
constexpr double kBoundDelta = 0.05;
constexpr double kSlopeLo = -1.3;
constexpr double kSlopeHi = -0.7;
constexpr double kCorollaryEpsilon = 0.01;
constexpr double kCorollaryFineEpsilon = 0.0025;
constexpr double kRatioLo = 3.5;
constexpr double kRatioHi = 4.5;
constexpr long kDeskHorizon = 10'000'000;
constexpr long kCorollaryReplicates = 100;
constexpr double kSeFactor = 3.0;
constexpr long kVarianceDraws = 100'000;

struct Outcome {
  bool passed = false;
  std::string detail;
};

std::string fmt(const char* format, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
  char buffer[512];
  std::snprintf(buffer, sizeof buffer, format, a, b, c, d);
  return buffer;
}

Vector point(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

// First built-in game in the chain whose prescribed horizon fits the desk budget.
GameSpec desk_game(const std::vector<std::string>& chain, double eps, dfgp::GuaranteeVariant variant) {
  for (const auto& name : chain) {
    GameSpec game = dfgp::builtin_game(name);
    if (dfgp::choose_parameters(game, eps, variant).horizon <= kDeskHorizon) return game;
  }
  return dfgp::builtin_game(chain.back());
}

Outcome unbiasedness() {
  const LemmaReport r = dfgp::verify_unbiased(dfgp::quartic_benchmark(), point(0.3, -0.4),
                                              kQuarticDelta, kUnbiasedDraws, 101,
                                              SmoothingMode::exact_1d());
  return {r.passed, fmt("worst gap/(4 SE) = %.3f over %.0f draws", r.worst_ratio,
                        static_cast<double>(r.samples))};
}

Outcome smoothing_gap() {
  const LemmaReport r = dfgp::verify_smoothing_gap(dfgp::quartic_benchmark(), kQuarticDelta,
                                                   kGapProbes, 102, SmoothingMode::exact_1d());
  return {r.passed, fmt("worst gap/bound = %.3f, max gap %.3g vs beta delta n %.3g",
                        r.worst_ratio, r.metrics.at("max_gap"), r.metrics.at("joint_bound"))};
}

Outcome monotonicity() {
  const GameSpec game = dfgp::quartic_benchmark();
  const auto& k = game.constants();
  const double delta = 0.9 * k.alpha / (2.0 * k.lipschitz_jacobian * std::pow(2.0, 1.5));
  const LemmaReport r = dfgp::verify_smoothed_monotonicity(game, delta, 0.5, kMonotonePairs, 103,
                                                           SmoothingMode::exact_1d());
  return {r.passed, fmt("delta = %.4f, min measured modulus %.4f vs alpha/2 = %.4f", delta,
                        r.metrics.at("min_measured_modulus"), 0.5 * k.alpha)};
}

Outcome equilibrium_distance() {
  bool ok = true;
  double worst = 0.0;
  double grid_gap = 0.0;
  EquilibriumOptions options;
  options.tolerance = kSolverTolerance;
  options.mode = SmoothingMode::exact_1d();
  const auto params = dfgp::lq_benchmark_params();
  for (const auto& [game, q] : {std::pair{dfgp::lq_benchmark(), 0.0},
                                std::pair{dfgp::quartic_benchmark(), 0.05}}) {
    for (double delta : {1e-4, 0.01, 0.05}) {
      dfgp::EquilibriumPair pair;
      const LemmaReport r = dfgp::verify_equilibrium_distance(game, delta, options, &pair);
      ok = ok && r.passed && pair.star.residual <= kSolverTolerance &&
           pair.smoothed.residual <= kSolverTolerance;
      worst = std::max(worst, r.worst_ratio);
      const auto g = [&, q = q, delta](const Vector& x) {
        return dfgp_test::quartic_smoothed_gradient(params.matrix, params.linear, {1, 1}, {q, q},
                                                    x, delta);
      };
      const Vector grid = dfgp_test::grid_equilibrium_2d(g, 1.0 - delta, game.constants().beta);
      grid_gap = std::max(grid_gap, (grid - pair.smoothed.point).norm());
      if (delta == 0.05) {
        const auto g0 = [&, q = q](const Vector& x) {
          return dfgp_test::quartic_smoothed_gradient(params.matrix, params.linear, {1, 1},
                                                      {q, q}, x, 0.0);
        };
        const Vector grid0 = dfgp_test::grid_equilibrium_2d(g0, 1.0, game.constants().beta);
        grid_gap = std::max(grid_gap, (grid0 - pair.star.point).norm());
      }
    }
  }
  ok = ok && grid_gap <= kGridTolerance;
  return {ok, fmt("worst distance/bound = %.3f, max grid deviation %.2g", worst, grid_gap)};
}

struct BoundRun {
  ErrorCurve curve;
  LemmaReport report;
  double plateau = 0.0;  // ||x* - x*_delta||^2, the error floor as t grows
};

BoundRun theorem_bound_run() {
  const GameSpec game = dfgp::lq_benchmark();
  const auto star = dfgp::solve_equilibrium(game, 1.0, 0.0);
  const auto smoothed = dfgp::solve_equilibrium(game, 1.0 - kBoundDelta, kBoundDelta);
  RunConfig config;
  config.delta = kBoundDelta;
  config.horizon = kBoundHorizon;
  config.store_points = false;
  BoundRun out;
  out.curve = dfgp::run_replicated(game, config, star, kBoundReplicates, 500);
  out.report = dfgp::verify_theorem_bound(game, out.curve, kBoundDelta, Vector::Zero(2),
                                          star.point, smoothed.point);
  out.plateau = (star.point - smoothed.point).squaredNorm();
  return out;
}

Outcome rate(const BoundRun& run) {
  const dfgp::RateFit fit = dfgp::verify_rate(run.curve, run.plateau);
  const bool ok = fit.slope >= kSlopeLo && fit.slope <= kSlopeHi;
  return {ok, fmt("slope %.3f on t in [%.0f, %.0f], ", fit.slope, static_cast<double>(fit.t_lo),
                  static_cast<double>(fit.t_hi)) +
                  fit.stop_reason};
}

struct CorollaryRun {
  Outcome outcome;
  ErrorCurve curve;
  GameSpec game = dfgp::lq_centered();
  dfgp::ParameterChoice choice;
  Vector x0;
};

CorollaryRun corollary_one() {
  CorollaryRun out;
  out.game = desk_game({"lq-benchmark", "lq-centered", "scalar-centered"}, kCorollaryEpsilon,
                       dfgp::GuaranteeVariant::kIterateOnly);
  out.choice = dfgp::choose_parameters(out.game, kCorollaryEpsilon);
  const auto star = dfgp::solve_equilibrium(out.game, 1.0, 0.0);
  out.x0 = Vector::Constant(out.game.total_dim(), 0.5);
  for (int i = 1; i < out.x0.size(); i += 2) out.x0[i] = -0.5;
  RunConfig config;
  config.delta = out.choice.delta;
  config.horizon = out.choice.horizon;
  config.x0 = out.x0;
  config.store_points = false;
  out.curve = dfgp::run_replicated(out.game, config, star, kCorollaryReplicates, 700);
  const LemmaReport acc = dfgp::verify_terminal_accuracy(out.curve, kCorollaryEpsilon, false);

  const long fine = dfgp::choose_parameters(out.game, kCorollaryFineEpsilon).horizon;
  const double ratio = static_cast<double>(fine) / static_cast<double>(out.choice.horizon);
  const double half_ratio =
      static_cast<double>(dfgp::choose_parameters(out.game, kCorollaryEpsilon / 2.0).horizon) /
      static_cast<double>(out.choice.horizon);
  const bool ratio_ok = ratio >= kRatioLo && ratio <= kRatioHi;
  std::ostringstream detail;
  detail << out.game.name() << ", T = " << out.choice.horizon << ", terminal "
         << acc.metrics.at("terminal_mean") << " (SE " << acc.metrics.at("terminal_se")
         << ") vs eps " << kCorollaryEpsilon << " [" << (acc.passed ? "ok" : "miss")
         << "]; T(" << kCorollaryFineEpsilon << ")/T(" << kCorollaryEpsilon << ") = " << ratio
         << " [" << (ratio_ok ? "ok" : "outside [3.5, 4.5]") << "]; T(eps/2)/T(eps) = "
         << half_ratio;
  out.outcome = {acc.passed && ratio_ok, detail.str()};
  return out;
}

Outcome corollary_two() {
  const auto variant = dfgp::GuaranteeVariant::kBothGuarantees;
  const GameSpec game =
      desk_game({"lq-benchmark", "lq-centered", "scalar-centered"}, kCorollaryEpsilon, variant);
  const auto choice = dfgp::choose_parameters(game, kCorollaryEpsilon, variant);
  const auto star = dfgp::solve_equilibrium(game, 1.0, 0.0);
  RunConfig config;
  config.delta = choice.delta;
  config.horizon = choice.horizon;
  config.x0 = Vector::Constant(game.total_dim(), 0.5);
  config.store_points = false;
  const ErrorCurve curve = dfgp::run_replicated(game, config, star, kCorollaryReplicates, 800);
  const LemmaReport played = dfgp::verify_terminal_accuracy(curve, kCorollaryEpsilon, true);
  std::ostringstream detail;
  detail << game.name() << ", delta = " << choice.delta << ", T = " << choice.horizon
         << ", played terminal " << played.metrics.at("terminal_mean") << " (SE "
         << played.metrics.at("terminal_se") << ") vs eps " << kCorollaryEpsilon;
  return {played.passed, detail.str()};
}

Outcome restart() {
  const GameSpec game = dfgp::lq_benchmark();
  const dfgp::RestartPlan plan = dfgp::build_plan(game, 0.5, 4);
  const auto star = dfgp::solve_equilibrium(game, 1.0, 0.0);
  const auto staged = dfgp::run_restarted(game, plan, star, 900, 200);
  const LemmaReport r = dfgp::verify_restart(staged, plan);
  std::ostringstream detail;
  detail << "stage errors";
  bool stages_ok = true;
  bool steps_ok = true;
  for (const auto& s : staged.stages) {
    detail << " " << s.mean_iterate << "/" << s.stage.epsilon;
    stages_ok = stages_ok && s.mean_iterate <= s.stage.epsilon + kSeFactor * s.se_iterate;
    steps_ok = steps_ok && static_cast<double>(s.stage.cumulative_steps) <= s.stage.step_bound;
  }
  detail << " [" << (stages_ok ? "ok" : "miss") << "]; steps within bound ["
         << (steps_ok ? "ok" : "miss") << "]; slope " << r.metrics.at("slope") << " vs "
         << r.metrics.at("target_slope") << " +-30%";
  return {r.passed, detail.str()};
}

Outcome two_point(const CorollaryRun& c7) {
  const GameSpec game = dfgp::lq_benchmark();
  const Vector x = point(0.2, -0.3);
  const double delta = 0.1;
  dfgp::Rng rng(1001);
  dfgp::RunningVectorStats single(2);
  dfgp::RunningVectorStats pair(2);
  for (long s = 0; s < kVarianceDraws; ++s) {
    const auto v = dfgp::sample_direction(game.layout(), rng);
    single.add(dfgp::single_point_estimate(game, x, delta, v));
    pair.add(dfgp::two_point_estimate(game, x, delta, v));
  }
  const double var_single = single.variance().sum();
  const double var_pair = pair.variance().sum();

  const auto star = dfgp::solve_equilibrium(c7.game, 1.0, 0.0);
  RunConfig config;
  config.delta = c7.choice.delta;
  config.horizon = c7.choice.horizon;
  config.x0 = c7.x0;
  config.store_points = false;
  config.estimator = dfgp::EstimatorKind::kTwoPoint;
  const ErrorCurve curve = dfgp::run_replicated(c7.game, config, star, kCorollaryReplicates, 700);
  const auto hit_single = c7.curve.first_step_below(kCorollaryEpsilon);
  const auto hit_pair = curve.first_step_below(kCorollaryEpsilon);
  const bool reach = hit_pair && (!hit_single || *hit_pair <= *hit_single);
  std::ostringstream detail;
  detail << "variance " << var_pair << " vs " << var_single << "; steps to eps: two-point "
         << (hit_pair ? std::to_string(*hit_pair) : "never") << ", single-point "
         << (hit_single ? std::to_string(*hit_single) : "never");
  return {var_pair < var_single && reach, detail.str()};
}

Outcome plumbing() {
  namespace fs = std::filesystem;
  namespace io = dfgp::io;
  const std::string text = R"({"game": {"builtin": "lq-benchmark"},
      "run": {"delta": 0.1, "horizon": 2000, "replicates": 6, "seed": 9}})";
  const io::ExperimentConfig config = io::parse_config_text(text);
  const bool round_trip = io::parse_config_text(io::serialize(config)) == config;

  const fs::path root = fs::temp_directory_path() / "dfgp_acceptance";
  fs::remove_all(root);
  auto run_into = [&](const std::string& sub, int workers) {
    io::ExecuteOptions options;
    options.out_dir = root / sub;
    options.workers = workers;
    io::execute(config, options);
    std::ifstream in(root / sub / "curve.csv", std::ios::binary);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
  };
  const std::string a = run_into("a", 1);
  const std::string b = run_into("b", 2);
  const bool identical = !a.empty() && a == b;

  auto rejected_with = [](const std::string& bad, const std::string& needle) {
    try {
      io::parse_config_text(bad);
    } catch (const io::ConfigError& e) {
      return std::string(e.what()).find(needle) != std::string::npos;
    }
    return false;
  };
  const bool delta_rejected = rejected_with(
      R"({"game": {"builtin": "lq-benchmark"}, "run": {"delta": 1.0, "horizon": 10}})",
      "radius δ ∈ (0, r)");
  const bool eps_rejected = rejected_with(
      R"({"game": {"builtin": "lq-benchmark"}, "run": {"epsilon": 1e6}})",
      "admissible maximum is");
  fs::remove_all(root);
  std::ostringstream detail;
  detail << "byte-identical csv " << identical << ", round-trip " << round_trip
         << ", delta >= r rejected " << delta_rejected << ", eps over threshold rejected "
         << eps_rejected;
  return {identical && round_trip && delta_rejected && eps_rejected, detail.str()};
}

Outcome timed(const std::function<Outcome()>& fn, double& seconds) {
  const auto start = std::chrono::steady_clock::now();
  Outcome out;
  try {
    out = fn();
  } catch (const std::exception& e) {
    out = {false, std::string("error: ") + e.what()};
  }
  seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

}  // namespace

int main() {
  int failures = 0;
  auto report = [&](int id, const char* name, const std::function<Outcome()>& fn) {
    double seconds = 0.0;
    const Outcome o = timed(fn, seconds);
    std::printf("[%s] %2d %-24s %s (%.1fs)\n", o.passed ? "PASS" : "FAIL", id, name,
                o.detail.c_str(), seconds);
    std::fflush(stdout);
    if (!o.passed) ++failures;
  };
  report(1, "unbiasedness", unbiasedness);
  report(2, "smoothing-gap", smoothing_gap);
  report(3, "smoothed-monotonicity", monotonicity);
  report(4, "equilibrium-distance", equilibrium_distance);

  BoundRun bound;
  report(5, "theorem-bound", [&] {
    bound = theorem_bound_run();
    return Outcome{bound.report.passed,
                   fmt("worst mean/bound = %.4f, min margin %.3g", bound.report.worst_ratio,
                       bound.report.metrics.at("min_margin"))};
  });
  report(6, "rate", [&] { return rate(bound); });

  CorollaryRun c7;
  report(7, "target-accuracy", [&] {
    c7 = corollary_one();
    return c7.outcome;
  });
  report(8, "played-accuracy", corollary_two);
  report(9, "restart", restart);
  report(10, "two-point", [&] { return two_point(c7); });
  report(11, "plumbing", plumbing);
  std::printf("%d of 11 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
