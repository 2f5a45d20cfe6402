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

#ifndef DFGP_IO_EXECUTE_HPP_
#define DFGP_IO_EXECUTE_HPP_

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "dfgp/certify.hpp"
#include "dfgp/core.hpp"
#include "dfgp/engine.hpp"
#include "dfgp/equilibrium.hpp"
#include "dfgp/io/config.hpp"
#include "dfgp/restart.hpp"
#include "dfgp/verification.hpp"

namespace dfgp::io {

namespace fs = std::filesystem;

inline constexpr int kExitPassed = 0;
inline constexpr int kExitChecksFailed = 1;
inline constexpr int kExitError = 2;

struct ExecuteOptions {
  fs::path out_dir;  // empty: the config's output.dir
  int workers = 0;   // <= 0: default_worker_count()
  std::optional<std::uint64_t> seed;
  std::optional<long> replicates;
  bool skip_certify = false;
};

struct ExecuteResult {
  int exit_code = kExitPassed;
  std::vector<LemmaReport> reports;
  std::string message;
  std::optional<bool> certified;  // set when certification ran
};

// Serialization -----------------------------------------------------------------

inline std::string format_number(double value) {
  std::ostringstream out;
  out << std::setprecision(17) << value;
  return out.str();
}

inline void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::kConfiguration, "cannot write '" + path.string() + "'");
  out << text;
}

inline Json vector_json(const Vector& v) {
  Json a = Json::array();
  for (int k = 0; k < v.size(); ++k) a.push_back(v[k]);
  return a;
}

// Finite-only JSON numbers: non-finite values become null.
inline Json number_json(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

// Columns t, mean_sq_err_iterate, se_iterate, mean_sq_err_played, se_played.
// Standard errors are written as 0 when undefined (one replicate).
inline std::string curve_csv(const ErrorCurve& curve) {
  std::ostringstream out;
  out << "t,mean_sq_err_iterate,se_iterate,mean_sq_err_played,se_played\n";
  for (std::size_t k = 0; k < curve.size(); ++k) {
    const double se_i = curve.se_defined ? curve.se_iterate[k] : 0.0;
    const double se_p = curve.se_defined ? curve.se_played[k] : 0.0;
    out << curve.steps[k] << ',' << format_number(curve.mean_iterate[k]) << ','
        << format_number(se_i) << ',' << format_number(curve.mean_played[k]) << ','
        << format_number(se_p) << '\n';
  }
  return out.str();
}

// Two columns, t and error, skipping t = 0 so the file is log-log ready.
inline std::string plot_dat(const std::vector<long>& steps, const std::vector<double>& values) {
  std::ostringstream out;
  out << "# t error\n";
  for (std::size_t k = 0; k < steps.size(); ++k) {
    if (steps[k] < 1) continue;
    out << steps[k] << ' ' << format_number(values[k]) << '\n';
  }
  return out.str();
}

inline std::string stages_csv(const StagedErrorCurve& curve) {
  std::ostringstream out;
  out << "stage,delta,horizon,epsilon,cumulative_steps,step_bound,mean_sq_err_iterate,"
         "se_iterate,mean_sq_err_played,se_played\n";
  for (std::size_t k = 0; k < curve.stages.size(); ++k) {
    const StageResult& s = curve.stages[k];
    out << (k + 1) << ',' << format_number(s.stage.delta) << ',' << s.stage.horizon << ','
        << format_number(s.stage.epsilon) << ',' << s.stage.cumulative_steps << ','
        << format_number(s.stage.step_bound) << ',' << format_number(s.mean_iterate) << ','
        << format_number(curve.se_defined ? s.se_iterate : 0.0) << ','
        << format_number(s.mean_played) << ','
        << format_number(curve.se_defined ? s.se_played : 0.0) << '\n';
  }
  return out.str();
}

inline Json report_json(const LemmaReport& r) {
  Json j;
  j["lemma_id"] = r.lemma_id;
  j["passed"] = r.passed;
  j["samples"] = r.samples;
  j["worst_ratio"] = number_json(r.worst_ratio);
  Json metrics = Json::object();
  for (const auto& [key, value] : r.metrics) metrics[key] = number_json(value);
  j["metrics"] = metrics;
  Json violations = Json::array();
  for (const auto& v : r.violations) {
    Json pts = Json::array();
    for (const auto& p : v.points) pts.push_back(vector_json(p));
    violations.push_back({{"points", pts},
                          {"measured", number_json(v.measured)},
                          {"bound", number_json(v.bound)},
                          {"standard_error", number_json(v.standard_error)}});
  }
  j["violations"] = violations;
  return j;
}

inline Json certification_json(const CertificationReport& r) {
  Json j;
  j["passed"] = r.passed();
  j["samples"] = r.samples;
  j["max_gradient_ratio"] = number_json(r.max_gradient_ratio);
  j["max_jacobian_ratio"] = number_json(r.max_jacobian_ratio);
  j["min_monotonicity_ratio"] = number_json(r.min_monotonicity_ratio);
  j["max_abs_cost"] = number_json(r.max_abs_cost);
  Json counts = Json::object();
  for (const auto& [key, value] : r.violation_counts) counts[key] = value;
  j["violation_counts"] = counts;
  Json violations = Json::array();
  for (const auto& v : r.violations) {
    violations.push_back({{"assumption", v.assumption},
                          {"player", v.player},
                          {"x", vector_json(v.x)},
                          {"x_prime", vector_json(v.x_prime)},
                          {"measured", number_json(v.measured)},
                          {"bound", number_json(v.bound)}});
  }
  j["violations"] = violations;
  return j;
}

inline Json error_json(const std::exception& e) {
  Json j;
  j["error"] = true;
  j["message"] = e.what();
  if (const auto* err = dynamic_cast<const Error*>(&e)) {
    j["kind"] = std::string(to_string(err->kind()));
  } else {
    j["kind"] = "internal";
  }
  if (const auto* c = dynamic_cast<const ConfigError*>(&e)) j["problems"] = c->problems();
  if (const auto* s = dynamic_cast<const SolverFailure*>(&e)) {
    j["last_residual"] = number_json(s->last_residual());
  }
  if (const auto* a = dynamic_cast<const AccuracyOutOfRange*>(&e)) {
    j["max_epsilon"] = number_json(a->max_epsilon());
  }
  return j;
}

inline Json game_json(const GameSpec& game) {
  const auto& k = game.constants();
  return {{"name", game.name()},
          {"players", game.players()},
          {"dims", game.layout().dims()},
          {"alpha", k.alpha},
          {"beta", k.beta},
          {"L", k.lipschitz_jacobian},
          {"f_star", k.f_star},
          {"inner_radius", game.set().inner_radius()},
          {"outer_radius", game.set().outer_radius()}};
}

// Execution -----------------------------------------------------------------------

namespace detail {

struct Context {
  ExperimentConfig config;
  GameSpec game;
  fs::path out;
  int workers;
  std::uint64_t seed;
  long replicates;
};

inline Json base_manifest(const Context& ctx) {
  Json m;
  m["version"] = std::string(kVersion);
  m["mode"] = to_string(ctx.config.mode);
  m["config"] = to_json(ctx.config);
  m["game"] = game_json(ctx.game);
  m["seeds"] = {{"seed_base", ctx.seed},
                {"replicates", ctx.replicates},
                {"rule", "replicate j uses seed_base + j"}};
  return m;
}

inline SmoothingMode smoothing_mode(const ExperimentConfig& c) {
  return SmoothingMode::automatic(c.verify.mc_replicates, c.run.seed + 0x5eed);
}

// x*_delta when the smoothed game is certifiably monotone, else nothing.
inline std::optional<EquilibriumCertificate> try_smoothed_equilibrium(const Context& ctx,
                                                                      double delta) {
  if (!(delta < smoothed_monotonicity_limit(ctx.game))) return std::nullopt;
  EquilibriumOptions options;
  options.mode = smoothing_mode(ctx.config);
  return solve_equilibrium(ctx.game, 1.0 - delta, delta, options);
}

inline RunConfig make_run_config(const Context& ctx, double delta, long horizon) {
  RunConfig rc;
  rc.delta = delta;
  rc.horizon = horizon;
  rc.schedule = build_schedule(ctx.config.run.schedule, ctx.game.constants().alpha);
  rc.estimator = parse_estimator(ctx.config.run.estimator);
  if (!ctx.config.run.x0.empty()) {
    rc.x0 = Vector(Eigen::Map<const Vector>(ctx.config.run.x0.data(), ctx.config.run.x0.size()));
  }
  rc.record_every = ctx.config.run.record_every;
  rc.store_points = false;
  return rc;
}

struct CellOutcome {
  ErrorCurve curve;
  std::vector<LemmaReport> checks;
  Json manifest;
};

// One replicated run at (delta, T), writing manifest, curve and plot files.
inline CellOutcome run_cell(const Context& ctx, const fs::path& dir, double delta, long horizon,
                            std::optional<double> epsilon, const EquilibriumCertificate& star) {
  const RunConfig rc = make_run_config(ctx, delta, horizon);
  CellOutcome out;
  out.curve = run_replicated(ctx.game, rc, star, ctx.replicates, ctx.seed, ctx.workers);

  if (epsilon) {
    out.checks.push_back(verify_terminal_accuracy(out.curve, *epsilon, false));
    if (parse_variant(ctx.config.run.variant) == GuaranteeVariant::kBothGuarantees) {
      out.checks.push_back(verify_terminal_accuracy(out.curve, *epsilon, true));
    }
  }
  if (ctx.config.run.schedule.kind == "theorem") {
    if (auto smoothed = try_smoothed_equilibrium(ctx, delta)) {
      const Vector x1 = rc.x0.value_or(Vector::Zero(ctx.game.total_dim()));
      out.checks.push_back(
          verify_theorem_bound(ctx.game, out.curve, delta, x1, star.point, smoothed->point));
    }
  }

  Json m = base_manifest(ctx);
  m["resolved"] = {{"delta", delta},
                   {"horizon", horizon},
                   {"epsilon", epsilon ? Json(*epsilon) : Json(nullptr)},
                   {"variant", ctx.config.run.variant},
                   {"estimator", ctx.config.run.estimator},
                   {"cost_evals_per_replicate",
                    cost_evaluations_per_step(rc.estimator, ctx.game.players()) * horizon}};
  m["equilibrium"] = {{"point", vector_json(star.point)}, {"residual", star.residual}};
  m["se_defined"] = out.curve.se_defined;
  Json checks = Json::array();
  bool passed = true;
  for (const auto& r : out.checks) {
    checks.push_back(report_json(r));
    passed = passed && r.passed;
  }
  m["checks"] = checks;
  m["passed"] = passed;
  out.manifest = m;

  write_text(dir / "manifest.json", m.dump(2) + "\n");
  write_text(dir / "curve.csv", curve_csv(out.curve));
  write_text(dir / "plot_iterate.dat", plot_dat(out.curve.steps, out.curve.mean_iterate));
  write_text(dir / "plot_played.dat", plot_dat(out.curve.steps, out.curve.mean_played));
  return out;
}

inline bool all_passed(const std::vector<LemmaReport>& reports) {
  for (const auto& r : reports) {
    if (!r.passed) return false;
  }
  return true;
}

inline ExecuteResult execute_run(const Context& ctx) {
  const auto& run = ctx.config.run;
  double delta = 0.0;
  long horizon = 0;
  if (run.epsilon) {
    const ParameterChoice choice =
        choose_parameters(ctx.game, *run.epsilon, parse_variant(run.variant));
    delta = choice.delta;
    horizon = choice.horizon;
  } else {
    delta = *run.delta;
    horizon = *run.horizon;
  }
  const EquilibriumCertificate star = solve_equilibrium(ctx.game, 1.0, 0.0);
  CellOutcome cell = run_cell(ctx, ctx.out, delta, horizon, run.epsilon, star);
  ExecuteResult result;
  result.reports = cell.checks;
  result.exit_code = all_passed(cell.checks) ? kExitPassed : kExitChecksFailed;
  return result;
}

inline ExecuteResult execute_sweep(const Context& ctx) {
  const EquilibriumCertificate star = solve_equilibrium(ctx.game, 1.0, 0.0);
  const GuaranteeVariant variant = parse_variant(ctx.config.run.variant);
  std::ostringstream table;
  table << "cell,epsilon,delta,horizon,terminal_mean_sq_err_iterate,terminal_se_iterate\n";
  Json summary;
  Json cells = Json::array();
  ExecuteResult result;
  std::vector<long> horizons;
  for (std::size_t k = 0; k < ctx.config.sweep.epsilons.size(); ++k) {
    const double eps = ctx.config.sweep.epsilons[k];
    const ParameterChoice choice = choose_parameters(ctx.game, eps, variant);
    const fs::path dir = ctx.out / ("cell_" + std::to_string(k));
    CellOutcome cell = run_cell(ctx, dir, choice.delta, choice.horizon, eps, star);
    const std::size_t last = cell.curve.size() - 1;
    const double se = cell.curve.se_defined ? cell.curve.se_iterate[last] : 0.0;
    table << k << ',' << format_number(eps) << ',' << format_number(choice.delta) << ','
          << choice.horizon << ',' << format_number(cell.curve.mean_iterate[last]) << ','
          << format_number(se) << '\n';
    cells.push_back({{"cell", k},
                     {"epsilon", eps},
                     {"delta", choice.delta},
                     {"horizon", choice.horizon},
                     {"passed", all_passed(cell.checks)}});
    horizons.push_back(choice.horizon);
    for (auto& r : cell.checks) result.reports.push_back(std::move(r));
  }
  Json ratios = Json::array();
  for (std::size_t k = 1; k < horizons.size(); ++k) {
    ratios.push_back(static_cast<double>(horizons[k]) / static_cast<double>(horizons[k - 1]));
  }
  summary["version"] = std::string(kVersion);
  summary["cells"] = cells;
  summary["horizon_ratios"] = ratios;
  write_text(ctx.out / "sweep.csv", table.str());
  write_text(ctx.out / "sweep_summary.json", summary.dump(2) + "\n");
  result.exit_code = all_passed(result.reports) ? kExitPassed : kExitChecksFailed;
  return result;
}

inline ExecuteResult execute_restart(const Context& ctx) {
  const RestartPlan plan = build_plan(ctx.game, ctx.config.restart.q, ctx.config.restart.stages);
  const EquilibriumCertificate star = solve_equilibrium(ctx.game, 1.0, 0.0);
  std::optional<Vector> x0;
  if (!ctx.config.run.x0.empty()) {
    x0 = Vector(Eigen::Map<const Vector>(ctx.config.run.x0.data(), ctx.config.run.x0.size()));
  }
  const StagedErrorCurve staged =
      run_restarted(ctx.game, plan, star, ctx.seed, ctx.replicates, ctx.workers, x0);
  LemmaReport report = verify_restart(staged, plan);

  Json m = base_manifest(ctx);
  m["resolved"] = {{"q", plan.q}, {"stages", plan.stages.size()}, {"A", plan.a},
                   {"B", plan.b}, {"delta1", plan.delta1}};
  m["equilibrium"] = {{"point", vector_json(star.point)}, {"residual", star.residual}};
  m["se_defined"] = staged.se_defined;
  m["checks"] = Json::array({report_json(report)});
  m["passed"] = report.passed;
  write_text(ctx.out / "manifest.json", m.dump(2) + "\n");
  write_text(ctx.out / "stages.csv", stages_csv(staged));
  std::vector<long> index;
  std::vector<double> errors;
  for (std::size_t k = 0; k < staged.stages.size(); ++k) {
    index.push_back(static_cast<long>(k + 1));
    errors.push_back(staged.stages[k].mean_iterate);
  }
  write_text(ctx.out / "plot_stages.dat", plot_dat(index, errors));

  ExecuteResult result;
  result.reports.push_back(std::move(report));
  result.exit_code = all_passed(result.reports) ? kExitPassed : kExitChecksFailed;
  return result;
}

inline ExecuteResult execute_verify(const Context& ctx) {
  const auto& v = ctx.config.verify;
  const GameSpec& game = ctx.game;
  const SmoothingMode mode = smoothing_mode(ctx.config);
  const auto& k = game.constants();
  const double r = game.set().inner_radius();
  ExecuteResult result;

  Vector probe = Vector::Constant(game.total_dim(), 1.0);
  probe *= 0.5 * (r - v.delta) / probe.norm();
  result.reports.push_back(verify_unbiased(game, probe, v.delta, v.draws, ctx.seed + 1, mode));
  result.reports.push_back(verify_smoothing_gap(game, v.delta, v.probes, ctx.seed + 2, mode));

  double mono_delta = std::min(v.delta, 0.9 * smoothed_monotonicity_limit(game, v.c));
  result.reports.push_back(
      verify_smoothed_monotonicity(game, mono_delta, v.c, v.pairs, ctx.seed + 3, mode));

  EquilibriumOptions eq;
  eq.mode = mode;
  EquilibriumPair pair;
  result.reports.push_back(verify_equilibrium_distance(game, v.delta, eq, &pair));

  RunConfig rc = make_run_config(ctx, v.delta, v.horizon);
  rc.schedule = StepSchedule::theorem(k.alpha);
  const ErrorCurve curve =
      run_replicated(game, rc, pair.star, v.replicates, ctx.seed, ctx.workers);
  const Vector x1 = rc.x0.value_or(Vector::Zero(game.total_dim()));
  LemmaReport bound =
      verify_theorem_bound(game, curve, v.delta, x1, pair.star.point, pair.smoothed.point);
  const double plateau = (pair.star.point - pair.smoothed.point).squaredNorm();
  const RateFit fit = verify_rate(curve, plateau);
  bound.metrics["rate_slope"] = fit.slope;
  bound.metrics["rate_t_lo"] = static_cast<double>(fit.t_lo);
  bound.metrics["rate_t_hi"] = static_cast<double>(fit.t_hi);
  if (!(fit.slope >= -1.3 && fit.slope <= -0.7)) {
    bound.add_violation({{}, fit.slope, -1.0, 0.0});
  }
  result.reports.push_back(std::move(bound));

  Json reports = Json::array();
  for (const auto& rep : result.reports) reports.push_back(report_json(rep));
  Json lemma;
  lemma["version"] = std::string(kVersion);
  lemma["game"] = game.name();
  lemma["reports"] = reports;
  lemma["passed"] = all_passed(result.reports);
  write_text(ctx.out / "lemma_report.json", lemma.dump(2) + "\n");

  Json m = base_manifest(ctx);
  m["resolved"] = {{"delta", v.delta}, {"horizon", v.horizon}, {"monotonicity_delta", mono_delta}};
  m["se_defined"] = curve.se_defined;
  m["passed"] = all_passed(result.reports);
  write_text(ctx.out / "manifest.json", m.dump(2) + "\n");
  write_text(ctx.out / "curve.csv", curve_csv(curve));
  write_text(ctx.out / "plot_iterate.dat", plot_dat(curve.steps, curve.mean_iterate));
  write_text(ctx.out / "plot_played.dat", plot_dat(curve.steps, curve.mean_played));
  result.exit_code = all_passed(result.reports) ? kExitPassed : kExitChecksFailed;
  return result;
}

}  // namespace detail

// Runs the configured mode and writes its artifacts under the output
// directory. Never throws: failures produce error.json and exit code 2.
inline ExecuteResult execute(ExperimentConfig config, const ExecuteOptions& options = {}) {
  const fs::path out = options.out_dir.empty() ? fs::path(config.output_dir) : options.out_dir;
  try {
    if (options.seed) config.run.seed = *options.seed;
    if (options.replicates) {
      config.run.replicates = *options.replicates;
      config.verify.replicates = *options.replicates;
    }
    if (options.skip_certify) config.certify.skip = true;
    fs::create_directories(out);

    detail::Context ctx{config, build_game(config.game), out,
                        options.workers > 0 ? options.workers : default_worker_count(),
                        config.run.seed, config.run.replicates};
    if (ctx.replicates < 1) throw Error(ErrorKind::kInvalidInput, "replicates must be >= 1");
    if (config.mode == Mode::kVerify) ctx.replicates = config.verify.replicates;

    std::optional<bool> certified;
    if (!config.certify.skip || config.mode == Mode::kCertify) {
      const CertificationReport cert =
          certify_assumptions(ctx.game, config.certify.samples, config.certify.seed);
      write_text(out / "certification.json", certification_json(cert).dump(2) + "\n");
      if (!cert.passed()) {
        ExecuteResult failed;
        failed.exit_code = kExitChecksFailed;
        failed.message = "declared constants failed certification";
        failed.certified = false;
        if (config.mode != Mode::kCertify) {
          Json e = {{"error", true},
                    {"kind", "certification-failed"},
                    {"message", failed.message},
                    {"violation_counts", certification_json(cert)["violation_counts"]}};
          write_text(out / "error.json", e.dump(2) + "\n");
        }
        return failed;
      }
      certified = true;
    }
    ExecuteResult result;
    switch (config.mode) {
      case Mode::kRun: result = detail::execute_run(ctx); break;
      case Mode::kSweep: result = detail::execute_sweep(ctx); break;
      case Mode::kRestart: result = detail::execute_restart(ctx); break;
      case Mode::kVerify: result = detail::execute_verify(ctx); break;
      case Mode::kCertify: break;
    }
    result.certified = certified;
    return result;
  } catch (const std::exception& e) {
    ExecuteResult failed;
    failed.exit_code = kExitError;
    failed.message = e.what();
    try {
      write_text(out / "error.json", error_json(e).dump(2) + "\n");
    } catch (...) {
    }
    return failed;
  }
}

}  // namespace dfgp::io

#endif  // DFGP_IO_EXECUTE_HPP_
