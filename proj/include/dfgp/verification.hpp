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

#ifndef DFGP_VERIFICATION_HPP_
#define DFGP_VERIFICATION_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "dfgp/core.hpp"
#include "dfgp/engine.hpp"
#include "dfgp/equilibrium.hpp"
#include "dfgp/estimators.hpp"
#include "dfgp/game.hpp"
#include "dfgp/restart.hpp"
#include "dfgp/sampling.hpp"
#include "dfgp/smoothing.hpp"

namespace dfgp {

struct ReportViolation {
  std::vector<Vector> points;
  double measured = 0.0;
  double bound = 0.0;
  double standard_error = 0.0;
};

struct LemmaReport {
  std::string lemma_id;
  long samples = 0;
  double worst_ratio = 0.0;  // max measured / bound
  std::vector<ReportViolation> violations;
  std::map<std::string, double> metrics;
  bool passed = true;

  void add_violation(ReportViolation v) {
    passed = false;
    violations.push_back(std::move(v));
  }
};

inline double safe_ratio(double measured, double bound) {
  if (bound > 0.0) return measured / bound;
  return measured > 0.0 ? INFINITY : 0.0;
}

namespace detail {

inline constexpr double kExactFloor = 1e-9;

// Uniform in the joint ball of radius r - delta, so x + delta w stays inside
// the radius-r ball of every player.
template <class Urbg>
Vector sample_probe_point(const GameSpec& game, double delta, Urbg& rng) {
  const double radius = game.set().inner_radius() - delta;
  if (!(radius > 0.0)) {
    throw Error(ErrorKind::kInvalidInput, "probe radius r - delta must be positive");
  }
  Vector x = sample_ball(game.total_dim(), rng);
  return radius * x;
}

}  // namespace detail

// E[ghat_i] = grad_i f_i^delta(x): per player, ||mean(ghat_i) - reference|| is
// compared against 4 standard errors (floor 1e-9).
inline LemmaReport verify_unbiased(const GameSpec& game, const Vector& x, double delta,
                                   long draws, std::uint64_t seed = 1,
                                   const SmoothingMode& mode = SmoothingMode{}) {
  if (draws < 2) throw Error(ErrorKind::kInvalidInput, "unbiasedness check needs >= 2 draws");
  const BlockLayout& layout = game.layout();
  const int n = layout.players();
  std::vector<RunningVectorStats> stats;
  for (int i = 0; i < n; ++i) stats.emplace_back(layout.dim(i));

  Rng rng(seed);
  Vector v(layout.total());
  Vector probe;
  Vector ghat;
  for (long s = 0; s < draws; ++s) {
    sample_direction_into(layout, rng, v);
    single_point_estimate_into(game, x, delta, v, probe, ghat);
    for (int i = 0; i < n; ++i) stats[i].add(layout.block(ghat, i));
  }

  LemmaReport report;
  report.lemma_id = "L1-unbiased";
  report.samples = draws;
  for (int i = 0; i < n; ++i) {
    const SmoothedGradient ref = smoothed_gradient(game, x, delta, i, mode);
    const double gap = (stats[i].mean() - ref.value).norm();
    const double se = std::hypot(stats[i].standard_error_norm(), ref.standard_error);
    const double bound = std::max(4.0 * se, detail::kExactFloor);
    report.worst_ratio = std::max(report.worst_ratio, safe_ratio(gap, bound));
    report.metrics["gap_player_" + std::to_string(i)] = gap;
    report.metrics["se_player_" + std::to_string(i)] = se;
    if (gap > bound) report.add_violation({{x}, gap, bound, se});
  }
  return report;
}

// ||g(x) - g^delta(x)|| <= beta delta n, and per player <= beta delta sqrt(n).
inline LemmaReport verify_smoothing_gap(const GameSpec& game, double delta, long probe_points,
                                        std::uint64_t seed = 2,
                                        const SmoothingMode& mode = SmoothingMode{}) {
  const auto& k = game.constants();
  const int n = game.players();
  const double joint_bound = k.beta * delta * n;
  const double player_bound = k.beta * delta * std::sqrt(static_cast<double>(n));

  LemmaReport report;
  report.lemma_id = "L2-smoothness";
  report.samples = probe_points;
  double worst_player = 0.0;
  double max_gap = 0.0;
  Rng rng(seed);
  for (long p = 0; p < probe_points; ++p) {
    const Vector x = detail::sample_probe_point(game, delta, rng);
    const Vector g = game.gradient_map(x);
    SmoothingMode local = mode;
    local.seed = mode.seed + static_cast<std::uint64_t>(p) * 1000;
    const SmoothedMap gd = smoothed_gradient_map(game, x, delta, local);
    const double se = gd.player_standard_errors.norm();
    const double tol = std::max(4.0 * se, detail::kExactFloor);
    const double gap = (g - gd.value).norm();
    max_gap = std::max(max_gap, gap);
    report.worst_ratio = std::max(report.worst_ratio, safe_ratio(gap, joint_bound));
    if (gap > joint_bound + tol) report.add_violation({{x}, gap, joint_bound, se});
    for (int i = 0; i < n; ++i) {
      const double gi = (game.layout().block(g, i) - game.layout().block(gd.value, i)).norm();
      worst_player = std::max(worst_player, safe_ratio(gi, player_bound));
      const double tol_i = std::max(4.0 * gd.player_standard_errors[i], detail::kExactFloor);
      if (gi > player_bound + tol_i) {
        report.add_violation({{x}, gi, player_bound, gd.player_standard_errors[i]});
      }
    }
  }
  report.metrics["joint_bound"] = joint_bound;
  report.metrics["player_bound"] = player_bound;
  report.metrics["max_gap"] = max_gap;
  report.metrics["worst_player_ratio"] = worst_player;
  return report;
}

// <g^delta(x) - g^delta(x'), x - x'> >= (1 - c) alpha ||x - x'||^2 on sampled
// pairs, given delta <= c alpha / (L n^{3/2}).
inline LemmaReport verify_smoothed_monotonicity(const GameSpec& game, double delta, double c,
                                                long pairs, std::uint64_t seed = 3,
                                                const SmoothingMode& mode = SmoothingMode{}) {
  if (!(c > 0.0 && c < 1.0)) {
    throw Error(ErrorKind::kInvalidInput, "monotonicity slack c must lie in (0, 1)");
  }
  const double limit = smoothed_monotonicity_limit(game, c);
  if (delta > limit) {
    std::ostringstream msg;
    msg << "delta = " << delta << " exceeds the admissible smoothing radius " << limit;
    throw Error(ErrorKind::kConfiguration, msg.str());
  }
  const double modulus = (1.0 - c) * game.constants().alpha;
  LemmaReport report;
  report.lemma_id = "L3-monotonicity";
  report.samples = pairs;
  double min_ratio = INFINITY;
  Rng rng(seed);
  for (long p = 0; p < pairs; ++p) {
    const Vector x = detail::sample_probe_point(game, delta, rng);
    const Vector y = detail::sample_probe_point(game, delta, rng);
    SmoothingMode local = mode;
    local.seed = mode.seed + static_cast<std::uint64_t>(p) * 1000;
    const SmoothedMap gx = smoothed_gradient_map(game, x, delta, local);
    local.seed += 500;
    const SmoothedMap gy = smoothed_gradient_map(game, y, delta, local);
    const Vector diff = x - y;
    const double sq = diff.squaredNorm();
    const double inner = (gx.value - gy.value).dot(diff);
    const double se = std::hypot(gx.player_standard_errors.norm(), gy.player_standard_errors.norm()) *
                      std::sqrt(sq);
    const double need = modulus * sq;
    if (sq > 0.0) min_ratio = std::min(min_ratio, inner / sq);
    report.worst_ratio = std::max(report.worst_ratio, safe_ratio(need, inner));
    if (inner < need - std::max(4.0 * se, detail::kExactFloor)) {
      report.add_violation({{x, y}, inner, need, se});
    }
  }
  report.metrics["modulus"] = modulus;
  report.metrics["min_measured_modulus"] = min_ratio;
  report.metrics["delta_limit"] = limit;
  return report;
}

// Equilibrium shift radius (1 + beta sqrt(n) / alpha) |x*| + beta n^p / alpha,
// p = 1 for the displayed constant and 3/2 for the variant inside its use.
inline double equilibrium_shift(const GameSpec& game, double star_norm, double power = 1.0) {
  const auto& k = game.constants();
  const double n = static_cast<double>(game.players());
  return (1.0 + k.beta * std::sqrt(n) / k.alpha) * star_norm +
         k.beta * std::pow(n, power) / k.alpha;
}

struct EquilibriumPair {
  EquilibriumCertificate star;
  EquilibriumCertificate smoothed;
};

inline EquilibriumPair solve_equilibrium_pair(const GameSpec& game, double delta,
                                              const EquilibriumOptions& options = {}) {
  return {solve_equilibrium(game, 1.0, 0.0, options),
          solve_equilibrium(game, 1.0 - delta, delta, options)};
}

// ||x* - x*_delta|| <= delta ((1 + beta sqrt(n) / alpha) ||x*|| + beta n / alpha).
inline LemmaReport verify_equilibrium_distance(const GameSpec& game, double delta,
                                               const EquilibriumOptions& options = {},
                                               EquilibriumPair* solved = nullptr) {
  const double r = game.set().inner_radius();
  const double limit = std::min(r, smoothed_monotonicity_limit(game));
  if (!(delta > 0.0 && delta < limit)) {
    std::ostringstream msg;
    msg << "delta = " << delta << " must lie in (0, " << limit << ")";
    throw Error(ErrorKind::kConfiguration, msg.str());
  }
  EquilibriumPair pair = solve_equilibrium_pair(game, delta, options);
  const double dist = (pair.star.point - pair.smoothed.point).norm();
  const double star_norm = pair.star.point.norm();
  const double bound = delta * equilibrium_shift(game, star_norm, 1.0);
  const double loose = delta * equilibrium_shift(game, star_norm, 1.5);
  // Residual tolerance of each solve moves the point by at most ~ tol beta / alpha.
  const auto& k = game.constants();
  const double slack = std::max(4.0 * options.tolerance * k.beta / k.alpha, detail::kExactFloor);

  LemmaReport report;
  report.lemma_id = "L4-equilibrium-distance";
  report.samples = 1;
  report.worst_ratio = safe_ratio(dist, bound);
  report.metrics["distance"] = dist;
  report.metrics["bound"] = bound;
  report.metrics["bound_n32"] = loose;
  report.metrics["delta"] = delta;
  report.metrics["residual_star"] = pair.star.residual;
  report.metrics["residual_smoothed"] = pair.smoothed.residual;
  if (dist > bound + slack) {
    report.add_violation({{pair.star.point, pair.smoothed.point}, dist, bound, 0.0});
  }
  if (solved) *solved = std::move(pair);
  return report;
}

struct RateFit {
  double slope = 0.0;
  long t_lo = 0;
  long t_hi = 0;
  std::size_t points = 0;
  std::string stop_reason;
};

// Least-squares slope of log error against log t over the window between the
// curve's peak and the first plateau signal: the curve falls to 2 x
// plateau_level, or its 5-point moving average changes by < 5% over a decade.
inline RateFit verify_rate(const std::vector<long>& steps, const std::vector<double>& errors,
                           double plateau_level) {
  std::vector<double> lt;
  std::vector<double> le;
  std::vector<long> ts;
  for (std::size_t k = 0; k < steps.size(); ++k) {
    if (steps[k] >= 1 && errors[k] > 0.0 && std::isfinite(errors[k])) {
      ts.push_back(steps[k]);
      lt.push_back(std::log(static_cast<double>(steps[k])));
      le.push_back(errors[k]);
    }
  }
  const std::size_t m = ts.size();
  if (m < 20 || lt.back() - lt.front() < 2.0 * std::log(10.0)) {
    throw Error(ErrorKind::kInsufficientHorizon,
                "rate fit needs >= 20 recorded points over >= 2 decades");
  }
  std::vector<double> avg(m);
  for (std::size_t k = 0; k < m; ++k) {
    const std::size_t lo = k >= 2 ? k - 2 : 0;
    const std::size_t hi = std::min(m - 1, k + 2);
    double sum = 0.0;
    for (std::size_t j = lo; j <= hi; ++j) sum += le[j];
    avg[k] = sum / static_cast<double>(hi - lo + 1);
  }
  const std::size_t start =
      static_cast<std::size_t>(std::max_element(le.begin(), le.end()) - le.begin());
  std::size_t end = m - 1;
  std::string reason = "end-of-curve";
  for (std::size_t k = start + 1; k < m; ++k) {
    if (plateau_level > 0.0 && le[k] <= 2.0 * plateau_level) {
      end = k;
      reason = "plateau-level";
      break;
    }
    std::size_t j = k;
    while (j < m && lt[j] < lt[k] + std::log(10.0)) ++j;
    if (j < m && std::abs(avg[j] - avg[k]) < 0.05 * avg[k]) {
      end = k;
      reason = "flat-decade";
      break;
    }
  }
  if (end < start + 4) {
    throw Error(ErrorKind::kInsufficientHorizon, "no pre-plateau window found");
  }
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  const double count = static_cast<double>(end - start + 1);
  for (std::size_t k = start; k <= end; ++k) {
    const double y = std::log(le[k]);
    sx += lt[k];
    sy += y;
    sxx += lt[k] * lt[k];
    sxy += lt[k] * y;
  }
  RateFit fit;
  fit.slope = (count * sxy - sx * sy) / (count * sxx - sx * sx);
  fit.t_lo = ts[start];
  fit.t_hi = ts[end];
  fit.points = end - start + 1;
  fit.stop_reason = reason;
  return fit;
}

inline RateFit verify_rate(const ErrorCurve& curve, double plateau_level) {
  return verify_rate(curve.steps, curve.mean_iterate, plateau_level);
}

// Bound on E||x^t - x*||^2 at iteration index t >= 1 (x^1 is the start point):
//   max{delta^2 alpha^2 ||x^1 - x*_delta||^2, 8 F* d^2 n} / (delta^2 alpha^2 t)
//     + 2 delta^2 shift^2
inline double theorem_bound(const GameSpec& game, double delta, double start_gap_sq,
                            double shift, long t) {
  const auto& k = game.constants();
  const double n = static_cast<double>(game.players());
  const double d = static_cast<double>(game.total_dim());
  const double da = delta * delta * k.alpha * k.alpha;
  const double lead = std::max(da * start_gap_sq, 8.0 * k.f_star * d * d * n);
  return lead / (da * static_cast<double>(t)) + 2.0 * delta * delta * shift * shift;
}

// Mean error <= displayed bound + 3 SE at every recorded step count s (index
// t = s + 1). The margin against the n^{3/2} variant is reported alongside.
inline LemmaReport verify_theorem_bound(const GameSpec& game, const ErrorCurve& curve,
                                        double delta, const Vector& x_start,
                                        const Vector& star, const Vector& smoothed_star) {
  const double gap_sq = (x_start - smoothed_star).squaredNorm();
  const double shift = equilibrium_shift(game, star.norm(), 1.0);
  const double shift_loose = equilibrium_shift(game, star.norm(), 1.5);
  LemmaReport report;
  report.lemma_id = "T2-bound";
  report.samples = curve.replicates;
  double min_margin = INFINITY;
  double min_margin_loose = INFINITY;
  for (std::size_t k = 0; k < curve.size(); ++k) {
    const long t = curve.steps[k] + 1;
    const double bound = theorem_bound(game, delta, gap_sq, shift, t);
    const double loose = theorem_bound(game, delta, gap_sq, shift_loose, t);
    const double se = curve.se_defined ? curve.se_iterate[k] : 0.0;
    const double measured = curve.mean_iterate[k];
    report.worst_ratio = std::max(report.worst_ratio, safe_ratio(measured, bound));
    min_margin = std::min(min_margin, bound + 3.0 * se - measured);
    min_margin_loose = std::min(min_margin_loose, loose + 3.0 * se - measured);
    if (measured > bound + 3.0 * se) {
      report.add_violation({{}, measured, bound, se});
    }
  }
  report.metrics["min_margin"] = min_margin;
  report.metrics["min_margin_n32"] = min_margin_loose;
  return report;
}

// Terminal replicate mean <= epsilon + 3 SE, for the iterate (C1-horizon) or
// the played action (C2-played).
inline LemmaReport verify_terminal_accuracy(const ErrorCurve& curve, double epsilon,
                                            bool played) {
  LemmaReport report;
  report.lemma_id = played ? "C2-played" : "C1-horizon";
  report.samples = curve.replicates;
  if (curve.size() == 0) throw Error(ErrorKind::kInvalidInput, "empty error curve");
  const std::size_t last = curve.size() - 1;
  const double mean = played ? curve.mean_played[last] : curve.mean_iterate[last];
  const double se_raw = played ? curve.se_played[last] : curve.se_iterate[last];
  const double se = curve.se_defined ? se_raw : 0.0;
  report.worst_ratio = safe_ratio(mean, epsilon);
  report.metrics["terminal_mean"] = mean;
  report.metrics["terminal_se"] = se;
  report.metrics["epsilon"] = epsilon;
  report.metrics["horizon"] = static_cast<double>(curve.steps[last]);
  if (mean > epsilon + 3.0 * se) report.add_violation({{}, mean, epsilon, se});
  return report;
}

// Per-stage accuracy, geometric decay of the stage errors (slope of log e_k
// against k within 30% of 2 log q, fitted past stage 1), and the cumulative
// step bound.
inline LemmaReport verify_restart(const StagedErrorCurve& curve, const RestartPlan& plan) {
  LemmaReport report;
  report.lemma_id = "C3-restart";
  report.samples = curve.replicates;
  for (const StageResult& s : curve.stages) {
    const double se = curve.se_defined ? s.se_iterate : 0.0;
    report.worst_ratio = std::max(report.worst_ratio, safe_ratio(s.mean_iterate, s.stage.epsilon));
    if (s.mean_iterate > s.stage.epsilon + 3.0 * se) {
      report.add_violation({{}, s.mean_iterate, s.stage.epsilon, se});
    }
    if (static_cast<double>(s.stage.cumulative_steps) > s.stage.step_bound) {
      report.add_violation({{}, static_cast<double>(s.stage.cumulative_steps),
                            s.stage.step_bound, 0.0});
    }
  }
  const double target = 2.0 * std::log(plan.q);
  report.metrics["target_slope"] = target;
  if (curve.stages.size() >= 3) {
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    double count = 0.0;
    for (std::size_t k = 1; k < curve.stages.size(); ++k) {
      const double x = static_cast<double>(k + 1);
      const double y = std::log(curve.stages[k].mean_iterate);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
      count += 1.0;
    }
    const double slope = (count * sxy - sx * sy) / (count * sxx - sx * sx);
    report.metrics["slope"] = slope;
    if (!(std::abs(slope - target) <= 0.3 * std::abs(target))) {
      report.add_violation({{}, slope, target, 0.0});
    }
  }
  return report;
}

}  // namespace dfgp

#endif  // DFGP_VERIFICATION_HPP_
