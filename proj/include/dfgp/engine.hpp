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

#ifndef DFGP_ENGINE_HPP_
#define DFGP_ENGINE_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "dfgp/core.hpp"
#include "dfgp/equilibrium.hpp"
#include "dfgp/estimators.hpp"
#include "dfgp/game.hpp"
#include "dfgp/parallel.hpp"
#include "dfgp/sampling.hpp"

namespace dfgp {

// Step sizes eta_t for t = 1, 2, ... (t = 1 is the first update).
class StepSchedule {
 public:
  enum class Kind { kTheorem, kConstant, kCustom };

  // eta_t = 2 / (alpha t).
  static StepSchedule theorem(double alpha) {
    StepSchedule s;
    s.kind_ = Kind::kTheorem;
    s.value_ = alpha;
    return s;
  }
  static StepSchedule constant(double eta) {
    StepSchedule s;
    s.kind_ = Kind::kConstant;
    s.value_ = eta;
    return s;
  }
  static StepSchedule custom(std::vector<double> etas) {
    StepSchedule s;
    s.kind_ = Kind::kCustom;
    s.list_ = std::move(etas);
    return s;
  }

  Kind kind() const { return kind_; }
  double value() const { return value_; }
  const std::vector<double>& list() const { return list_; }

  double eta(long t) const {
    double eta = 0.0;
    switch (kind_) {
      case Kind::kTheorem:
        eta = 2.0 / (value_ * static_cast<double>(t));
        break;
      case Kind::kConstant:
        eta = value_;
        break;
      case Kind::kCustom:
        if (t < 1 || t > static_cast<long>(list_.size())) {
          throw Error(ErrorKind::kInvalidSchedule,
                      "custom step schedule has no entry for t = " + std::to_string(t));
        }
        eta = list_[t - 1];
        break;
    }
    if (!(eta > 0.0) || !std::isfinite(eta)) {
      throw Error(ErrorKind::kInvalidSchedule,
                  "step schedule produced a non-positive step at t = " + std::to_string(t));
    }
    return eta;
  }

  bool operator==(const StepSchedule&) const = default;

 private:
  Kind kind_ = Kind::kTheorem;
  double value_ = 1.0;
  std::vector<double> list_;
};

struct RunConfig {
  double delta = 0.1;
  long horizon = 1000;
  std::optional<StepSchedule> schedule;  // theorem(alpha) when unset
  EstimatorKind estimator = EstimatorKind::kSinglePoint;
  std::optional<Vector> x0;              // origin when unset
  std::uint64_t seed = 0;
  long record_every = 0;                 // 0: every step up to 1e4, log-spaced beyond
  bool store_points = true;              // keep iterates and played actions
};

// Recorded history of one run. steps[k] is the number of completed updates;
// played[k] = iterates[k] + delta v where v is the direction drawn at that
// iterate. Errors are squared distances to the supplied equilibrium.
struct Trajectory {
  std::vector<long> steps;
  std::vector<Vector> iterates;
  std::vector<Vector> played;
  std::vector<double> iterate_errors;
  std::vector<double> played_errors;
  Vector final_iterate;
  long cost_evals = 0;
  std::uint64_t seed = 0;

  bool operator==(const Trajectory&) const = default;
};

// Checkpoint step counts 0 = t_0 < ... < t_m = horizon.
inline std::vector<long> checkpoint_steps(long horizon, long record_every) {
  std::vector<long> out;
  if (horizon <= 0) return {0};
  if (record_every > 0 || horizon <= 10'000) {
    const long every = record_every > 0 ? record_every : 1;
    for (long t = 0; t < horizon; t += every) out.push_back(t);
    out.push_back(horizon);
    return out;
  }
  constexpr int kPerDecade = 25;
  out.push_back(0);
  for (int k = 0;; ++k) {
    const long t = std::lround(std::pow(10.0, static_cast<double>(k) / kPerDecade));
    if (t >= horizon) break;
    if (t > out.back()) out.push_back(t);
  }
  out.push_back(horizon);
  return out;
}

inline void validate_run(const GameSpec& game, const RunConfig& config, bool allow_delta_at_r = false) {
  const double r = game.set().inner_radius();
  const bool delta_ok = config.delta > 0.0 &&
                        (allow_delta_at_r ? config.delta <= r : config.delta < r);
  if (!delta_ok) {
    std::ostringstream msg;
    msg << "query radius delta = " << config.delta << " violates radius δ ∈ (0, r) with r = " << r;
    throw Error(ErrorKind::kInvalidInput, msg.str());
  }
  if (config.horizon < 0) {
    throw Error(ErrorKind::kInvalidInput, "horizon must be >= 0");
  }
  if (config.record_every < 0) {
    throw Error(ErrorKind::kInvalidInput, "record_every must be >= 0");
  }
  if (config.x0) {
    if (config.x0->size() != game.total_dim()) {
      throw Error(ErrorKind::kInvalidInput, "x0 has the wrong dimension");
    }
    if (!game.set().contains(*config.x0, 1.0 - config.delta)) {
      throw Error(ErrorKind::kInfeasible, "initial strategies x0 must lie in (1 - delta) X");
    }
  }
}

struct StepResult {
  Vector x_next;
  DirectionSample direction;
  Vector estimate;
};

namespace detail {

// proj onto shrink*X; shrink = 0 (delta = r on a unit set) collapses to {0}.
inline void project_shrunk(const FeasibleSet& set, Vector& x, double shrink) {
  if (shrink > 0.0) {
    set.project_inplace(x, shrink);
  } else {
    x.setZero();
  }
}

inline void estimate_into(const GameSpec& game, EstimatorKind kind, const Vector& x, double delta,
                          const Vector& v, Vector& probe, Vector& out) {
  if (kind == EstimatorKind::kSinglePoint) {
    single_point_estimate_into(game, x, delta, v, probe, out);
  } else {
    two_point_estimate_into(game, x, delta, v, probe, out);
  }
}

}  // namespace detail

// One update x -> proj_{(1 - delta) X}(x - eta ghat) with a given direction.
inline StepResult step_with_direction(const GameSpec& game, const Vector& x, double delta,
                                      double eta, const DirectionSample& v,
                                      EstimatorKind kind = EstimatorKind::kSinglePoint) {
  if (!(eta >= 0.0) || !std::isfinite(eta)) {
    throw Error(ErrorKind::kInvalidInput, "step size must be >= 0");
  }
  if (!game.set().contains(x, 1.0 - delta)) {
    throw Error(ErrorKind::kInfeasible, "iterate must lie in (1 - delta) X");
  }
  StepResult out;
  out.direction = v;
  Vector probe;
  detail::estimate_into(game, kind, x, delta, v.v, probe, out.estimate);
  out.x_next = x - eta * out.estimate;
  detail::project_shrunk(game.set(), out.x_next, 1.0 - delta);
  return out;
}

template <class Urbg>
StepResult step(const GameSpec& game, const Vector& x, double delta, double eta, Urbg& rng,
                EstimatorKind kind = EstimatorKind::kSinglePoint) {
  const DirectionSample v = sample_direction(game.layout(), rng);
  return step_with_direction(game, x, delta, eta, v, kind);
}

namespace detail {

// The recurrence itself; consumes one direction per checkpoint-or-step index
// s = 0..T from `rng`, so chained calls continue the same stream.
template <class Urbg>
Trajectory run_with_rng(const GameSpec& game, const RunConfig& config, const Vector& x_start,
                        const Vector* reference, Urbg& rng) {
  const BlockLayout& layout = game.layout();
  const double delta = config.delta;
  const double shrink = 1.0 - delta;
  const StepSchedule schedule =
      config.schedule.value_or(StepSchedule::theorem(game.constants().alpha));
  const std::vector<long> checkpoints = checkpoint_steps(config.horizon, config.record_every);

  Trajectory traj;
  traj.seed = config.seed;
  traj.steps.reserve(checkpoints.size());
  if (reference) {
    traj.iterate_errors.reserve(checkpoints.size());
    traj.played_errors.reserve(checkpoints.size());
  }

  Vector x = x_start;
  Vector v(layout.total());
  Vector probe(layout.total());
  Vector ghat(layout.total());
  Vector played(layout.total());
  std::size_t next = 0;
  for (long s = 0; s <= config.horizon; ++s) {
    sample_direction_into(layout, rng, v);
    if (next < checkpoints.size() && s == checkpoints[next]) {
      ++next;
      played = x + delta * v;
      if (config.estimator == EstimatorKind::kSinglePoint && !game.set().contains(played)) {
        throw Error(ErrorKind::kInfeasible, "played action x + delta v left the feasible set");
      }
      traj.steps.push_back(s);
      if (config.store_points) {
        traj.iterates.push_back(x);
        traj.played.push_back(played);
      }
      if (reference) {
        traj.iterate_errors.push_back((x - *reference).squaredNorm());
        traj.played_errors.push_back((played - *reference).squaredNorm());
      }
    }
    if (s == config.horizon) break;
    const double eta = schedule.eta(s + 1);
    estimate_into(game, config.estimator, x, delta, v, probe, ghat);
    x -= eta * ghat;
    project_shrunk(game.set(), x, shrink);
  }
  traj.cost_evals = cost_evaluations_per_step(config.estimator, layout.players()) * config.horizon;
  traj.final_iterate = x;
  return traj;
}

}  // namespace detail

// Derivative-free gradient play for config.horizon updates. Deterministic in
// (config, seed).
inline Trajectory run(const GameSpec& game, const RunConfig& config,
                      const EquilibriumCertificate* certificate = nullptr) {
  validate_run(game, config);
  const Vector x0 = config.x0.value_or(Vector::Zero(game.total_dim()));
  Rng rng(config.seed);
  return detail::run_with_rng(game, config, x0, certificate ? &certificate->point : nullptr, rng);
}

// Pointwise replicate mean and standard error of the squared errors.
struct ErrorCurve {
  std::vector<long> steps;
  std::vector<double> mean_iterate;
  std::vector<double> se_iterate;
  std::vector<double> mean_played;
  std::vector<double> se_played;
  long replicates = 0;
  // False when replicates < 2; the se_* columns are then NaN.
  bool se_defined = false;

  std::size_t size() const { return steps.size(); }

  // First recorded step whose mean iterate error is <= level, if any.
  std::optional<long> first_step_below(double level) const {
    for (std::size_t k = 0; k < steps.size(); ++k) {
      if (mean_iterate[k] <= level) return steps[k];
    }
    return std::nullopt;
  }

  bool operator==(const ErrorCurve&) const = default;
};

inline ErrorCurve reduce_errors(const std::vector<std::vector<double>>& iterate_errors,
                                const std::vector<std::vector<double>>& played_errors,
                                const std::vector<long>& steps) {
  ErrorCurve curve;
  curve.steps = steps;
  curve.replicates = static_cast<long>(iterate_errors.size());
  curve.se_defined = curve.replicates >= 2;
  const std::size_t m = steps.size();
  curve.mean_iterate.resize(m);
  curve.se_iterate.resize(m);
  curve.mean_played.resize(m);
  curve.se_played.resize(m);
  for (std::size_t k = 0; k < m; ++k) {
    RunningStats it;
    RunningStats pl;
    for (std::size_t j = 0; j < iterate_errors.size(); ++j) {
      it.add(iterate_errors[j][k]);
      pl.add(played_errors[j][k]);
    }
    curve.mean_iterate[k] = it.mean();
    curve.se_iterate[k] = it.standard_error();
    curve.mean_played[k] = pl.mean();
    curve.se_played[k] = pl.standard_error();
  }
  return curve;
}

// Independent replicates with seeds seed_base + j. The reduction runs in
// replicate order, so the result does not depend on thread scheduling.
inline ErrorCurve run_replicated(const GameSpec& game, const RunConfig& config,
                                 const EquilibriumCertificate& certificate, long replicates,
                                 std::uint64_t seed_base, int workers = 1) {
  if (replicates < 1) {
    throw Error(ErrorKind::kInvalidInput, "replicates must be >= 1");
  }
  validate_run(game, config);
  std::vector<std::vector<double>> iterate_errors(replicates);
  std::vector<std::vector<double>> played_errors(replicates);
  std::vector<long> steps;
  parallel_for(replicates, workers, [&](long j) {
    RunConfig local = config;
    local.seed = seed_base + static_cast<std::uint64_t>(j);
    local.store_points = false;
    Trajectory traj = run(game, local, &certificate);
    iterate_errors[j] = std::move(traj.iterate_errors);
    played_errors[j] = std::move(traj.played_errors);
    if (j == 0) steps = std::move(traj.steps);
  });
  return reduce_errors(iterate_errors, played_errors, steps);
}

// Parameter selection for a target accuracy ----------------------------------

enum class GuaranteeVariant { kIterateOnly, kBothGuarantees };

inline std::string_view to_string(GuaranteeVariant v) {
  return v == GuaranteeVariant::kIterateOnly ? "iterate-only" : "both-guarantees";
}

struct ParameterChoice {
  double delta = 0.0;
  long horizon = 0;
  double horizon_bound = 0.0;  // the real-valued bound before rounding up
  double max_epsilon = 0.0;    // admissibility threshold (exclusive)
  GuaranteeVariant variant = GuaranteeVariant::kIterateOnly;
};

namespace detail {

// (alpha + beta sqrt(n)) R + beta n, plus alpha sqrt(n) when the played
// actions must also be accurate.
inline double accuracy_scale(const GameSpec& game, GuaranteeVariant variant) {
  const auto& k = game.constants();
  const double n = static_cast<double>(game.players());
  const double big_r = game.set().outer_radius();
  double scale = (k.alpha + k.beta * std::sqrt(n)) * big_r + k.beta * n;
  if (variant == GuaranteeVariant::kBothGuarantees) scale += k.alpha * std::sqrt(n);
  return scale;
}

// ceil that ignores round-off just above an integer.
inline double ceil_snapped(double value) {
  const double nearest = std::round(value);
  if (std::abs(value - nearest) <= 1e-9 * std::max(1.0, std::abs(value))) return nearest;
  return std::ceil(value);
}

}  // namespace detail

// Largest admissible target accuracy (exclusive):
//   scale^2 * min{1 / (L^2 n^3), 4 r^2 / alpha^2}, the first term dropped for
//   n = 1 or L = 0.
inline double admissible_epsilon(const GameSpec& game, GuaranteeVariant variant) {
  const auto& k = game.constants();
  const double n = static_cast<double>(game.players());
  const double r = game.set().inner_radius();
  const double scale = detail::accuracy_scale(game, variant);
  double factor = 4.0 * r * r / (k.alpha * k.alpha);
  if (game.players() > 1 && k.lipschitz_jacobian > 0.0) {
    factor = std::min(factor, 1.0 / (k.lipschitz_jacobian * k.lipschitz_jacobian * n * n * n));
  }
  return scale * scale * factor;
}

// delta = alpha sqrt(eps / 4) / scale and
// T = ceil(max{32 alpha^4 eps R^2, 64 scale^2 F* d^2 n} / (alpha^4 eps^2)).
inline ParameterChoice choose_parameters(const GameSpec& game, double epsilon,
                                         GuaranteeVariant variant = GuaranteeVariant::kIterateOnly) {
  const double max_eps = admissible_epsilon(game, variant);
  if (!(epsilon > 0.0) || !(epsilon < max_eps)) {
    std::ostringstream msg;
    msg << "target accuracy epsilon = " << epsilon << " is outside the admissible range (0, "
        << max_eps << ")";
    throw AccuracyOutOfRange(msg.str(), max_eps);
  }
  const auto& k = game.constants();
  const double n = static_cast<double>(game.players());
  const double d = static_cast<double>(game.total_dim());
  const double big_r = game.set().outer_radius();
  const double scale = detail::accuracy_scale(game, variant);
  const double a4 = std::pow(k.alpha, 4);

  ParameterChoice choice;
  choice.variant = variant;
  choice.max_epsilon = max_eps;
  choice.delta = k.alpha * std::sqrt(epsilon / 4.0) / scale;
  const double numerator =
      std::max(32.0 * a4 * epsilon * big_r * big_r, 64.0 * scale * scale * k.f_star * d * d * n);
  choice.horizon_bound = numerator / (a4 * epsilon * epsilon);
  const double rounded = detail::ceil_snapped(choice.horizon_bound);
  if (!(rounded < 9.0e18)) {
    throw Error(ErrorKind::kInvalidInput, "prescribed horizon overflows");
  }
  choice.horizon = static_cast<long>(rounded);
  return choice;
}

}  // namespace dfgp

#endif  // DFGP_ENGINE_HPP_
