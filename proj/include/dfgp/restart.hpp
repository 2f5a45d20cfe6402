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

#ifndef DFGP_RESTART_HPP_
#define DFGP_RESTART_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "dfgp/core.hpp"
#include "dfgp/engine.hpp"
#include "dfgp/equilibrium.hpp"
#include "dfgp/game.hpp"
#include "dfgp/parallel.hpp"

namespace dfgp {

struct RestartStage {
  double delta = 0.0;
  long horizon = 0;
  double epsilon = 0.0;
  long cumulative_steps = 0;
  double step_bound = 0.0;  // closed-form bound on cumulative_steps

  bool operator==(const RestartStage&) const = default;
};

struct RestartPlan {
  double a = 0.0;       // 8 F* d^2 n / alpha^2
  double b = 0.0;       // 2 ((1 + beta sqrt(n) / alpha) R + beta n / alpha)^2
  double delta1 = 0.0;
  double q = 0.5;
  double outer_radius = 0.0;
  std::vector<RestartStage> stages;

  bool operator==(const RestartPlan&) const = default;
};

// Closed-form bound on the total number of updates through a stage reaching
// accuracy epsilon:
//   1 + 1/2 log(2 B d1^2 / eps) + 4 B A q^-4 d1^2 / (q^-4 - 1) eps^-2
//     + 8 R^2 q^-2 d1^-2 / (q^-2 - 1) eps^-1
inline double restart_step_bound(const RestartPlan& plan, double epsilon) {
  const double q2 = 1.0 / (plan.q * plan.q);
  const double q4 = q2 * q2;
  const double d1 = plan.delta1;
  const double big_r = plan.outer_radius;
  return 1.0 + 0.5 * std::log(2.0 * plan.b * d1 * d1 / epsilon) +
         4.0 * plan.b * plan.a * q4 * d1 * d1 / (q4 - 1.0) / (epsilon * epsilon) +
         8.0 * big_r * big_r * q2 / (d1 * d1) / (q2 - 1.0) / epsilon;
}

inline RestartPlan build_plan(const GameSpec& game, double q = 0.5, int stage_count = 4) {
  if (!(q > 0.0 && q < 1.0)) {
    throw Error(ErrorKind::kInvalidInput, "shrink fraction q must lie in (0, 1)");
  }
  if (stage_count < 1) {
    throw Error(ErrorKind::kInvalidInput, "restart plan needs at least one stage");
  }
  const auto& k = game.constants();
  const double n = static_cast<double>(game.players());
  const double d = static_cast<double>(game.total_dim());
  const double big_r = game.set().outer_radius();
  const double r = game.set().inner_radius();

  RestartPlan plan;
  plan.q = q;
  plan.outer_radius = big_r;
  plan.a = 8.0 * k.f_star * d * d * n / (k.alpha * k.alpha);
  const double shift = (1.0 + k.beta * std::sqrt(n) / k.alpha) * big_r + k.beta * n / k.alpha;
  plan.b = 2.0 * shift * shift;
  plan.delta1 = std::min(r, 0.5 * smoothed_monotonicity_limit(game));

  double delta = plan.delta1;
  long total = 0;
  for (int s = 0; s < stage_count; ++s) {
    RestartStage stage;
    stage.delta = delta;
    const double bound = std::max(plan.a / (plan.b * std::pow(delta, 4)),
                                  4.0 * big_r * big_r / (plan.b * delta * delta));
    const double rounded = detail::ceil_snapped(bound);
    if (!(rounded < 9.0e18) || total > static_cast<long>(9.0e18 - rounded)) {
      throw Error(ErrorKind::kInvalidInput, "restart horizon overflows");
    }
    stage.horizon = static_cast<long>(rounded);
    stage.epsilon = 2.0 * plan.b * plan.delta1 * plan.delta1 * std::pow(q, 2.0 * s);
    total += stage.horizon;
    stage.cumulative_steps = total;
    plan.stages.push_back(stage);
    delta *= q;
  }
  for (auto& stage : plan.stages) stage.step_bound = restart_step_bound(plan, stage.epsilon);
  return plan;
}

struct StageResult {
  RestartStage stage;
  double mean_iterate = 0.0;  // replicate mean of ||y^k - x*||^2
  double se_iterate = 0.0;
  double mean_played = 0.0;
  double se_played = 0.0;
};

struct StagedErrorCurve {
  std::vector<StageResult> stages;
  long replicates = 0;
  bool se_defined = false;
};

namespace detail {

struct ChainOutcome {
  std::vector<double> iterate_errors;
  std::vector<double> played_errors;
};

inline ChainOutcome run_chain(const GameSpec& game, const RestartPlan& plan,
                              const Vector& reference, const Vector& x0, std::uint64_t seed) {
  ChainOutcome out;
  Rng rng(seed);
  Vector y = x0;
  for (std::size_t s = 0; s < plan.stages.size(); ++s) {
    const RestartStage& stage = plan.stages[s];
    const Vector warm = [&] {
      Vector z = y;
      project_shrunk(game.set(), z, 1.0 - stage.delta);
      return z;
    }();
    if (s > 0 && (warm - y).norm() > 1e-12 * (1.0 + y.norm())) {
      throw Error(ErrorKind::kInfeasible, "warm start moved under projection");
    }
    RunConfig config;
    config.delta = stage.delta;
    config.horizon = stage.horizon;
    config.seed = seed;
    config.store_points = false;
    config.x0 = warm;
    Trajectory traj = run_with_rng(game, config, warm, &reference, rng);
    out.iterate_errors.push_back(traj.iterate_errors.back());
    out.played_errors.push_back(traj.played_errors.back());
    y = traj.final_iterate;
  }
  return out;
}

}  // namespace detail

// Chains DFO(y^{k-1}, eta_t = 2 / (alpha t), delta_k, T_k). Each replicate
// runs the whole chain on one random stream seeded with seed_base + j.
inline StagedErrorCurve run_restarted(const GameSpec& game, const RestartPlan& plan,
                                      const EquilibriumCertificate& certificate,
                                      std::uint64_t seed_base, long replicates,
                                      int workers = 1,
                                      const std::optional<Vector>& x0 = std::nullopt) {
  if (replicates < 1) {
    throw Error(ErrorKind::kInvalidInput, "replicates must be >= 1");
  }
  if (plan.stages.empty()) {
    throw Error(ErrorKind::kInvalidSchedule, "restart plan has no stages");
  }
  const double r = game.set().inner_radius();
  for (const auto& stage : plan.stages) {
    if (!(stage.delta > 0.0 && stage.delta <= r)) {
      throw Error(ErrorKind::kInvalidSchedule, "restart radius outside (0, r]");
    }
  }
  const Vector start = x0.value_or(Vector::Zero(game.total_dim()));
  if (start.size() != game.total_dim() || !game.set().contains(start)) {
    throw Error(ErrorKind::kInfeasible, "restart start point must lie in X");
  }
  std::vector<detail::ChainOutcome> outcomes(replicates);
  parallel_for(replicates, workers, [&](long j) {
    outcomes[j] = detail::run_chain(game, plan, certificate.point, start,
                                    seed_base + static_cast<std::uint64_t>(j));
  });

  StagedErrorCurve curve;
  curve.replicates = replicates;
  curve.se_defined = replicates >= 2;
  for (std::size_t s = 0; s < plan.stages.size(); ++s) {
    RunningStats it;
    RunningStats pl;
    for (const auto& o : outcomes) {
      it.add(o.iterate_errors[s]);
      pl.add(o.played_errors[s]);
    }
    curve.stages.push_back({plan.stages[s], it.mean(), it.standard_error(), pl.mean(),
                            pl.standard_error()});
  }
  return curve;
}

}  // namespace dfgp

#endif  // DFGP_RESTART_HPP_
