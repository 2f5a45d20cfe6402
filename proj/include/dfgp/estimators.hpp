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

#ifndef DFGP_ESTIMATORS_HPP_
#define DFGP_ESTIMATORS_HPP_

#include <string_view>

#include "dfgp/core.hpp"
#include "dfgp/game.hpp"
#include "dfgp/sampling.hpp"

namespace dfgp {

enum class EstimatorKind { kSinglePoint, kTwoPoint };

inline std::string_view to_string(EstimatorKind kind) {
  return kind == EstimatorKind::kSinglePoint ? "single-point" : "two-point";
}

namespace detail {

inline void check_delta(double delta) {
  if (!(delta > 0.0) || !std::isfinite(delta)) {
    throw Error(ErrorKind::kInvalidInput, "query radius delta must be positive");
  }
}

}  // namespace detail

// Single-point bandit estimate, written into `out`. `probe` is scratch space.
// Every player evaluates its own cost at the same perturbed profile x + delta v:
//   ghat_i = (d_i / delta) f_i(x + delta v) v_i.
inline void single_point_estimate_into(const GameSpec& game, const Vector& x,
                                       double delta, const Vector& v,
                                       Vector& probe, Vector& out) {
  detail::check_delta(delta);
  probe = x + delta * v;
  if (!game.set().contains(probe)) {
    throw Error(ErrorKind::kInfeasible,
                "perturbed action x + delta v leaves the feasible set");
  }
  out.resize(x.size());
  const BlockLayout& layout = game.layout();
  for (int i = 0; i < layout.players(); ++i) {
    const double scale = layout.dim(i) / delta * game.cost(i, probe);
    layout.block(out, i) = scale * layout.block(v, i);
  }
}

inline Vector single_point_estimate(const GameSpec& game, const Vector& x,
                                    double delta, const DirectionSample& v) {
  Vector probe;
  Vector out;
  single_point_estimate_into(game, x, delta, v.v, probe, out);
  return out;
}

// Symmetric two-point estimate. Other players are held at x_{-i}:
//   ghat_i = (d_i / 2 delta) (f_i(x_i + delta u_i, x_-i) - f_i(x_i - delta u_i, x_-i)) u_i.
inline void two_point_estimate_into(const GameSpec& game, const Vector& x,
                                    double delta, const Vector& u,
                                    Vector& probe, Vector& out) {
  detail::check_delta(delta);
  const BlockLayout& layout = game.layout();
  out.resize(x.size());
  probe = x;
  for (int i = 0; i < layout.players(); ++i) {
    auto block = layout.block(probe, i);
    const auto ui = layout.block(u, i);
    const auto xi = layout.block(x, i);
    block = xi + delta * ui;
    if (!game.set().player(i).contains(block)) {
      throw Error(ErrorKind::kInfeasible, "probe x_i + delta u_i is infeasible");
    }
    const double up = game.cost(i, probe);
    block = xi - delta * ui;
    if (!game.set().player(i).contains(block)) {
      throw Error(ErrorKind::kInfeasible, "probe x_i - delta u_i is infeasible");
    }
    const double down = game.cost(i, probe);
    block = xi;
    layout.block(out, i) = (layout.dim(i) / (2.0 * delta) * (up - down)) * ui;
  }
}

inline Vector two_point_estimate(const GameSpec& game, const Vector& x,
                                 double delta, const DirectionSample& u) {
  Vector probe;
  Vector out;
  two_point_estimate_into(game, x, delta, u.v, probe, out);
  return out;
}

inline long cost_evaluations_per_step(EstimatorKind kind, int players) {
  return kind == EstimatorKind::kSinglePoint ? players : 2L * players;
}

}  // namespace dfgp

#endif  // DFGP_ESTIMATORS_HPP_
