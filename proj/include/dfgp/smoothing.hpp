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

#ifndef DFGP_SMOOTHING_HPP_
#define DFGP_SMOOTHING_HPP_

#include <cmath>
#include <cstdint>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "dfgp/core.hpp"
#include "dfgp/game.hpp"
#include "dfgp/sampling.hpp"

namespace dfgp {

// How grad_i f_i^delta is evaluated. kAuto picks the affine identity when the
// game's gradient map is affine, exact enumeration + quadrature when every
// player is scalar, and Monte Carlo otherwise.
struct SmoothingMode {
  enum class Kind { kAuto, kExact1d, kMonteCarlo };

  Kind kind = Kind::kAuto;
  long replicates = 100000;
  std::uint64_t seed = 0x5eed;

  static SmoothingMode automatic(long replicates = 100000, std::uint64_t seed = 0x5eed) {
    return {Kind::kAuto, replicates, seed};
  }
  static SmoothingMode exact_1d() { return {Kind::kExact1d, 0, 0}; }
  static SmoothingMode monte_carlo(long replicates, std::uint64_t seed = 0x5eed) {
    return {Kind::kMonteCarlo, replicates, seed};
  }
};

struct SmoothedGradient {
  Vector value;
  // Zero for the exact routes; sqrt(trace(Cov) / N) for Monte Carlo.
  double standard_error = 0.0;
  std::string method;
};

namespace detail {

inline constexpr double kQuadratureTolerance = 1e-10;

inline void check_exact_support(const GameSpec& game, const Vector& x, double delta) {
  // For scalar players the support of U_i lies in the box prod_j [x_j - delta, x_j + delta].
  for (int j = 0; j < game.players(); ++j) {
    const auto& set = game.set().player(j);
    Vector probe(1);
    for (double sign : {-1.0, 1.0}) {
      probe[0] = x[j] + sign * delta;
      if (!set.contains(probe)) {
        throw Error(ErrorKind::kInfeasible,
                    "smoothing support x + delta w leaves the feasible set");
      }
    }
  }
}

// E_{w ~ U_i} grad_i f_i(x + delta w) for scalar players: average over the
// 2^{n-1} sign patterns of the other players, and Gauss-Kronrod over w_i.
inline SmoothedGradient exact_1d_smoothed_gradient(const GameSpec& game, const Vector& x,
                                                   double delta, int player) {
  if (!game.layout().all_scalar()) {
    throw Error(ErrorKind::kUnsupportedMode,
                "exact-1d smoothing requires every player to be one-dimensional");
  }
  const int n = game.players();
  if (n > 30) {
    throw Error(ErrorKind::kUnsupportedMode, "exact-1d smoothing supports at most 30 players");
  }
  check_exact_support(game, x, delta);

  const std::uint64_t patterns = std::uint64_t{1} << (n - 1);
  Vector probe = x;
  double total = 0.0;
  for (std::uint64_t mask = 0; mask < patterns; ++mask) {
    int bit = 0;
    for (int j = 0; j < n; ++j) {
      if (j == player) continue;
      const double sign = ((mask >> bit) & 1U) ? 1.0 : -1.0;
      probe[j] = x[j] + delta * sign;
      ++bit;
    }
    auto integrand = [&](double w) {
      Vector local = probe;
      local[player] = x[player] + delta * w;
      return game.partial_gradient(player, local)[0];
    };
    total += 0.5 * boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
                       integrand, -1.0, 1.0, 15, kQuadratureTolerance);
  }
  SmoothedGradient out;
  out.value = Vector::Constant(1, total / static_cast<double>(patterns));
  out.method = "exact-1d";
  return out;
}

inline SmoothedGradient monte_carlo_smoothed_gradient(const GameSpec& game, const Vector& x,
                                                      double delta, int player,
                                                      long replicates, std::uint64_t seed) {
  if (replicates < 2) {
    throw Error(ErrorKind::kInvalidInput, "monte-carlo smoothing needs >= 2 replicates");
  }
  Rng rng(seed);
  RunningVectorStats stats(game.dim(player));
  Vector w;
  Vector probe;
  for (long r = 0; r < replicates; ++r) {
    sample_mixed_into(game.layout(), player, rng, w);
    probe = x + delta * w;
    if (!game.set().contains(probe)) {
      throw Error(ErrorKind::kInfeasible,
                  "smoothing support x + delta w leaves the feasible set");
    }
    stats.add(game.partial_gradient(player, probe));
  }
  SmoothedGradient out;
  out.value = stats.mean();
  out.standard_error = stats.standard_error_norm();
  out.method = "monte-carlo";
  return out;
}

}  // namespace detail

// grad_i f_i^delta(x), where f_i^delta(x) = E_{w ~ U_i} f_i(x + delta w) and U_i
// is uniform on B_i x prod_{j != i} S_j.
inline SmoothedGradient smoothed_gradient(const GameSpec& game, const Vector& x,
                                          double delta, int player,
                                          const SmoothingMode& mode = SmoothingMode{}) {
  if (player < 0 || player >= game.players()) {
    throw Error(ErrorKind::kInvalidInput, "player index out of range");
  }
  if (!(delta >= 0.0) || !x.allFinite()) {
    throw Error(ErrorKind::kInvalidInput, "smoothing needs delta >= 0 and finite x");
  }
  if (delta == 0.0) {
    return {game.partial_gradient(player, x), 0.0, "unsmoothed"};
  }
  switch (mode.kind) {
    case SmoothingMode::Kind::kExact1d:
      return detail::exact_1d_smoothed_gradient(game, x, delta, player);
    case SmoothingMode::Kind::kMonteCarlo:
      return detail::monte_carlo_smoothed_gradient(game, x, delta, player,
                                                   mode.replicates, mode.seed);
    case SmoothingMode::Kind::kAuto:
      break;
  }
  if (game.affine_gradients()) {
    // Mean-zero smoothing commutes with an affine map.
    return {game.partial_gradient(player, x), 0.0, "affine-identity"};
  }
  if (game.layout().all_scalar()) {
    return detail::exact_1d_smoothed_gradient(game, x, delta, player);
  }
  return detail::monte_carlo_smoothed_gradient(game, x, delta, player, mode.replicates,
                                               mode.seed);
}

struct SmoothedMap {
  Vector value;
  Vector player_standard_errors;
};

// g^delta(x) = (grad_1 f_1^delta(x), ..., grad_n f_n^delta(x)).
inline SmoothedMap smoothed_gradient_map(const GameSpec& game, const Vector& x, double delta,
                                         const SmoothingMode& mode = SmoothingMode{}) {
  SmoothedMap out;
  out.value.resize(game.total_dim());
  out.player_standard_errors.resize(game.players());
  for (int i = 0; i < game.players(); ++i) {
    SmoothingMode per_player = mode;
    per_player.seed = mode.seed + static_cast<std::uint64_t>(i);
    const SmoothedGradient gi = smoothed_gradient(game, x, delta, i, per_player);
    game.layout().block(out.value, i) = gi.value;
    out.player_standard_errors[i] = gi.standard_error;
  }
  return out;
}

}  // namespace dfgp

#endif  // DFGP_SMOOTHING_HPP_
