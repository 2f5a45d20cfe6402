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

#ifndef DFGP_EQUILIBRIUM_HPP_
#define DFGP_EQUILIBRIUM_HPP_

#include <cmath>
#include <functional>
#include <sstream>
#include <string>

#include "dfgp/core.hpp"
#include "dfgp/game.hpp"
#include "dfgp/smoothing.hpp"

namespace dfgp {

// A numerically solved Nash equilibrium of the game with costs f_i^delta
// (f_i when delta = 0) over shrink * X.
struct EquilibriumCertificate {
  Vector point;
  double residual = 0.0;    // ||x - proj(x - probe_step * g_eff(x))||
  double tolerance = 0.0;
  double probe_step = 0.0;  // 1 / beta
  double shrink = 1.0;
  double smoothing_delta = 0.0;
  long iterations = 0;
  std::string oracle;
};

struct EquilibriumOptions {
  double tolerance = 1e-10;
  long max_iterations = 1'000'000;
  SmoothingMode mode = SmoothingMode::automatic();
};

// Largest delta for which the smoothed map keeps a positive monotonicity
// modulus (1 - c) alpha for some c < 1; infinite when the bound is vacuous.
inline double smoothed_monotonicity_limit(const GameSpec& game, double c = 1.0) {
  const auto& k = game.constants();
  const int n = game.players();
  if (n == 1 || k.lipschitz_jacobian == 0.0) return INFINITY;
  return c * k.alpha / (k.lipschitz_jacobian * std::pow(static_cast<double>(n), 1.5));
}

inline double vi_residual(const FeasibleSet& set, const Vector& x, const Vector& gx,
                          double shrink, double step) {
  return (x - set.project(x - step * gx, shrink)).norm();
}

// Projected extragradient on the variational inequality of g_eff over shrink*X.
inline EquilibriumCertificate solve_equilibrium(const GameSpec& game, double shrink,
                                                double smoothing_delta,
                                                const EquilibriumOptions& options = {}) {
  if (!(shrink > 0.0 && shrink <= 1.0)) {
    throw Error(ErrorKind::kInvalidInput, "shrink must lie in (0, 1]");
  }
  if (!(smoothing_delta >= 0.0)) {
    throw Error(ErrorKind::kInvalidInput, "smoothing delta must be >= 0");
  }
  if (!(options.tolerance > 0.0)) {
    throw Error(ErrorKind::kInvalidInput, "tolerance must be positive");
  }
  const double limit = smoothed_monotonicity_limit(game);
  if (smoothing_delta > 0.0 && !(smoothing_delta < limit)) {
    std::ostringstream msg;
    msg << "smoothed game is not certified strongly monotone: need delta < "
        << limit;
    throw Error(ErrorKind::kInvalidInput, msg.str());
  }

  const auto& k = game.constants();
  const double beta = k.beta;
  const double n = static_cast<double>(game.players());
  const double probe_step = 1.0 / beta;
  // g_eff is at most beta*sqrt(n)-Lipschitz; extragradient needs step < 1/Lip.
  const double step = 0.9 / (beta * std::sqrt(n));

  std::string oracle = "gradient";
  std::function<SmoothedMap(const Vector&)> g_eff;
  if (smoothing_delta == 0.0) {
    g_eff = [&game](const Vector& x) {
      return SmoothedMap{game.gradient_map(x), Vector::Zero(game.players())};
    };
  } else {
    g_eff = [&game, smoothing_delta, &options](const Vector& x) {
      return smoothed_gradient_map(game, x, smoothing_delta, options.mode);
    };
    oracle = "smoothed";
  }

  const FeasibleSet& set = game.set();
  Vector x = Vector::Zero(game.total_dim());
  double residual = INFINITY;
  for (long it = 0; it <= options.max_iterations; ++it) {
    const SmoothedMap gx = g_eff(x);
    residual = vi_residual(set, x, gx.value, shrink, probe_step);
    if (residual <= options.tolerance) {
      const double se = gx.player_standard_errors.size() > 0
                            ? gx.player_standard_errors.maxCoeff()
                            : 0.0;
      if (se > options.tolerance / 10.0) {
        std::ostringstream msg;
        msg << "monte-carlo smoothing standard error " << se
            << " exceeds tolerance/10; equilibrium cannot be certified";
        throw SolverFailure(msg.str(), residual);
      }
      EquilibriumCertificate cert;
      cert.point = x;
      cert.residual = residual;
      cert.tolerance = options.tolerance;
      cert.probe_step = probe_step;
      cert.shrink = shrink;
      cert.smoothing_delta = smoothing_delta;
      cert.iterations = it;
      cert.oracle = oracle;
      return cert;
    }
    if (it == options.max_iterations) break;
    const Vector y = set.project(x - step * gx.value, shrink);
    const SmoothedMap gy = g_eff(y);
    x = set.project(x - step * gy.value, shrink);
  }
  std::ostringstream msg;
  msg << "extragradient did not reach residual " << options.tolerance << " within "
      << options.max_iterations << " iterations";
  throw SolverFailure(msg.str(), residual);
}

}  // namespace dfgp

#endif  // DFGP_EQUILIBRIUM_HPP_
