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

#ifndef DFGP_CERTIFY_HPP_
#define DFGP_CERTIFY_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "dfgp/core.hpp"
#include "dfgp/game.hpp"
#include "dfgp/sampling.hpp"

namespace dfgp {

struct PointPair {
  Vector x;
  Vector x_prime;
};

// One falsified inequality. `assumption` is one of
//   "lipschitz-gradient"  ||grad_i f_i(x) - grad_i f_i(x')|| <= beta ||x - x'||
//   "lipschitz-jacobian"  ||J_i(x) - J_i(x')||_op <= L ||x - x'||
//   "strong-monotonicity" <g(x) - g(x'), x - x'> >= alpha ||x - x'||^2
//   "cost-bound"          |f_i(x)| <= sqrt(F*)
//   "gradient-oracle"     oracle agrees with finite differences of f_i
// For the ratio checks `measured` is the empirical constant of the pair.
struct Violation {
  std::string assumption;
  int player = -1;
  Vector x;
  Vector x_prime;
  double measured = 0.0;
  double bound = 0.0;
};

struct CertificationReport {
  long samples = 0;
  std::vector<Violation> violations;   // at most kMaxStored per assumption
  std::map<std::string, long> violation_counts;
  double max_gradient_ratio = 0.0;     // max measured beta
  double max_jacobian_ratio = 0.0;     // max measured L
  double min_monotonicity_ratio = INFINITY;  // min measured alpha
  double max_abs_cost = 0.0;

  static constexpr long kMaxStored = 32;

  bool passed() const { return violation_counts.empty(); }

  long count(const std::string& assumption) const {
    auto it = violation_counts.find(assumption);
    return it == violation_counts.end() ? 0 : it->second;
  }
};

namespace detail {

inline void record(CertificationReport& report, Violation v) {
  long& count = report.violation_counts[v.assumption];
  if (count < CertificationReport::kMaxStored) report.violations.push_back(std::move(v));
  ++count;
}

// Rows: components of grad_i f_i; columns: all d coordinates.
inline Matrix finite_difference_jacobian(const GameSpec& game, int i, const Vector& x) {
  const int d = game.total_dim();
  Matrix jac(game.dim(i), d);
  Vector probe = x;
  for (int k = 0; k < d; ++k) {
    const double h = 1e-5 * std::max(1.0, std::abs(x[k]));
    probe[k] = x[k] + h;
    const Vector up = game.partial_gradient(i, probe);
    probe[k] = x[k] - h;
    const Vector down = game.partial_gradient(i, probe);
    probe[k] = x[k];
    jac.col(k) = (up - down) / (2.0 * h);
  }
  return jac;
}

template <class Urbg>
Vector sample_point_in_set(const FeasibleSet& set, Urbg& rng) {
  Vector x(set.dim());
  std::bernoulli_distribution interior(0.5);
  for (int i = 0; i < set.players(); ++i) {
    const PlayerSet& s = set.player(i);
    auto block = set.layout().block(x, i);
    sample_ball_into(block, rng);
    if (interior(rng)) {
      block *= s.inner_radius();
    } else {
      // Spread over the bounding ball and fold back; this covers the boundary.
      block *= s.outer_radius();
      s.project_inplace(block);
    }
  }
  return x;
}

}  // namespace detail

// Samples point pairs in X and reports every falsified standing assumption.
// Zero violations is necessary, not sufficient, for the declared constants.
inline CertificationReport certify_assumptions(const GameSpec& game, long sample_count,
                                               std::uint64_t seed,
                                               std::span<const PointPair> extra_pairs = {}) {
  if (sample_count < 2) {
    throw Error(ErrorKind::kInvalidInput, "certification needs sample_count >= 2");
  }
  const auto& k = game.constants();
  const int n = game.players();
  const double fd_slack = game.has_gradients() ? 1e-6 : 1e-4;
  const double jac_slack = game.has_gradients() ? 1e-5 : 1e-2;
  const double cost_bound = std::sqrt(k.f_star);

  CertificationReport report;
  Rng rng(seed);

  auto check_point = [&](const Vector& x) {
    for (int i = 0; i < n; ++i) {
      const double f = game.cost(i, x);
      if (!std::isfinite(f)) {
        throw Error(ErrorKind::kInvalidInput, "cost oracle returned a non-finite value");
      }
      report.max_abs_cost = std::max(report.max_abs_cost, std::abs(f));
      if (std::abs(f) > cost_bound * (1.0 + 1e-12) + 1e-15) {
        detail::record(report, {"cost-bound", i, x, Vector(), std::abs(f), cost_bound});
      }
      if (game.has_gradients()) {
        const Vector oracle = game.partial_gradient(i, x);
        const Vector fd = game.finite_difference_partial(i, x);
        const double gap = (oracle - fd).norm();
        if (gap > 1e-5 * (1.0 + oracle.norm())) {
          detail::record(report, {"gradient-oracle", i, x, Vector(), gap, 1e-5 * (1.0 + oracle.norm())});
        }
      }
    }
  };

  auto check_pair = [&](const Vector& x, const Vector& y) {
    ++report.samples;
    check_point(x);
    check_point(y);
    const Vector diff = x - y;
    const double dist = diff.norm();
    if (dist < 1e-12) return;

    const Vector gx = game.gradient_map(x);
    const Vector gy = game.gradient_map(y);
    for (int i = 0; i < n; ++i) {
      const double gap = (game.layout().block(gx, i) - game.layout().block(gy, i)).norm();
      report.max_gradient_ratio = std::max(report.max_gradient_ratio, gap / dist);
      if (gap > k.beta * dist + fd_slack) {
        detail::record(report, {"lipschitz-gradient", i, x, y, gap / dist, k.beta});
      }
      const Matrix jx = detail::finite_difference_jacobian(game, i, x);
      const Matrix jy = detail::finite_difference_jacobian(game, i, y);
      const Matrix dj = jx - jy;
      const double op = dj.size() ? Eigen::JacobiSVD<Matrix>(dj).singularValues()(0) : 0.0;
      report.max_jacobian_ratio = std::max(report.max_jacobian_ratio, op / dist);
      if (op > k.lipschitz_jacobian * dist + jac_slack) {
        detail::record(report, {"lipschitz-jacobian", i, x, y, op / dist, k.lipschitz_jacobian});
      }
    }
    const double inner = (gx - gy).dot(diff);
    const double ratio = inner / (dist * dist);
    report.min_monotonicity_ratio = std::min(report.min_monotonicity_ratio, ratio);
    if (inner < k.alpha * dist * dist - fd_slack * dist) {
      detail::record(report, {"strong-monotonicity", -1, x, y, ratio, k.alpha});
    }
  };

  for (const PointPair& pair : extra_pairs) check_pair(pair.x, pair.x_prime);
  for (long s = 0; s < sample_count; ++s) {
    const Vector x = detail::sample_point_in_set(game.set(), rng);
    const Vector y = detail::sample_point_in_set(game.set(), rng);
    check_pair(x, y);
  }
  return report;
}

}  // namespace dfgp

#endif  // DFGP_CERTIFY_HPP_
