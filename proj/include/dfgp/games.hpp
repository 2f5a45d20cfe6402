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

#ifndef DFGP_GAMES_HPP_
#define DFGP_GAMES_HPP_

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "dfgp/core.hpp"
#include "dfgp/feasible_set.hpp"
#include "dfgp/game.hpp"

namespace dfgp {

// Parameters of the linear-quadratic family (optionally with quartic terms):
//
//   f_i(x) = 1/2 x_i' M_ii x_i + x_i' (sum_{j != i} M_ij x_j + b_i) + c_i
//            + q_i ||x_i||^4
//
// so that the joint gradient map is g(x) = M x + b (+ 4 q_i ||x_i||^2 x_i).
struct PolynomialGameParams {
  std::vector<int> dims;
  Matrix matrix;                  // M, d x d
  Vector linear;                  // b, length d
  std::vector<double> offsets;    // c_i, empty means zero
  std::vector<double> quartic;    // q_i >= 0, empty means zero
  std::optional<FeasibleSet> set;  // defaults to unit balls
  std::optional<GameConstants> declared;
};

namespace detail {

inline double spectral_norm(const Matrix& a) {
  if (a.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(a);
  return svd.singularValues()(0);
}

}  // namespace detail

// Closed-form constants for the polynomial family on the given set.
//   alpha = lambda_min((M + M')/2)      (quartic terms are convex)
//   beta  = max_i ||M_i.|| + 12 q_i R_i^2
//   L     = max_i 24 q_i R_i
//   F*    = max_i (1/2||M_ii|| R_i^2 + ||M_i,-i|| R_i R_-i + ||b_i|| R_i
//                  + |c_i| + q_i R_i^4)^2
inline GameConstants polynomial_game_constants(const PolynomialGameParams& p,
                                               const FeasibleSet& set) {
  const BlockLayout& layout = set.layout();
  const int n = layout.players();
  const Matrix sym = 0.5 * (p.matrix + p.matrix.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> eig(sym, Eigen::EigenvaluesOnly);

  GameConstants c;
  c.alpha = eig.eigenvalues()(0);
  double outer_sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double ri = set.player(i).outer_radius();
    outer_sq += ri * ri;
  }
  double max_bound = 0.0;
  for (int i = 0; i < n; ++i) {
    const int off = layout.offset(i);
    const int di = layout.dim(i);
    const double ri = set.player(i).outer_radius();
    const double r_rest = std::sqrt(std::max(0.0, outer_sq - ri * ri));
    const double qi = p.quartic.empty() ? 0.0 : p.quartic[i];
    const double ci = p.offsets.empty() ? 0.0 : p.offsets[i];

    const Matrix row = p.matrix.middleRows(off, di);
    c.beta = std::max(c.beta, detail::spectral_norm(row) + 12.0 * qi * ri * ri);
    c.lipschitz_jacobian = std::max(c.lipschitz_jacobian, 24.0 * qi * ri);

    Matrix others = row;
    others.middleCols(off, di).setZero();
    const double bound = 0.5 * detail::spectral_norm(row.middleCols(off, di)) * ri * ri +
                         detail::spectral_norm(others) * ri * r_rest +
                         p.linear.segment(off, di).norm() * ri + std::abs(ci) +
                         qi * ri * ri * ri * ri;
    max_bound = std::max(max_bound, bound);
  }
  c.f_star = max_bound * max_bound;
  return c;
}

inline GameSpec make_polynomial_game(const PolynomialGameParams& p,
                                     std::string name) {
  const BlockLayout layout(p.dims);
  const int n = layout.players();
  const int d = layout.total();
  if (p.matrix.rows() != d || p.matrix.cols() != d) {
    throw Error(ErrorKind::kInvalidInput, "matrix must be d x d with d = sum of dims");
  }
  if (p.linear.size() != d) {
    throw Error(ErrorKind::kInvalidInput, "linear term must have length d");
  }
  if (!p.offsets.empty() && static_cast<int>(p.offsets.size()) != n) {
    throw Error(ErrorKind::kInvalidInput, "need one cost offset per player");
  }
  if (!p.quartic.empty() && static_cast<int>(p.quartic.size()) != n) {
    throw Error(ErrorKind::kInvalidInput, "need one quartic coefficient per player");
  }
  for (double q : p.quartic) {
    if (!(q >= 0.0) || !std::isfinite(q)) {
      throw Error(ErrorKind::kInvalidInput, "quartic coefficients must be >= 0");
    }
  }
  if (!p.matrix.allFinite() || !p.linear.allFinite()) {
    throw Error(ErrorKind::kInvalidInput, "game coefficients must be finite");
  }
  for (int i = 0; i < n; ++i) {
    const auto own = p.matrix.block(layout.offset(i), layout.offset(i),
                                    layout.dim(i), layout.dim(i));
    if ((own - own.transpose()).norm() > 1e-12 * (1.0 + own.norm())) {
      throw Error(ErrorKind::kInvalidInput,
                  "diagonal blocks M_ii must be symmetric");
    }
  }

  FeasibleSet set = p.set.value_or(unit_balls(p.dims));
  if (!(set.layout() == layout)) {
    throw Error(ErrorKind::kInvalidInput,
                "feasible set dimensions do not match the game");
  }
  const GameConstants derived = polynomial_game_constants(p, set);
  if (!(derived.alpha > 0.0)) {
    throw Error(ErrorKind::kInvalidInput,
                "(M + M')/2 must be positive definite for strong monotonicity");
  }
  const GameConstants constants = p.declared.value_or(derived);

  std::vector<CostOracle> costs;
  std::vector<GradientOracle> grads;
  bool affine = true;
  for (int i = 0; i < n; ++i) {
    const int off = layout.offset(i);
    const int di = layout.dim(i);
    const Matrix rows = p.matrix.middleRows(off, di);
    const Matrix own = p.matrix.block(off, off, di, di);
    const Vector bi = p.linear.segment(off, di);
    const double ci = p.offsets.empty() ? 0.0 : p.offsets[i];
    const double qi = p.quartic.empty() ? 0.0 : p.quartic[i];
    if (qi != 0.0) affine = false;

    costs.emplace_back([rows, own, bi, ci, qi, off, di](const Vector& x) {
      double value = ci;
      double sq_norm = 0.0;
      for (int a = 0; a < di; ++a) {
        const double xa = x[off + a];
        const double full = rows.row(a).dot(x);
        const double self = own.row(a).dot(x.segment(off, di));
        value += xa * (full - 0.5 * self + bi[a]);
        sq_norm += xa * xa;
      }
      return value + qi * sq_norm * sq_norm;
    });
    grads.emplace_back([rows, bi, qi, off, di](const Vector& x) {
      Vector g = rows * x + bi;
      if (qi != 0.0) {
        const auto xi = x.segment(off, di);
        g += 4.0 * qi * xi.squaredNorm() * xi;
      }
      return g;
    });
  }
  return GameSpec(std::move(name), std::move(set), std::move(costs),
                  std::move(grads), constants, affine);
}

// Purely quadratic costs; the gradient map is affine, so smoothing leaves it
// unchanged and L = 0.
inline GameSpec make_linear_quadratic(PolynomialGameParams p,
                                      std::string name = "linear-quadratic") {
  p.quartic.clear();
  return make_polynomial_game(p, std::move(name));
}

inline GameSpec make_quartic(PolynomialGameParams p, std::vector<double> coefficients,
                             std::string name = "quartic") {
  p.quartic = std::move(coefficients);
  return make_polynomial_game(p, std::move(name));
}

// Built-in benchmarks ------------------------------------------------------

// Two scalar players, coupled through a rotation-like skew part:
// M = [[1, .5], [-.5, 1]], equilibrium x* = (0.3, -0.2) in the interior.
inline PolynomialGameParams lq_benchmark_params() {
  PolynomialGameParams p;
  p.dims = {1, 1};
  p.matrix.resize(2, 2);
  p.matrix << 1.0, 0.5, -0.5, 1.0;
  p.linear.resize(2);
  p.linear << -0.2, 0.35;
  return p;
}

inline Vector lq_benchmark_equilibrium() {
  Vector x(2);
  x << 0.3, -0.2;
  return x;
}

inline GameSpec lq_benchmark() {
  return make_linear_quadratic(lq_benchmark_params(), "lq-benchmark");
}

inline GameSpec quartic_benchmark() {
  return make_quartic(lq_benchmark_params(), {0.05, 0.05}, "quartic-benchmark");
}

// Decoupled f_i = x_i^2 / 2 - 1/4 on [-1, 1]; |f_i| <= 1/4 so F* = 1/16.
// The smallest-horizon two-player instance with alpha = beta = 1.
inline GameSpec lq_centered() {
  PolynomialGameParams p;
  p.dims = {1, 1};
  p.matrix = Matrix::Identity(2, 2);
  p.linear = Vector::Zero(2);
  p.offsets = {-0.25, -0.25};
  p.declared = GameConstants{1.0, 1.0, 0.0, 1.0 / 16.0};
  return make_linear_quadratic(p, "lq-centered");
}

// Single player version of lq_centered.
inline GameSpec scalar_centered() {
  PolynomialGameParams p;
  p.dims = {1};
  p.matrix = Matrix::Identity(1, 1);
  p.linear = Vector::Zero(1);
  p.offsets = {-0.25};
  p.declared = GameConstants{1.0, 1.0, 0.0, 1.0 / 16.0};
  return make_linear_quadratic(p, "scalar-centered");
}

inline std::vector<std::string> builtin_game_names() {
  return {"lq-benchmark", "quartic-benchmark", "lq-centered", "scalar-centered"};
}

inline GameSpec builtin_game(const std::string& name) {
  if (name == "lq-benchmark") return lq_benchmark();
  if (name == "quartic-benchmark") return quartic_benchmark();
  if (name == "lq-centered") return lq_centered();
  if (name == "scalar-centered") return scalar_centered();
  throw Error(ErrorKind::kConfiguration, "unknown built-in game '" + name + "'");
}

}  // namespace dfgp

#endif  // DFGP_GAMES_HPP_
