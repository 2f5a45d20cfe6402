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


#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "dfgp/certify.hpp"
#include "dfgp/equilibrium.hpp"
#include "dfgp/feasible_set.hpp"
#include "dfgp/games.hpp"
#include "support/oracles.hpp"

namespace dfgp {
namespace {

Vector vec(std::initializer_list<double> values) {
  Vector v(static_cast<int>(values.size()));
  int k = 0;
  for (double x : values) v[k++] = x;
  return v;
}

FeasibleSet box2() {
  return FeasibleSet({PlayerSet::box(vec({-1.0, -1.0}), vec({1.0, 1.0}))});
}

TEST(ProjectTest, ScaledBoxClamps) {
  EXPECT_TRUE(box2().project(vec({2.0, 0.0}), 0.5).isApprox(vec({0.5, 0.0})));
}

TEST(ProjectTest, InteriorPointFixed) {
  FeasibleSet ball({PlayerSet::ball(2, 1.0)});
  EXPECT_EQ(ball.project(vec({0.3, 0.4}), 1.0), vec({0.3, 0.4}));
}

TEST(ProjectTest, RadialProjectionOntoScaledBall) {
  FeasibleSet ball({PlayerSet::ball(2, 1.0)});
  const Vector p = ball.project(vec({3.0, 4.0}), 0.5);
  EXPECT_NEAR(p[0], 0.3, 1e-15);
  EXPECT_NEAR(p[1], 0.4, 1e-15);
}

TEST(ProjectTest, RejectsNonFiniteAndBadShrink) {
  FeasibleSet ball({PlayerSet::ball(2, 1.0)});
  try {
    ball.project(vec({NAN, 0.0}), 1.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kInvalidInput);
  }
  EXPECT_THROW(ball.project(vec({0.0, 0.0}), 0.0), Error);
  EXPECT_THROW(ball.project(vec({0.0, 0.0}), 1.5), Error);
}

std::vector<FeasibleSet> sample_sets() {
  return {
      FeasibleSet({PlayerSet::ball(2, 1.0), PlayerSet::ball(1, 0.5)}),
      FeasibleSet({PlayerSet::box(vec({-1.0, -0.3}), vec({0.5, 2.0}))}),
      FeasibleSet({PlayerSet::ball_box(1.0, vec({-0.8, -0.2}), vec({0.6, 0.9})),
                   PlayerSet::ball(1, 2.0)}),
  };
}

// Projection p of z is characterised by <z - p, y - p> <= 0 for all y in the set.
TEST(ProjectTest, SatisfiesVariationalCharacterisation) {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> normal(0.0, 2.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (const FeasibleSet& set : sample_sets()) {
    for (double shrink : {1.0, 0.7}) {
      for (int trial = 0; trial < 200; ++trial) {
        Vector z(set.dim());
        for (int k = 0; k < z.size(); ++k) z[k] = normal(rng);
        const Vector p = set.project(z, shrink);
        ASSERT_TRUE(set.contains(p, shrink, 1e-10));
        for (int s = 0; s < 50; ++s) {
          Vector y(set.dim());
          for (int k = 0; k < y.size(); ++k) y[k] = normal(rng);
          y = set.project(y, shrink);
          EXPECT_LE((z - p).dot(y - p), 1e-9);
        }
        EXPECT_TRUE(set.project(p, shrink).isApprox(p, 1e-14) || p.norm() == 0.0);
      }
    }
  }
}

TEST(ProjectTest, NonExpansive) {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> normal(0.0, 3.0);
  for (const FeasibleSet& set : sample_sets()) {
    for (int trial = 0; trial < 500; ++trial) {
      Vector a(set.dim());
      Vector b(set.dim());
      for (int k = 0; k < a.size(); ++k) {
        a[k] = normal(rng);
        b[k] = normal(rng);
      }
      EXPECT_LE((set.project(a, 0.8) - set.project(b, 0.8)).norm(), (a - b).norm() + 1e-12);
    }
  }
}

TEST(FeasibleSetTest, RadiiBracketTheSet) {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> normal;
  for (const FeasibleSet& set : sample_sets()) {
    const double r = set.inner_radius();
    const double big_r = set.outer_radius();
    EXPECT_LE(r, big_r);
    for (int trial = 0; trial < 2000; ++trial) {
      Vector u(set.dim());
      for (int k = 0; k < u.size(); ++k) u[k] = normal(rng);
      u.normalize();
      EXPECT_TRUE(set.contains(r * u, 1.0, 1e-12));
      Vector far = 10.0 * big_r * u;
      EXPECT_LE(set.project(far).norm(), big_r + 1e-12);
    }
  }
  const FeasibleSet unit = unit_balls({1, 1});
  EXPECT_DOUBLE_EQ(unit.inner_radius(), 1.0);
  EXPECT_DOUBLE_EQ(unit.outer_radius(), std::sqrt(2.0));
}

TEST(FeasibleSetTest, RejectsBoxWithoutOriginInside) {
  EXPECT_THROW(PlayerSet::box(vec({0.0}), vec({1.0})), Error);
  EXPECT_THROW(PlayerSet::ball(1, -1.0), Error);
  EXPECT_THROW(FeasibleSet({PlayerSet::ball(1, 1.0)}, 2.0), Error);
}

TEST(GameTest, BenchmarkConstantsMatchHandDerivation) {
  const GameSpec lq = lq_benchmark();
  // sym(M) = I, row norms sqrt(1 + 1/4), |f_2| <= 1/2 + 1/2 + 0.35 on unit intervals.
  EXPECT_NEAR(lq.constants().alpha, 1.0, 1e-12);
  EXPECT_NEAR(lq.constants().beta, std::sqrt(1.25), 1e-12);
  EXPECT_EQ(lq.constants().lipschitz_jacobian, 0.0);
  EXPECT_NEAR(lq.constants().f_star, 1.35 * 1.35, 1e-12);
  EXPECT_TRUE(lq.affine_gradients());

  const GameSpec quartic = quartic_benchmark();
  // 12 q R^2 and 24 q R with q = 0.05, R_i = 1.
  EXPECT_NEAR(quartic.constants().beta, std::sqrt(1.25) + 0.6, 1e-12);
  EXPECT_NEAR(quartic.constants().lipschitz_jacobian, 1.2, 1e-12);
  EXPECT_NEAR(quartic.constants().f_star, 1.4 * 1.4, 1e-12);
  EXPECT_FALSE(quartic.affine_gradients());
}

TEST(GameTest, CostBoundHoldsOnGrid) {
  for (const GameSpec& game : {lq_benchmark(), quartic_benchmark()}) {
    const double bound = std::sqrt(game.constants().f_star);
    double worst = 0.0;
    for (int a = -50; a <= 50; ++a) {
      for (int b = -50; b <= 50; ++b) {
        const Vector x = vec({a / 50.0, b / 50.0});
        for (int i = 0; i < 2; ++i) worst = std::max(worst, std::abs(game.cost(i, x)));
      }
    }
    EXPECT_LE(worst, bound);
  }
}

TEST(GameTest, GradientOracleMatchesFiniteDifferences) {
  const GameSpec game = quartic_benchmark();
  const Vector x = vec({0.4, -0.7});
  for (int i = 0; i < 2; ++i) {
    EXPECT_TRUE(game.partial_gradient(i, x).isApprox(game.finite_difference_partial(i, x), 1e-7));
  }
}

TEST(GameTest, RejectsNonMonotoneMatrix) {
  PolynomialGameParams p = lq_benchmark_params();
  p.matrix << 1.0, 3.0, 3.0, 1.0;
  EXPECT_THROW(make_linear_quadratic(p), Error);
}

TEST(EquilibriumTest, IdentityMapOnBallGivesOrigin) {
  PolynomialGameParams p;
  p.dims = {2};
  p.matrix = Matrix::Identity(2, 2);
  p.linear = Vector::Zero(2);
  const auto cert = solve_equilibrium(make_linear_quadratic(p), 1.0, 0.0);
  EXPECT_LE(cert.point.norm(), 1e-10);
  EXPECT_LE(cert.residual, 1e-10);
}

TEST(EquilibriumTest, InteriorStationaryPoint) {
  PolynomialGameParams p;
  p.dims = {1, 1};
  p.matrix = Matrix::Identity(2, 2);
  p.linear = -vec({0.2, 0.1});
  const auto cert = solve_equilibrium(make_linear_quadratic(p), 1.0, 0.0);
  EXPECT_NEAR(cert.point[0], 0.2, 1e-9);
  EXPECT_NEAR(cert.point[1], 0.1, 1e-9);
}

TEST(EquilibriumTest, LinearQuadraticClosedForm) {
  const PolynomialGameParams p = lq_benchmark_params();
  const Vector closed = -p.matrix.fullPivLu().solve(p.linear);
  const auto cert = solve_equilibrium(lq_benchmark(), 1.0, 0.0);
  EXPECT_LE((cert.point - closed).norm(), 1e-9);
  EXPECT_LE((closed - lq_benchmark_equilibrium()).norm(), 1e-12);
}

TEST(EquilibriumTest, BuiltinGamesSatisfyFirstOrderConditions) {
  for (const auto& name : builtin_game_names()) {
    const GameSpec game = builtin_game(name);
    const auto cert = solve_equilibrium(game, 1.0, 0.0);
    const Vector g = game.gradient_map(cert.point);
    // Per player: x_i is the projection of x_i - g_i / beta onto X_i.
    for (int i = 0; i < game.players(); ++i) {
      const Vector xi = game.layout().block(cert.point, i);
      const Vector step = xi - game.layout().block(g, i) / game.constants().beta;
      EXPECT_LE((xi - game.set().player(i).project(step)).norm(), 1e-10) << name;
    }
  }
}

TEST(EquilibriumTest, SmoothedQuarticMatchesGridOracle) {
  const GameSpec game = quartic_benchmark();
  const PolynomialGameParams p = lq_benchmark_params();
  const double delta = 0.05;
  const auto cert = solve_equilibrium(game, 1.0 - delta, delta);
  auto g = [&](const Vector& x) {
    return dfgp_test::quartic_smoothed_gradient(p.matrix, p.linear, {1, 1}, {0.05, 0.05}, x,
                                                delta);
  };
  const Vector grid = dfgp_test::grid_equilibrium_2d(g, 1.0 - delta, game.constants().beta);
  EXPECT_LE((cert.point - grid).norm(), 1e-6);
  EXPECT_LE(cert.residual, 1e-10);
}

TEST(EquilibriumTest, FailureCarriesResidual) {
  EquilibriumOptions options;
  options.max_iterations = 2;
  try {
    solve_equilibrium(lq_benchmark(), 1.0, 0.0, options);
    FAIL();
  } catch (const SolverFailure& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kSolverFailure);
    EXPECT_GT(e.last_residual(), 1e-10);
  }
}

TEST(EquilibriumTest, RejectsUncertifiedSmoothingRadius) {
  EXPECT_THROW(solve_equilibrium(quartic_benchmark(), 0.5, 0.5), Error);
}

TEST(CertifyTest, CorrectConstantsHaveNoViolations) {
  const CertificationReport report = certify_assumptions(lq_benchmark(), 2000, 11);
  EXPECT_TRUE(report.passed());
  EXPECT_EQ(report.count("strong-monotonicity"), 0);
  EXPECT_GE(report.min_monotonicity_ratio, 1.0 - 1e-9);
}

TEST(CertifyTest, OverstatedAlphaIsFalsifiedByEigenvectorPair) {
  PolynomialGameParams p = lq_benchmark_params();
  p.declared = GameConstants{2.0, std::sqrt(1.25), 0.0, 1.35 * 1.35};
  const GameSpec game = make_linear_quadratic(p);
  // sym(M) = I, so every direction is an eigenvector with eigenvalue 1.
  const Vector x = vec({0.5, 0.0});
  const Vector y = vec({-0.5, 0.0});
  const std::vector<PointPair> pairs = {{x, y}};
  const CertificationReport report = certify_assumptions(game, 2, 12, pairs);
  ASSERT_GT(report.count("strong-monotonicity"), 0);
  const Violation& v = report.violations.front();
  EXPECT_EQ(v.assumption, "strong-monotonicity");
  EXPECT_LT(v.measured, 2.0);
  EXPECT_NEAR(v.measured, 1.0, 1e-12);
}

TEST(CertifyTest, QuarticDeclaredConstantsSurviveTenThousandPairs) {
  const CertificationReport report = certify_assumptions(quartic_benchmark(), 10000, 13);
  EXPECT_TRUE(report.passed());
  EXPECT_LE(report.max_gradient_ratio, quartic_benchmark().constants().beta);
}

TEST(CertifyTest, UnderstatedCostBoundIsReported) {
  PolynomialGameParams p = lq_benchmark_params();
  p.declared = GameConstants{1.0, std::sqrt(1.25), 0.0, 0.01};
  const CertificationReport report = certify_assumptions(make_linear_quadratic(p), 200, 14);
  EXPECT_GT(report.count("cost-bound"), 0);
}

TEST(CertifyTest, RejectsTooFewSamplesAndNonFiniteCosts) {
  EXPECT_THROW(certify_assumptions(lq_benchmark(), 1, 0), Error);
  FeasibleSet set = unit_balls({1});
  GameSpec bad("bad", set, {[](const Vector&) { return NAN; }}, {},
               GameConstants{1.0, 1.0, 0.0, 1.0});
  EXPECT_THROW(certify_assumptions(bad, 2, 0), Error);
}

}  // namespace
}  // namespace dfgp
