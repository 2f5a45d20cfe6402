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

#ifndef DFGP_GAME_HPP_
#define DFGP_GAME_HPP_

#include <cmath>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "dfgp/core.hpp"
#include "dfgp/feasible_set.hpp"

namespace dfgp {

// f_i(x) over the joint action x.
using CostOracle = std::function<double(const Vector&)>;
// grad_{x_i} f_i(x), a vector in R^{d_i}.
using GradientOracle = std::function<Vector(const Vector&)>;

// Declared constants of the standing assumptions. f_star is the squared bound
// max_i max_{x in X} |f_i(x)|^2.
struct GameConstants {
  double alpha = 0.0;
  double beta = 0.0;
  double lipschitz_jacobian = 0.0;  // L
  double f_star = 0.0;

  bool operator==(const GameConstants&) const = default;
};

// An n-player game with per-player cost oracles over a product feasible set.
// Immutable after construction; oracles must be pure so that concurrent calls
// from replicate threads are safe.
class GameSpec {
 public:
  GameSpec(std::string name, FeasibleSet set, std::vector<CostOracle> costs,
           std::vector<GradientOracle> gradients, GameConstants constants,
           bool affine_gradients = false)
      : name_(std::move(name)),
        set_(std::move(set)),
        costs_(std::move(costs)),
        gradients_(std::move(gradients)),
        constants_(constants),
        affine_gradients_(affine_gradients) {
    const int n = set_.players();
    if (static_cast<int>(costs_.size()) != n) {
      throw Error(ErrorKind::kInvalidInput,
                  "need one cost oracle per player");
    }
    if (!gradients_.empty() && static_cast<int>(gradients_.size()) != n) {
      throw Error(ErrorKind::kInvalidInput,
                  "gradient oracles must be absent or one per player");
    }
    if (!(constants_.alpha > 0.0) || !(constants_.beta > 0.0) ||
        !(constants_.lipschitz_jacobian >= 0.0) || !(constants_.f_star >= 0.0) ||
        !std::isfinite(constants_.beta) || !std::isfinite(constants_.f_star)) {
      throw Error(ErrorKind::kInvalidInput,
                  "game constants need alpha > 0, beta > 0, L >= 0, F* >= 0");
    }
  }

  const std::string& name() const { return name_; }
  const FeasibleSet& set() const { return set_; }
  const BlockLayout& layout() const { return set_.layout(); }
  const GameConstants& constants() const { return constants_; }
  int players() const { return set_.players(); }
  int dim(int i) const { return layout().dim(i); }
  int total_dim() const { return layout().total(); }
  bool has_gradients() const { return !gradients_.empty(); }
  bool affine_gradients() const { return affine_gradients_; }

  double cost(int i, const Vector& x) const { return costs_[i](x); }

  // grad_i f_i(x), from the oracle when present, else central differences.
  Vector partial_gradient(int i, const Vector& x) const {
    if (has_gradients()) return gradients_[i](x);
    return finite_difference_partial(i, x);
  }

  Vector finite_difference_partial(int i, const Vector& x) const {
    const int offset = layout().offset(i);
    Vector out(dim(i));
    Vector probe = x;
    for (int k = 0; k < dim(i); ++k) {
      const int j = offset + k;
      const double h = 1e-6 * std::max(1.0, std::abs(x[j]));
      probe[j] = x[j] + h;
      const double up = cost(i, probe);
      probe[j] = x[j] - h;
      const double down = cost(i, probe);
      probe[j] = x[j];
      out[k] = (up - down) / (2.0 * h);
    }
    return out;
  }

  // The joint map g(x) = (grad_1 f_1(x), ..., grad_n f_n(x)).
  Vector gradient_map(const Vector& x) const {
    Vector g(total_dim());
    for (int i = 0; i < players(); ++i) {
      layout().block(g, i) = partial_gradient(i, x);
    }
    return g;
  }

 private:
  std::string name_;
  FeasibleSet set_;
  std::vector<CostOracle> costs_;
  std::vector<GradientOracle> gradients_;
  GameConstants constants_;
  bool affine_gradients_;
};

}  // namespace dfgp

#endif  // DFGP_GAME_HPP_
