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

#ifndef DFGP_FEASIBLE_SET_HPP_
#define DFGP_FEASIBLE_SET_HPP_

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dfgp/core.hpp"

namespace dfgp {

enum class SetKind { kBall, kBox, kBallBox };

inline std::string_view to_string(SetKind kind) {
  switch (kind) {
    case SetKind::kBall: return "ball";
    case SetKind::kBox: return "box";
    case SetKind::kBallBox: return "ball-box";
  }
  return "unknown";
}

// A closed convex strategy set for one player: a ball centred at the origin,
// an axis-aligned box, or their intersection. The origin is always interior.
class PlayerSet {
 public:
  static PlayerSet ball(int dim, double radius) {
    PlayerSet s(SetKind::kBall, dim);
    s.radius_ = radius;
    s.validate();
    return s;
  }

  static PlayerSet box(Vector lower, Vector upper) {
    PlayerSet s(SetKind::kBox, static_cast<int>(lower.size()));
    s.lower_ = std::move(lower);
    s.upper_ = std::move(upper);
    s.validate();
    return s;
  }

  static PlayerSet ball_box(double radius, Vector lower, Vector upper) {
    PlayerSet s(SetKind::kBallBox, static_cast<int>(lower.size()));
    s.radius_ = radius;
    s.lower_ = std::move(lower);
    s.upper_ = std::move(upper);
    s.validate();
    return s;
  }

  SetKind kind() const { return kind_; }
  int dim() const { return dim_; }
  double radius() const { return radius_; }
  const Vector& lower() const { return lower_; }
  const Vector& upper() const { return upper_; }

  bool has_ball() const { return kind_ != SetKind::kBox; }
  bool has_box() const { return kind_ != SetKind::kBall; }

  // Largest rho with rho*B contained in the set.
  double inner_radius() const {
    double r = has_ball() ? radius_ : INFINITY;
    if (has_box()) {
      r = std::min(r, (-lower_.array()).min(upper_.array()).minCoeff());
    }
    return r;
  }

  // Smallest rho with the set contained in rho*B.
  double outer_radius() const {
    double r = has_ball() ? radius_ : INFINITY;
    if (has_box()) {
      const double corner =
          (-lower_.array()).max(upper_.array()).matrix().norm();
      r = std::min(r, corner);
    }
    return r;
  }

  // Euclidean projection onto the unscaled set.
  template <class Derived>
  void project_inplace(Eigen::MatrixBase<Derived>&& z) const {
    project_inplace(z);
  }

  template <class Derived>
  void project_inplace(Eigen::MatrixBase<Derived>& z) const {
    switch (kind_) {
      case SetKind::kBall: {
        const double norm = z.norm();
        if (norm > radius_) z *= radius_ / norm;
        return;
      }
      case SetKind::kBox:
        z = z.cwiseMax(lower_).cwiseMin(upper_);
        return;
      case SetKind::kBallBox:
        project_ball_box(z);
        return;
    }
  }

  Vector project(const Vector& z) const {
    Vector out = z;
    project_inplace(out);
    return out;
  }

  template <class Derived>
  bool contains(const Eigen::MatrixBase<Derived>& z, double scale = 1.0,
                double tol = 1e-12) const {
    if (has_ball() && z.norm() > scale * radius_ * (1.0 + tol) + tol) {
      return false;
    }
    if (has_box()) {
      for (int k = 0; k < dim_; ++k) {
        if (z[k] < scale * lower_[k] - tol || z[k] > scale * upper_[k] + tol) {
          return false;
        }
      }
    }
    return true;
  }

  bool operator==(const PlayerSet& other) const {
    return kind_ == other.kind_ && dim_ == other.dim_ &&
           radius_ == other.radius_ && lower_ == other.lower_ &&
           upper_ == other.upper_;
  }

 private:
  PlayerSet(SetKind kind, int dim) : kind_(kind), dim_(dim) {}

  void validate() const {
    if (dim_ < 1) throw Error(ErrorKind::kInvalidInput, "set dimension must be >= 1");
    if (has_ball() && !(radius_ > 0.0 && std::isfinite(radius_))) {
      throw Error(ErrorKind::kInvalidInput, "ball radius must be positive and finite");
    }
    if (has_box()) {
      if (lower_.size() != upper_.size()) {
        throw Error(ErrorKind::kInvalidInput, "box bounds differ in length");
      }
      if (!lower_.allFinite() || !upper_.allFinite() ||
          (lower_.array() >= 0.0).any() || (upper_.array() <= 0.0).any()) {
        throw Error(ErrorKind::kInvalidInput,
                    "box must be finite and contain the origin in its interior");
      }
    }
  }

  // min ||x - z||^2 over box with ||x|| <= radius. For a multiplier mu >= 0 the
  // separable minimiser is clamp(z / (1 + mu)); ||x(mu)|| decreases in mu, so
  // bisection on mu finds the active ball constraint.
  template <class Derived>
  void project_ball_box(Eigen::MatrixBase<Derived>& z) const {
    const Vector original = z;
    Vector x = original.cwiseMax(lower_).cwiseMin(upper_);
    if (x.norm() <= radius_) {
      z = x;
      return;
    }
    double lo = 0.0;
    double hi = std::max(original.norm() / radius_ - 1.0, 0.0);
    for (int iter = 0; iter < 200 && hi - lo > 1e-16 * (1.0 + hi); ++iter) {
      const double mid = 0.5 * (lo + hi);
      x = (original / (1.0 + mid)).cwiseMax(lower_).cwiseMin(upper_);
      if (x.norm() > radius_) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    x = (original / (1.0 + hi)).cwiseMax(lower_).cwiseMin(upper_);
    const double norm = x.norm();
    if (norm > radius_) x *= radius_ / norm;
    z = x;
  }

  SetKind kind_;
  int dim_;
  double radius_ = 0.0;
  Vector lower_;
  Vector upper_;
};

// Product set X = X_1 x ... x X_n with rB inside X inside RB.
class FeasibleSet {
 public:
  FeasibleSet() = default;

  explicit FeasibleSet(std::vector<PlayerSet> sets,
                       std::optional<double> inner_radius = std::nullopt,
                       std::optional<double> outer_radius = std::nullopt)
      : sets_(std::move(sets)) {
    std::vector<int> dims;
    dims.reserve(sets_.size());
    for (const auto& s : sets_) dims.push_back(s.dim());
    layout_ = BlockLayout(std::move(dims));
    const double r = tight_inner_radius();
    const double big_r = tight_outer_radius();
    inner_radius_ = inner_radius.value_or(r);
    outer_radius_ = outer_radius.value_or(big_r);
    if (!(inner_radius_ > 0.0) || inner_radius_ > r * (1.0 + 1e-12)) {
      throw Error(ErrorKind::kInvalidInput,
                  "declared inner radius r must satisfy 0 < r <= " +
                      std::to_string(r));
    }
    if (outer_radius_ < big_r * (1.0 - 1e-12)) {
      throw Error(ErrorKind::kInvalidInput,
                  "declared outer radius R must be >= " + std::to_string(big_r));
    }
  }

  const std::vector<PlayerSet>& player_sets() const { return sets_; }
  const PlayerSet& player(int i) const { return sets_[i]; }
  const BlockLayout& layout() const { return layout_; }
  int players() const { return layout_.players(); }
  int dim() const { return layout_.total(); }
  double inner_radius() const { return inner_radius_; }
  double outer_radius() const { return outer_radius_; }

  // rB lies in X iff every per-player set holds the radius-r ball of its own
  // coordinates (a point of rB may concentrate on a single block).
  double tight_inner_radius() const {
    double r = INFINITY;
    for (const auto& s : sets_) r = std::min(r, s.inner_radius());
    return r;
  }

  double tight_outer_radius() const {
    double sq = 0.0;
    for (const auto& s : sets_) sq += s.outer_radius() * s.outer_radius();
    return std::sqrt(sq);
  }

  // proj onto shrink*X via proj_{gX}(z) = g * proj_X(z / g), per player.
  void project_inplace(Vector& z, double shrink = 1.0) const {
    check_shrink(shrink);
    if (!z.allFinite()) {
      throw Error(ErrorKind::kInvalidInput, "projection input is not finite");
    }
    if (z.size() != layout_.total()) {
      throw Error(ErrorKind::kInvalidInput, "projection input has wrong size");
    }
    for (int i = 0; i < players(); ++i) {
      auto block = layout_.block(z, i);
      if (shrink == 1.0) {
        sets_[i].project_inplace(block);
      } else {
        block /= shrink;
        sets_[i].project_inplace(block);
        block *= shrink;
      }
    }
  }

  Vector project(const Vector& z, double shrink = 1.0) const {
    Vector out = z;
    project_inplace(out, shrink);
    return out;
  }

  bool contains(const Vector& z, double shrink = 1.0, double tol = 1e-12) const {
    if (z.size() != layout_.total() || !z.allFinite()) return false;
    for (int i = 0; i < players(); ++i) {
      if (!sets_[i].contains(layout_.block(z, i), shrink, tol)) return false;
    }
    return true;
  }

  bool operator==(const FeasibleSet& other) const {
    return sets_ == other.sets_ && inner_radius_ == other.inner_radius_ &&
           outer_radius_ == other.outer_radius_;
  }

 private:
  static void check_shrink(double shrink) {
    if (!(shrink > 0.0 && shrink <= 1.0)) {
      throw Error(ErrorKind::kInvalidInput, "shrink factor must lie in (0, 1]");
    }
  }

  std::vector<PlayerSet> sets_;
  BlockLayout layout_;
  double inner_radius_ = 0.0;
  double outer_radius_ = 0.0;
};

// Unit balls for every player, the sets used by the built-in benchmarks.
inline FeasibleSet unit_balls(const std::vector<int>& dims) {
  std::vector<PlayerSet> sets;
  sets.reserve(dims.size());
  for (int d : dims) sets.push_back(PlayerSet::ball(d, 1.0));
  return FeasibleSet(std::move(sets));
}

}  // namespace dfgp

#endif  // DFGP_FEASIBLE_SET_HPP_
