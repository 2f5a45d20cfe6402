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

#ifndef DFGP_SAMPLING_HPP_
#define DFGP_SAMPLING_HPP_

#include <cmath>
#include <cstdint>
#include <random>

#include "dfgp/core.hpp"

namespace dfgp {

// The random stream used throughout. Each replicate owns one.
using Rng = std::mt19937_64;

// Uniform point on the unit sphere S^{dim-1}, written into `out`.
// dim == 1 is a fair sign, which is the law of a normalised 1-D Gaussian.
template <class Derived, class Urbg>
void sample_sphere_into(Eigen::MatrixBase<Derived>& out, Urbg& rng) {
  const auto dim = out.size();
  if (dim == 1) {
    out[0] = (rng() >> 63) ? 1.0 : -1.0;
    return;
  }
  std::normal_distribution<double> normal;
  for (;;) {
    for (Eigen::Index k = 0; k < dim; ++k) out[k] = normal(rng);
    const double norm = out.norm();
    if (norm >= 1e-12) {
      out /= norm;
      return;
    }
  }
}

template <class Derived, class Urbg>
void sample_sphere_into(Eigen::MatrixBase<Derived>&& out, Urbg& rng) {
  sample_sphere_into(out, rng);
}

template <class Urbg>
Vector sample_sphere(int dim, Urbg& rng) {
  if (dim < 1) throw Error(ErrorKind::kInvalidInput, "sphere dimension must be >= 1");
  Vector v(dim);
  sample_sphere_into(v, rng);
  return v;
}

// Uniform point in the unit ball: a sphere point scaled by U^{1/dim}.
template <class Derived, class Urbg>
void sample_ball_into(Eigen::MatrixBase<Derived>& out, Urbg& rng) {
  sample_sphere_into(out, rng);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  const double u = uniform(rng);
  out *= std::pow(u, 1.0 / static_cast<double>(out.size()));
}

template <class Derived, class Urbg>
void sample_ball_into(Eigen::MatrixBase<Derived>&& out, Urbg& rng) {
  sample_ball_into(out, rng);
}

template <class Urbg>
Vector sample_ball(int dim, Urbg& rng) {
  if (dim < 1) throw Error(ErrorKind::kInvalidInput, "ball dimension must be >= 1");
  Vector w(dim);
  sample_ball_into(w, rng);
  return w;
}

// v = (v_1, ..., v_n) with each v_i uniform on its own unit sphere.
struct DirectionSample {
  Vector v;
};

template <class Urbg>
void sample_direction_into(const BlockLayout& layout, Urbg& rng, Vector& v) {
  v.resize(layout.total());
  for (int i = 0; i < layout.players(); ++i) {
    sample_sphere_into(layout.block(v, i), rng);
  }
}

template <class Urbg>
DirectionSample sample_direction(const BlockLayout& layout, Urbg& rng) {
  DirectionSample s;
  sample_direction_into(layout, rng, s.v);
  return s;
}

// w with w_i uniform in the ball B_i and w_j uniform on the sphere S_j, j != i:
// the smoothing law U_i for the focal player i.
struct MixedSmoothingSample {
  Vector w;
  int focal_player = 0;
};

template <class Urbg>
void sample_mixed_into(const BlockLayout& layout, int focal, Urbg& rng, Vector& w) {
  w.resize(layout.total());
  for (int j = 0; j < layout.players(); ++j) {
    if (j == focal) {
      sample_ball_into(layout.block(w, j), rng);
    } else {
      sample_sphere_into(layout.block(w, j), rng);
    }
  }
}

template <class Urbg>
MixedSmoothingSample sample_mixed(const BlockLayout& layout, int focal, Urbg& rng) {
  if (focal < 0 || focal >= layout.players()) {
    throw Error(ErrorKind::kInvalidInput, "focal player out of range");
  }
  MixedSmoothingSample s;
  s.focal_player = focal;
  sample_mixed_into(layout, focal, rng, s.w);
  return s;
}

}  // namespace dfgp

#endif  // DFGP_SAMPLING_HPP_
