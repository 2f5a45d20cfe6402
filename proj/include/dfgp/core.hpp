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

#ifndef DFGP_CORE_HPP_
#define DFGP_CORE_HPP_

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace dfgp {

inline constexpr std::string_view kVersion = "0.1.0";

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

enum class ErrorKind {
  kInvalidInput,
  kInfeasible,
  kSolverFailure,
  kUnsupportedMode,
  kAccuracyOutOfRange,
  kInvalidSchedule,
  kInsufficientHorizon,
  kConfiguration,
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidInput: return "invalid-input";
    case ErrorKind::kInfeasible: return "infeasible";
    case ErrorKind::kSolverFailure: return "solver-failure";
    case ErrorKind::kUnsupportedMode: return "unsupported-mode";
    case ErrorKind::kAccuracyOutOfRange: return "accuracy-out-of-range";
    case ErrorKind::kInvalidSchedule: return "invalid-schedule";
    case ErrorKind::kInsufficientHorizon: return "insufficient-horizon";
    case ErrorKind::kConfiguration: return "configuration";
  }
  return "unknown";
}

// Every failure raised by the library carries a machine-readable kind.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

class SolverFailure : public Error {
 public:
  SolverFailure(const std::string& message, double last_residual)
      : Error(ErrorKind::kSolverFailure, message),
        last_residual_(last_residual) {}

  double last_residual() const { return last_residual_; }

 private:
  double last_residual_;
};

class AccuracyOutOfRange : public Error {
 public:
  AccuracyOutOfRange(const std::string& message, double max_epsilon)
      : Error(ErrorKind::kAccuracyOutOfRange, message),
        max_epsilon_(max_epsilon) {}

  double max_epsilon() const { return max_epsilon_; }

 private:
  double max_epsilon_;
};

inline bool all_finite(const Vector& v) { return v.allFinite(); }

// Per-player block structure of a joint action vector x = (x_1, ..., x_n).
class BlockLayout {
 public:
  BlockLayout() = default;

  explicit BlockLayout(std::vector<int> dims) : dims_(std::move(dims)) {
    if (dims_.empty()) {
      throw Error(ErrorKind::kInvalidInput, "a game needs at least one player");
    }
    offsets_.reserve(dims_.size());
    int offset = 0;
    for (int d : dims_) {
      if (d < 1) {
        throw Error(ErrorKind::kInvalidInput,
                    "player dimensions must be >= 1");
      }
      offsets_.push_back(offset);
      offset += d;
    }
    total_ = offset;
  }

  int players() const { return static_cast<int>(dims_.size()); }
  int dim(int i) const { return dims_[i]; }
  int offset(int i) const { return offsets_[i]; }
  int total() const { return total_; }
  const std::vector<int>& dims() const { return dims_; }

  auto block(Vector& v, int i) const { return v.segment(offsets_[i], dims_[i]); }
  auto block(const Vector& v, int i) const {
    return v.segment(offsets_[i], dims_[i]);
  }

  bool all_scalar() const {
    for (int d : dims_) {
      if (d != 1) return false;
    }
    return true;
  }

  bool operator==(const BlockLayout&) const = default;

 private:
  std::vector<int> dims_;
  std::vector<int> offsets_;
  int total_ = 0;
};

// Welford accumulator for a scalar stream.
class RunningStats {
 public:
  void add(double value) {
    ++count_;
    const double delta = value - mean_;
    mean_ += delta / static_cast<double>(count_);
    m2_ += delta * (value - mean_);
  }

  long count() const { return count_; }
  double mean() const { return mean_; }
  // Unbiased sample variance; zero for fewer than two samples.
  double variance() const {
    return count_ > 1 ? m2_ / static_cast<double>(count_ - 1) : 0.0;
  }
  // Standard error of the mean; NaN when undefined (count < 2).
  double standard_error() const {
    if (count_ < 2) return std::nan("");
    return std::sqrt(variance() / static_cast<double>(count_));
  }

 private:
  long count_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

// Welford accumulator for vector samples of fixed size.
class RunningVectorStats {
 public:
  explicit RunningVectorStats(int size)
      : mean_(Vector::Zero(size)), m2_(Vector::Zero(size)) {}

  void add(const Vector& value) {
    ++count_;
    const Vector delta = value - mean_;
    mean_ += delta / static_cast<double>(count_);
    m2_.array() += delta.array() * (value - mean_).array();
  }

  long count() const { return count_; }
  const Vector& mean() const { return mean_; }
  Vector variance() const {
    if (count_ < 2) return Vector::Zero(mean_.size());
    return m2_ / static_cast<double>(count_ - 1);
  }
  // sqrt(trace(Cov) / N): the natural scale of ||mean - truth||.
  double standard_error_norm() const {
    if (count_ < 2) return std::nan("");
    return std::sqrt(variance().sum() / static_cast<double>(count_));
  }

 private:
  long count_ = 0;
  Vector mean_;
  Vector m2_;
};

}  // namespace dfgp

#endif  // DFGP_CORE_HPP_
