// Copyright 2026 The mvcone Authors
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

#ifndef MVCONE_MARKET_MODEL_HPP
#define MVCONE_MARKET_MODEL_HPP

#include <cstddef>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <Eigen/LU>

namespace mvcone {

/// Raw coefficients for one time segment (t_prev, t_end].
struct SegmentConfig {
  double t_end = 0.0;
  double r = 0.0;
  Eigen::VectorXd b;
  Eigen::MatrixXd sigma;
};

struct MarketConfig {
  int m = 0;
  double horizon = 0.0;
  double x0 = 0.0;
  std::vector<SegmentConfig> segments;
  /// Smallest admissible eigenvalue of sigma * sigma'.
  double eigen_floor = 1e-10;
};

/// Validated per-segment coefficients with the derived matrices cached.
struct MarketSegment {
  double t_begin = 0.0;
  double t_end = 0.0;
  double r = 0.0;
  Eigen::VectorXd b;
  Eigen::MatrixXd sigma;
  Eigen::MatrixXd sigma_inv;
  Eigen::MatrixXd gram;  // sigma * sigma'
  Eigen::LLT<Eigen::MatrixXd> gram_llt;
  double min_eigenvalue = 0.0;

  double length() const { return t_end - t_begin; }
  /// B = b - r * 1. Recomputed on every call.
  Eigen::VectorXd excess_return() const;
};

/// Deterministic piecewise-constant market on [0, T]. Immutable once built.
class MarketModel {
 public:
  /// Validates the configuration; throws Error on NonInvertibleVolatility,
  /// BadSchedule, NonPositiveInitialWealth.
  static MarketModel build(const MarketConfig& config);

  int asset_count() const { return m_; }
  double horizon() const { return horizon_; }
  double initial_wealth() const { return x0_; }
  /// Non-degeneracy witness: min eigenvalue of sigma*sigma' over segments.
  double delta() const { return delta_; }

  const std::vector<MarketSegment>& segments() const { return segments_; }
  const MarketSegment& segment(std::size_t i) const { return segments_.at(i); }
  std::size_t segment_count() const { return segments_.size(); }
  /// Index of the segment containing t; boundary points belong to the
  /// segment that starts there (t = T maps to the last segment).
  std::size_t segment_index(double t) const;

  Eigen::VectorXd excess_return(std::size_t i) const { return segment(i).excess_return(); }
  const Eigen::MatrixXd& invert_sigma(std::size_t i) const { return segment(i).sigma_inv; }
  const Eigen::MatrixXd& gram(std::size_t i) const { return segment(i).gram; }

  /// Exact integral of r over [t_a, t_b]; throws OutOfRange outside [0, T].
  double integrate_rate(double t_a, double t_b) const;

  /// Sums rate(i) * overlap length over the segments touching [t_a, t_b].
  template <class RateFn>
  double integrate_piecewise(double t_a, double t_b, RateFn&& rate) const {
    check_interval(t_a, t_b);
    double total = 0.0;
    for (std::size_t i = 0; i < segments_.size(); ++i) {
      const auto& s = segments_[i];
      const double lo = t_a > s.t_begin ? t_a : s.t_begin;
      const double hi = t_b < s.t_end ? t_b : s.t_end;
      if (hi > lo) total += rate(i) * (hi - lo);
    }
    return total;
  }

  MarketConfig config() const;

 private:
  void check_interval(double t_a, double t_b) const;

  int m_ = 0;
  double horizon_ = 0.0;
  double x0_ = 0.0;
  double delta_ = 0.0;
  double eigen_floor_ = 1e-10;
  std::vector<MarketSegment> segments_;
};

}  // namespace mvcone

#endif  // MVCONE_MARKET_MODEL_HPP
