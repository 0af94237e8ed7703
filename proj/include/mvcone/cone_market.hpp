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

#ifndef MVCONE_CONE_MARKET_HPP
#define MVCONE_CONE_MARKET_HPP

#include <cstddef>
#include <vector>

#include <Eigen/Core>

#include "mvcone/market_model.hpp"

namespace mvcone {

/// Admissible holdings {z : C(t)' z >= 0}. C is m x k per segment; k = 0
/// means no restriction.
class ConeConstraint {
 public:
  enum class Kind { Unconstrained, NoShorting, General };

  static ConeConstraint unconstrained();
  static ConeConstraint no_shorting();
  /// One matrix shared by every segment.
  static ConeConstraint general(Eigen::MatrixXd c);
  /// One matrix per market segment.
  static ConeConstraint general(std::vector<Eigen::MatrixXd> per_segment);

  Kind kind() const { return kind_; }
  /// The m x k matrix in force on the given segment.
  Eigen::MatrixXd matrix(std::size_t segment, int m) const;
  const std::vector<Eigen::MatrixXd>& general_matrices() const { return matrices_; }

  friend bool operator==(const ConeConstraint& a, const ConeConstraint& b);

 private:
  Kind kind_ = Kind::Unconstrained;
  std::vector<Eigen::MatrixXd> matrices_;
};

struct ProjectionOptions {
  double feasibility_tol = 1e-10;
  double kkt_tol = 1e-8;
};

struct ProjectionResult {
  Eigen::VectorXd z;
  /// Multipliers for C'z >= 0: gram*z - B = C*nu, nu >= 0, nu'(C'z) = 0.
  Eigen::VectorXd nu;
  std::vector<int> active;
  int iterations = 0;
};

/// Minimizes 0.5 z'Gz - B'z over {z : C'z >= 0} with a primal active-set
/// method. G must be SPD. Throws QPNotConverged if the iteration guard trips.
ProjectionResult project_cone(const Eigen::MatrixXd& gram, const Eigen::VectorXd& excess,
                              const Eigen::MatrixXd& c, const ProjectionOptions& options = {});

/// Dual adjustment for the no-shorting cone computed from its own problem:
/// argmin over y >= 0 of |sigma^{-1}(y + B)|.
Eigen::VectorXd no_shorting_dual_adjustment(const Eigen::MatrixXd& sigma_inv,
                                            const Eigen::VectorXd& excess);

struct ScalingReport {
  double alpha = 0.0;
  Eigen::VectorXd solution;
  Eigen::VectorXd expected_solution;
  double value = 0.0;
  double expected_value = 0.0;
  double solution_residual = 0.0;
  double value_residual = 0.0;
  bool pass = false;
};

/// Checks that scaling the linear term by alpha scales the cone minimizer by
/// alpha and the optimal value by alpha^2.
ScalingReport scaling_check(const Eigen::MatrixXd& gram, const Eigen::VectorXd& excess,
                            const Eigen::MatrixXd& c, double alpha, double tol = 1e-8);

struct EffectiveSegment {
  Eigen::VectorXd z_bar;
  Eigen::VectorXd nu;
  Eigen::VectorXd lambda;     // B_hat - B
  Eigen::VectorXd b_hat;      // gram * z_bar
  Eigen::VectorXd theta_hat;  // sigma' * z_bar
  double theta_sq = 0.0;      // |theta_hat|^2
};

/// The unconstrained market with drift B_hat that shares the constrained
/// problem's optimal policy.
class EffectiveMarket {
 public:
  EffectiveMarket(MarketModel market, ConeConstraint cone,
                  const ProjectionOptions& options = {});

  const MarketModel& market() const { return market_; }
  const ConeConstraint& cone() const { return cone_; }
  const EffectiveSegment& segment(std::size_t i) const { return segments_.at(i); }
  const std::vector<EffectiveSegment>& segments() const { return segments_; }
  const EffectiveSegment& at(double t) const { return segments_[market_.segment_index(t)]; }
  /// Constraint matrix C(t) on segment i (m x k).
  const Eigen::MatrixXd& constraint(std::size_t i) const { return constraints_.at(i); }

  double horizon() const { return market_.horizon(); }
  double x0() const { return market_.initial_wealth(); }

  /// int_t^T r(s) ds
  double tail_rate(double t) const;
  /// int_t^T |theta_hat(s)|^2 ds
  double tail_theta_sq(double t) const;
  double rate_integral(double t_a, double t_b) const { return tail_rate(t_a) - tail_rate(t_b); }
  double theta_sq_integral(double t_a, double t_b) const {
    return tail_theta_sq(t_a) - tail_theta_sq(t_b);
  }
  double total_rate() const { return tail_r_.front(); }
  double total_theta_sq() const { return tail_theta_.front(); }
  /// I_theta(T) == 0: no risky position improves the mean-variance trade-off.
  bool degenerate() const { return total_theta_sq() == 0.0; }

  /// Cumulative integrals from 0 at the segment boundaries t_0..t_L.
  std::vector<double> cumulative_rate() const;
  std::vector<double> cumulative_theta_sq() const;

 private:
  MarketModel market_;
  ConeConstraint cone_;
  std::vector<EffectiveSegment> segments_;
  std::vector<Eigen::MatrixXd> constraints_;
  std::vector<double> tail_r_;      // at boundaries t_0..t_L
  std::vector<double> tail_theta_;  // at boundaries t_0..t_L
};

/// Same market with b replaced by r + B_hat and no portfolio constraint.
MarketModel reduced_market(const EffectiveMarket& effective);

}  // namespace mvcone

#endif  // MVCONE_CONE_MARKET_HPP
