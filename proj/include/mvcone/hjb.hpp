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

#ifndef MVCONE_HJB_HPP
#define MVCONE_HJB_HPP

#include <cstddef>
#include <memory>
#include <ostream>
#include <vector>

#include "mvcone/cone_market.hpp"

namespace mvcone {

/// Quadratic-loss problem min E[(X(T) - c)^2] with X >= 0, solved on
/// 0 <= x <= c exp(-int_t^T r).
struct HjbProblem {
  double c = 0.0;
  std::shared_ptr<const EffectiveMarket> market;
  std::size_t grid = 256;        // spatial intervals
  std::size_t time_steps = 256;
  int max_policy_iterations = 5;
  double fixed_point_tol = 1e-10;
  double convexity_tol = 1e-6;   // on second differences of v / c^2

  void validate() const;
};

struct HjbDiagnostics {
  std::size_t floor_activations = 0;   // v_xx floored before dividing
  std::size_t unconverged_steps = 0;   // policy iteration hit its cap
  int max_iterations_used = 0;
  double worst_fixed_point_change = 0.0;
  double min_second_difference = 0.0;  // of v / c^2 over all slices
  std::size_t upwinded_nodes = 0;      // central drift would break monotonicity
};

struct HjbSolution {
  double c = 0.0;
  double x0 = 0.0;
  std::vector<double> times;
  std::vector<double> xi;             // normalized nodes on [0, 1]
  std::vector<double> tail_rate;      // int_t^T r at each time
  std::vector<double> normalized;     // v / c^2, row-major [time][node]
  std::vector<double> control;        // optimal scale in xi units, same layout
  double value_at_x0 = 0.0;
  HjbDiagnostics diagnostics;

  std::size_t nodes() const { return xi.size(); }
  double value(std::size_t time, std::size_t node) const {
    return c * c * normalized[time * nodes() + node];
  }
  /// Wealth coordinate of a node: x = xi * c * exp(-int_t^T r).
  double wealth(std::size_t time, std::size_t node) const;
  /// v(t_n, x) by cubic interpolation in xi.
  double value_at(std::size_t time, double x) const;
  /// CSV `t,x,v` every `stride` nodes and time steps.
  void write_surface(std::ostream& out, std::size_t stride) const;
};

/// Backward implicit finite differences with policy iteration for the
/// nonlinear term. Throws ConvexityLost or NoConvergence.
HjbSolution solve_hjb_fd(const HjbProblem& problem);

struct AnalyticValue {
  double c = 0.0;
  double x0 = 0.0;
  double gamma = 0.0;  // solves E[phi(T) (c - gamma phi(T))^+] = x0
  double value = 0.0;  // E[((c - gamma phi(T))^+ - c)^2]
};

/// Throws TargetAboveCap when x0 > c exp(-I_r).
AnalyticValue analytic_value(double c, double x0, double rate_integral, double theta_sq_integral);

struct HjbComparison {
  double fd_value = 0.0;
  double analytic_value = 0.0;
  double absolute_gap = 0.0;
  double relative_gap = 0.0;
};

/// Throws InvalidScenario when the two results were computed for different
/// targets c or initial wealth.
HjbComparison compare(const HjbSolution& fd, const AnalyticValue& exact);
HjbComparison compare(const HjbProblem& problem);

}  // namespace mvcone

#endif  // MVCONE_HJB_HPP
