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

#ifndef MVCONE_FRONTIER_HPP
#define MVCONE_FRONTIER_HPP

#include <cstddef>
#include <vector>

#include "mvcone/lagrange.hpp"
#include "mvcone/policy.hpp"

namespace mvcone {

struct FrontierPoint {
  double d = 0.0;
  double variance = 0.0;
  double mu = 0.0;
  double gamma = 0.0;
  Provenance provenance = Provenance::SystemSolve;
};

/// Market summary shared by every point of a sweep; d is ignored.
struct FrontierInputs {
  double x0 = 0.0;
  double rate_integral = 0.0;
  double theta_sq_integral = 0.0;

  double risk_free_terminal() const;
  MomentInputs at(double d) const { return {d, x0, rate_integral, theta_sq_integral}; }
};

FrontierInputs frontier_inputs(const EffectiveMarket& market);

/// `points` targets evenly spaced from x0 e^{I_r} to 2 x0 e^{I_r}.
std::vector<double> default_grid(const FrontierInputs& inputs, std::size_t points = 21);
std::vector<double> linear_grid(double d_min, double d_max, std::size_t points);

/// Minimal variance for each target. Throws TargetBelowRiskFree or
/// DegenerateMarket (I_theta = 0 with d above the risk-free point).
std::vector<FrontierPoint> compute_frontier(const FrontierInputs& inputs,
                                            const std::vector<double>& d_grid, Variant variant);

struct ShapeReport {
  std::size_t points = 0;
  double min_first_difference = 0.0;
  double min_second_difference = 0.0;
};

/// Checks the variance is nondecreasing, strictly increasing above the
/// risk-free point, and discretely convex. Throws ShapeViolation naming the
/// offending indices.
ShapeReport check_shape(const std::vector<FrontierPoint>& points, double risk_free_terminal);

}  // namespace mvcone

#endif  // MVCONE_FRONTIER_HPP
