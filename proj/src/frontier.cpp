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

#include "mvcone/frontier.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mvcone/error.hpp"

namespace mvcone {

double FrontierInputs::risk_free_terminal() const { return x0 * std::exp(rate_integral); }

FrontierInputs frontier_inputs(const EffectiveMarket& market) {
  return {market.x0(), market.total_rate(), market.total_theta_sq()};
}

std::vector<double> linear_grid(double d_min, double d_max, std::size_t points) {
  if (points == 0 || !(d_max >= d_min) || (points > 1 && !(d_max > d_min))) {
    throw Error(ErrorCode::InvalidScenario, "frontier grid needs d_min < d_max and points >= 1");
  }
  std::vector<double> grid(points, d_min);
  for (std::size_t i = 1; i < points; ++i) {
    grid[i] = d_min + (d_max - d_min) * static_cast<double>(i) / static_cast<double>(points - 1);
  }
  if (points > 1) grid.back() = d_max;
  return grid;
}

std::vector<double> default_grid(const FrontierInputs& inputs, std::size_t points) {
  const double lo = inputs.risk_free_terminal();
  if (points == 1) return {lo};
  return linear_grid(lo, 2.0 * lo, points);
}

std::vector<FrontierPoint> compute_frontier(const FrontierInputs& inputs,
                                            const std::vector<double>& d_grid, Variant variant) {
  for (std::size_t i = 1; i < d_grid.size(); ++i) {
    if (!(d_grid[i] > d_grid[i - 1])) {
      throw Error(ErrorCode::InvalidScenario, "frontier grid must be strictly increasing");
    }
  }
  std::vector<FrontierPoint> out;
  out.reserve(d_grid.size());
  const bool prohibited = variant == Variant::BankruptcyProhibited;
  for (double d : d_grid) {
    const MomentInputs in = inputs.at(d);
    const LagrangePair pair = prohibited ? solve_mu_gamma(in) : closed_form_mu_gamma(in);
    out.push_back({d, terminal_variance(pair, in, prohibited), pair.mu, pair.gamma,
                   pair.provenance});
  }
  return out;
}

ShapeReport check_shape(const std::vector<FrontierPoint>& points, double risk_free_terminal) {
  constexpr double kConvexTol = 1e-9;
  constexpr double kStrictTol = 1e-12;
  ShapeReport report;
  report.points = points.size();
  std::vector<std::size_t> bad;
  std::string why;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (points[i].variance < 0.0) {
      bad.push_back(i);
      why = "negative variance";
    }
  }
  report.min_first_difference = points.size() > 1 ? INFINITY : 0.0;
  for (std::size_t i = 1; i < points.size(); ++i) {
    const double diff = points[i].variance - points[i - 1].variance;
    report.min_first_difference = std::min(report.min_first_difference, diff);
    const bool strict = points[i - 1].d > risk_free_terminal * (1.0 + 1e-12);
    if (diff < (strict ? kStrictTol : 0.0)) {
      bad.push_back(i);
      why = strict ? "variance not strictly increasing" : "variance decreasing";
    }
  }
  report.min_second_difference = points.size() > 2 ? INFINITY : 0.0;
  for (std::size_t i = 1; i + 1 < points.size(); ++i) {
    // Divided differences so uneven grids are handled too.
    const double h0 = points[i].d - points[i - 1].d;
    const double h1 = points[i + 1].d - points[i].d;
    const double slope0 = (points[i].variance - points[i - 1].variance) / h0;
    const double slope1 = (points[i + 1].variance - points[i].variance) / h1;
    const double second = (slope1 - slope0) * 0.5 * (h0 + h1);
    report.min_second_difference = std::min(report.min_second_difference, second);
    if (second < -kConvexTol) {
      bad.push_back(i);
      why = "variance not convex";
    }
  }
  if (!bad.empty()) {
    std::sort(bad.begin(), bad.end());
    bad.erase(std::unique(bad.begin(), bad.end()), bad.end());
    std::string idx;
    for (std::size_t i : bad) idx += (idx.empty() ? "" : ",") + std::to_string(i);
    throw Error(ErrorCode::ShapeViolation, why + " at indices [" + idx + "]");
  }
  return report;
}

}  // namespace mvcone
