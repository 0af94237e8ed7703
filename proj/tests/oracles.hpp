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

// Independent reference computations used by the unit and acceptance tests.
// Nothing here calls into the library's numerical code.
#ifndef MVCONE_TESTS_ORACLES_HPP
#define MVCONE_TESTS_ORACLES_HPP

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "mvcone/market_model.hpp"

namespace oracle {

/// Constant-coefficient three-asset market: r = 0.03, b = (0.12, 0.15, 0.18)',
/// lower-triangular sigma, x0 = 1, horizon T.
mvcone::MarketConfig example_market(double horizon = 1.0);
/// The volatility matrix as printed to four decimals.
Eigen::Matrix3d printed_sigma();

/// min 1/2 z'Gz - B'z over {C'z >= 0} by solving the equality-constrained
/// problem on every subset of active rows and keeping the best feasible one.
Eigen::VectorXd enumerate_cone_qp(const Eigen::MatrixXd& gram, const Eigen::VectorXd& excess,
                                  const Eigen::MatrixXd& c);

/// Standard normal CDF from the Taylor series in long double.
long double series_normal_cdf(long double x);

struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
/// n-point Gauss-Legendre rule on [a, b] (Newton iteration on P_n).
GaussRule gauss_legendre(int n, double a, double b);

/// E[P], e^{I_r} E[phi P] and E[P^2] for P = (mu - gamma phi)^+ with
/// log phi ~ N(-(I_r + I_theta/2), I_theta), by quadrature over the support.
struct Moments {
  double mean = 0.0;
  double budget = 0.0;
  double second = 0.0;
};
Moments quadrature_moments(double mu, double gamma, double ir, double itheta, int nodes = 200);

struct McMoments {
  double mean = 0.0, mean_se = 0.0;
  double budget = 0.0, budget_se = 0.0;
  double second = 0.0, second_se = 0.0;
  double sq_dev = 0.0, sq_dev_se = 0.0;  // E[(P - c)^2] for the `center` argument
};
/// Plain Monte Carlo with std::mt19937_64 and std::normal_distribution.
/// `floored` selects (mu - gamma phi)^+ versus the linear payoff.
McMoments mc_moments(double mu, double gamma, double ir, double itheta, std::size_t n,
                     std::uint64_t seed, bool floored = true, double center = 0.0);

/// Closed-form mu of the unrestricted problem for a constant-coefficient market
/// as a function of the horizon.
double closed_form_mu(double d, double x0, double r, double theta_sq, double horizon);
/// Horizon on [lo, hi] (step `step`) whose closed-form mu is nearest `target`.
double horizon_matching_mu(double target, double d, double x0, double r, double theta_sq,
                           double lo, double hi, double step);

/// gamma_c with E[phi (c - gamma phi)^+] = x0 and the value
/// E[((c - gamma phi)^+ - c)^2], by quadrature and bisection.
struct CappedValue {
  double gamma = 0.0;
  double value = 0.0;
};
CappedValue capped_value(double c, double x0, double ir, double itheta);

/// Philox4x32-10 known-answer vectors from the Random123 distribution.
struct PhiloxVector {
  std::uint32_t ctr[4];
  std::uint32_t key[2];
  std::uint32_t out[4];
};
const std::vector<PhiloxVector>& philox_known_answers();

}  // namespace oracle

#endif  // MVCONE_TESTS_ORACLES_HPP
