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

#include <doctest.h>

#include <cmath>

#include "mvcone/error.hpp"
#include "mvcone/lagrange.hpp"
#include "oracles.hpp"

using namespace mvcone;

namespace {

constexpr double kFreeTheta = 0.4608;       // unconstrained market, T = 1
constexpr double kNoShortTheta = 0.4368;    // no-shorting market, T = 1

MomentInputs inputs(double itheta, double d = 1.2) { return {d, 1.0, 0.03, itheta}; }

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error thrown");
  return ErrorCode::DomainError;
}

}  // namespace

TEST_SUITE("lagrange") {

TEST_CASE("system_lhs at the rounded published pair") {
  const SystemLhs lhs = system_lhs(1.5046, 0.3154, inputs(0.460785));
  CHECK(std::abs(lhs.mean - 1.2) <= 2e-3);
  CHECK(std::abs(lhs.budget - std::exp(0.03)) <= 2e-3);
}

TEST_CASE("system_lhs tends to mu as gamma vanishes") {
  const SystemLhs lhs = system_lhs(1.3, 1e-300, inputs(kFreeTheta));
  CHECK(lhs.mean == doctest::Approx(1.3).epsilon(1e-15));
  CHECK(lhs.budget == doctest::Approx(1.3).epsilon(1e-15));
  CHECK(code_of([] { system_lhs(1.0, 0.0, inputs(kFreeTheta)); }) == ErrorCode::DomainError);
  CHECK(code_of([] { system_lhs(-1.0, 0.3, inputs(kFreeTheta)); }) == ErrorCode::DomainError);
}

TEST_CASE("system_lhs agrees with quadrature and Monte Carlo oracles") {
  for (double itheta : {kFreeTheta, kNoShortTheta, 0.05, 2.0}) {
    CAPTURE(itheta);
    const double mu = 1.5, gamma = 0.32;
    const SystemLhs lhs = system_lhs(mu, gamma, inputs(itheta));
    const oracle::Moments q = oracle::quadrature_moments(mu, gamma, 0.03, itheta);
    CHECK(std::abs(lhs.mean / q.mean - 1.0) <= 1e-10);
    CHECK(std::abs(lhs.budget / q.budget - 1.0) <= 1e-10);

    const oracle::McMoments mc = oracle::mc_moments(mu, gamma, 0.03, itheta, 1000000, 99);
    CHECK(std::abs(lhs.mean - mc.mean) <= 3.0 * mc.mean_se);
    CHECK(std::abs(lhs.budget - mc.budget) <= 3.0 * mc.budget_se);
  }
}

TEST_CASE("published pairs are reproduced") {
  const LagrangePair free = solve_mu_gamma(inputs(0.460785));
  CHECK(std::abs(free.mu - 1.5046) <= 1e-3);
  CHECK(std::abs(free.gamma - 0.3154) <= 1e-3);
  CHECK(free.provenance == Provenance::SystemSolve);

  const LagrangePair ns = solve_mu_gamma(inputs(0.436782));
  CHECK(std::abs(ns.mu - 1.5253) <= 1e-3);
  CHECK(std::abs(ns.gamma - 0.3368) <= 1e-3);

  const LagrangePair cf = closed_form_mu_gamma(inputs(0.436782));
  CHECK(std::abs(cf.mu - 1.5095) <= 1e-3);
  CHECK(std::abs(cf.gamma - 0.3190) <= 1e-3);
  CHECK(cf.provenance == Provenance::ClosedForm);
}

TEST_CASE("unit horizon is the one matching the published closed form") {
  const double t = oracle::horizon_matching_mu(1.5095, 1.2, 1.0, 0.03, kNoShortTheta, 0.25, 4.0, 0.01);
  CHECK(t == doctest::Approx(1.0).epsilon(1e-9));
  // The match is sharp: neighbouring horizons miss by more than the printed digit.
  CHECK(std::abs(oracle::closed_form_mu(1.2, 1.0, 0.03, kNoShortTheta, 0.99) - 1.5095) > 5e-4);
  CHECK(std::abs(oracle::closed_form_mu(1.2, 1.0, 0.03, kNoShortTheta, 1.01) - 1.5095) > 5e-4);
}

TEST_CASE("solved pairs satisfy the system to 1e-10") {
  for (double itheta : {0.01, 0.1, kNoShortTheta, kFreeTheta, 1.0, 3.0}) {
    for (double d : {1.031, 1.1, 1.2, 1.5, 2.5}) {
      CAPTURE(itheta);
      CAPTURE(d);
      const MomentInputs in = inputs(itheta, d);
      const LagrangePair p = solve_mu_gamma(in);
      const SystemLhs lhs = system_lhs(p.mu, p.gamma, in);
      CHECK(std::abs(lhs.mean / d - 1.0) <= 1e-10);
      CHECK(std::abs(lhs.budget / in.risk_free_terminal() - 1.0) <= 1e-10);
    }
  }
}

TEST_CASE("bracketing fallback reaches the same root") {
  SolveOptions opt;
  opt.force_fallback = true;
  const MomentInputs in = inputs(kFreeTheta);
  const LagrangePair fb = solve_mu_gamma(in, opt);
  const LagrangePair nw = solve_mu_gamma(in);
  CHECK(fb.used_fallback);
  CHECK(fb.mu == doctest::Approx(nw.mu).epsilon(1e-10));
  CHECK(fb.gamma == doctest::Approx(nw.gamma).epsilon(1e-10));
}

TEST_CASE("risk-free target and invalid targets") {
  MomentInputs in = inputs(kFreeTheta, std::exp(0.03));
  const LagrangePair p = solve_mu_gamma(in);
  CHECK(p.mu == in.d);
  CHECK(p.gamma == 0.0);
  CHECK(p.provenance == Provenance::DegenerateZeroRisk);
  const LagrangePair cf = closed_form_mu_gamma(in);
  CHECK(cf.mu == doctest::Approx(std::exp(0.03)).epsilon(1e-15));
  CHECK(cf.gamma == 0.0);

  CHECK(code_of([] { solve_mu_gamma(inputs(kFreeTheta, 1.0)); }) == ErrorCode::TargetBelowRiskFree);
  CHECK(code_of([] { closed_form_mu_gamma(inputs(kFreeTheta, 1.0)); }) == ErrorCode::TargetBelowRiskFree);
  CHECK(code_of([] { solve_mu_gamma(inputs(0.0, 1.2)); }) == ErrorCode::DegenerateMarket);
}

TEST_CASE("closed form plugs back into the linear moment identities") {
  for (double itheta : {0.05, kNoShortTheta, 1.7}) {
    for (double d : {1.05, 1.2, 3.0}) {
      const MomentInputs in = inputs(itheta, d);
      const LagrangePair p = closed_form_mu_gamma(in);
      const double e1 = std::exp(-0.03);
      const double e2 = std::exp(-0.06 + itheta);
      CHECK(p.mu - p.gamma * e1 == doctest::Approx(d).epsilon(1e-13));
      CHECK(p.mu * e1 - p.gamma * e2 == doctest::Approx(1.0).epsilon(1e-13));
    }
  }
}

TEST_CASE("terminal variance") {
  const MomentInputs in = inputs(kNoShortTheta);
  LagrangePair zero;
  zero.mu = 1.2;
  CHECK(terminal_variance(zero, in, true) == 0.0);
  CHECK(terminal_variance(zero, in, false) == 0.0);

  const LagrangePair cf = closed_form_mu_gamma(in);
  const double allowed = terminal_variance(cf, in, false);
  CHECK(allowed == doctest::Approx(cf.gamma * cf.gamma * std::exp(-0.06) * std::expm1(kNoShortTheta)).epsilon(1e-14));
  const oracle::McMoments lin = oracle::mc_moments(cf.mu, cf.gamma, 0.03, kNoShortTheta, 1000000, 7, false, 1.2);
  CHECK(std::abs(allowed - lin.sq_dev) <= 3.0 * lin.sq_dev_se);

  const LagrangePair sp = solve_mu_gamma(in);
  const double prohibited = terminal_variance(sp, in, true);
  const oracle::Moments q = oracle::quadrature_moments(sp.mu, sp.gamma, 0.03, kNoShortTheta);
  CHECK(std::abs(prohibited / (q.second - 1.2 * 1.2) - 1.0) <= 1e-8);
  const oracle::McMoments mc = oracle::mc_moments(sp.mu, sp.gamma, 0.03, kNoShortTheta, 1000000, 8, true, 1.2);
  CHECK(std::abs(prohibited - mc.sq_dev) <= 3.0 * mc.sq_dev_se);
}

TEST_CASE("payoff moments cover the degenerate branches") {
  const PayoffMoments g0 = payoff_moments(1.3, 0.0, 0.03, 0.4);
  CHECK(g0.mean == 1.3);
  CHECK(g0.second == 1.3 * 1.3);
  const PayoffMoments flat = payoff_moments(1.3, 0.2, 0.03, 0.0);
  CHECK(flat.mean == doctest::Approx(1.3 - 0.2 * std::exp(-0.03)).epsilon(1e-15));
}

}  // TEST_SUITE
