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
#include <memory>
#include <sstream>

#include "mvcone/error.hpp"
#include "mvcone/hjb.hpp"
#include "oracles.hpp"

using namespace mvcone;

namespace {

std::shared_ptr<const EffectiveMarket> free_market() {
  return std::make_shared<const EffectiveMarket>(MarketModel::build(oracle::example_market()),
                                                 ConeConstraint::unconstrained());
}

std::shared_ptr<const EffectiveMarket> flat_market(double x0) {
  auto cfg = oracle::example_market();
  cfg.segments[0].b = Eigen::Vector3d::Constant(0.03);
  cfg.x0 = x0;
  return std::make_shared<const EffectiveMarket>(MarketModel::build(cfg), ConeConstraint::unconstrained());
}

HjbProblem problem(std::shared_ptr<const EffectiveMarket> m, double c, std::size_t n) {
  HjbProblem p;
  p.c = c;
  p.market = std::move(m);
  p.grid = n;
  p.time_steps = n;
  return p;
}

}  // namespace

TEST_SUITE("hjb") {

TEST_CASE("terminal slice and boundary identities") {
  const HjbSolution s = solve_hjb_fd(problem(free_market(), 1.6, 128));
  const std::size_t last = s.times.size() - 1;
  for (std::size_t j = 0; j < s.nodes(); ++j) {
    const double x = s.wealth(last, j);
    CHECK(s.value(last, j) == doctest::Approx((x - 1.6) * (x - 1.6)).epsilon(1e-14).scale(1e-14));
  }
  for (std::size_t n = 0; n <= last; ++n) {
    CHECK(s.value(n, 0) == 1.6 * 1.6);
    CHECK(s.value(n, s.nodes() - 1) == 0.0);
    CHECK(s.wealth(n, s.nodes() - 1) == doctest::Approx(1.6 * std::exp(-0.03 * (1.0 - s.times[n]))).epsilon(1e-14));
  }
  CHECK(s.diagnostics.min_second_difference >= -1e-6);
}

TEST_CASE("zero market price of risk is pure transport") {
  const double x0 = 0.8;
  const HjbSolution s = solve_hjb_fd(problem(flat_market(x0), 1.6, 64));
  for (std::size_t j = 0; j < s.nodes(); ++j) {
    const double x = s.wealth(0, j);
    const double exact = (x * std::exp(0.03) - 1.6) * (x * std::exp(0.03) - 1.6);
    CHECK(std::abs(s.value(0, j) - exact) <= 1e-10);
  }
  const HjbComparison cmp = compare(problem(flat_market(x0), 1.6, 64));
  CHECK(std::abs(cmp.fd_value - cmp.analytic_value) <= 1e-10);
}

TEST_CASE("analytic value") {
  const AnalyticValue top = analytic_value(1.6, 1.6 * std::exp(-0.03), 0.03, 0.4608);
  CHECK(top.gamma == 0.0);
  CHECK(top.value == 0.0);
  const AnalyticValue low = analytic_value(1.6, 1e-9, 0.03, 0.4608);
  CHECK(low.value == doctest::Approx(1.6 * 1.6).epsilon(1e-6));

  const AnalyticValue a = analytic_value(1.6, 1.0, 0.03, 0.4608);
  const oracle::CappedValue q = oracle::capped_value(1.6, 1.0, 0.03, 0.4608);
  CHECK(a.gamma == doctest::Approx(q.gamma).epsilon(1e-9));
  CHECK(a.value == doctest::Approx(q.value).epsilon(1e-9));
  const auto mc = oracle::mc_moments(1.6, a.gamma, 0.03, 0.4608, 1000000, 101, true, 1.6);
  CHECK(std::abs(a.value - mc.sq_dev) <= 3.0 * mc.sq_dev_se);
}

TEST_CASE("finite differences converge to the analytic value") {
  const HjbComparison coarse = compare(problem(free_market(), 1.6, 128));
  const HjbComparison fine = compare(problem(free_market(), 1.6, 256));
  CHECK(fine.relative_gap < 0.01);
  CHECK(fine.absolute_gap <= 0.6 * coarse.absolute_gap);
}

TEST_CASE("invalid problems") {
  const HjbSolution s = solve_hjb_fd(problem(free_market(), 1.6, 64));
  const AnalyticValue other = analytic_value(1.7, 1.0, 0.03, 0.4608);
  try {
    compare(s, other);
    FAIL("expected a validation error");
  } catch (const Error& e) {
    CHECK(is_validation_error(e.code()));
  }
  CHECK_THROWS_AS(solve_hjb_fd(problem(free_market(), 1.0, 64)), Error);  // x0 above the cap
  CHECK_THROWS_AS(solve_hjb_fd(problem(free_market(), 1.6, 16)), Error);  // grid too coarse
}

TEST_CASE("surface output") {
  const HjbSolution s = solve_hjb_fd(problem(free_market(), 1.6, 64));
  std::ostringstream os;
  s.write_surface(os, 16);
  std::string first;
  std::istringstream in(os.str());
  std::getline(in, first);
  CHECK(first == "t,x,v");
  CHECK(s.value_at(0, 1.0) == doctest::Approx(s.value_at_x0).epsilon(1e-12));
}

}  // TEST_SUITE
