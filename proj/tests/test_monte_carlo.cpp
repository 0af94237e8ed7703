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
#include <cstring>
#include <memory>

#include "mvcone/error.hpp"
#include "mvcone/monte_carlo.hpp"
#include "oracles.hpp"

using namespace mvcone;

namespace {

std::shared_ptr<const EffectiveMarket> market(const ConeConstraint& cone) {
  return std::make_shared<const EffectiveMarket>(MarketModel::build(oracle::example_market()), cone);
}

PolicyContext context(const ConeConstraint& cone, Variant variant, double d = 1.2) {
  auto m = market(cone);
  const MomentInputs in{d, m->x0(), m->total_rate(), m->total_theta_sq()};
  const LagrangePair pair =
      variant == Variant::BankruptcyProhibited ? solve_mu_gamma(in) : closed_form_mu_gamma(in);
  return PolicyContext(m, pair, variant);
}

SimulationPlan plan(std::size_t paths, std::size_t steps, std::uint64_t seed) {
  SimulationPlan p;
  p.n_paths = paths;
  p.n_steps = steps;
  p.seed = seed;
  return p;
}

template <class T>
bool same_bits(const std::vector<T>& a, const std::vector<T>& b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(T)) == 0;
}

}  // namespace

TEST_SUITE("monte_carlo") {

TEST_CASE("plan validation and antithetic shocks") {
  SimulationPlan p = plan(0, 16, 1);
  CHECK_THROWS_AS(p.validate(), Error);
  p = plan(10, 0, 1);
  CHECK_THROWS_AS(p.validate(), Error);
  p = plan(10, 16, 1);
  p.antithetic = true;
  CHECK(p.shock(5, 3) == -p.shock(4, 3));
  CHECK(p.shock(4, 3) != p.shock(6, 3));
  const auto grid = time_grid(1.0, 8);
  CHECK(grid.size() == 9);
  CHECK(grid.front() == 0.0);
  CHECK(grid.back() == 1.0);
}

TEST_CASE("state price density moments") {
  const auto m = market(ConeConstraint::unconstrained());
  const DensitySample s = simulate_phi(plan(100000, 16, 5), *m);
  const MomentEstimate first = estimate_moments(s.terminal);
  CHECK(std::abs(first.mean - std::exp(-0.03)) <= 3.0 * first.mean_se);
  std::vector<double> sq(s.terminal.size());
  for (std::size_t i = 0; i < sq.size(); ++i) sq[i] = s.terminal[i] * s.terminal[i];
  const MomentEstimate second = estimate_moments(sq);
  CHECK(std::abs(second.mean - std::exp(-0.06 + m->total_theta_sq())) <= 3.0 * second.mean_se);
  CHECK(s.stored_count == 100);
  CHECK(s.stored[0] == 1.0);
}

TEST_CASE("results do not depend on chunking or threads") {
  const PolicyContext ctx = context(ConeConstraint::no_shorting(), Variant::BankruptcyProhibited);
  SimulationPlan a = plan(5000, 32, 77);
  a.chunk_size = 4096;
  a.threads = 1;
  SimulationPlan b = a;
  b.chunk_size = 333;
  b.threads = 4;
  const WealthPathSet ra = simulate_paths(a, ctx);
  const WealthPathSet rb = simulate_paths(b, ctx);
  CHECK(same_bits(ra.terminal_wealth, rb.terminal_wealth));
  CHECK(same_bits(ra.wealth, rb.wealth));
  CHECK(same_bits(ra.portfolio, rb.portfolio));
  CHECK(ra.terminal.mean == rb.terminal.mean);
  CHECK(ra.terminal.var == rb.terminal.var);
  CHECK(ra.min_wealth == rb.min_wealth);

  const auto m = ctx.market_ptr();
  CHECK(same_bits(simulate_phi(a, *m).terminal, simulate_phi(b, *m).terminal));
}

TEST_CASE("no-shorting prohibited paths hit the target and respect both constraints") {
  const PolicyContext ctx = context(ConeConstraint::no_shorting(), Variant::BankruptcyProhibited);
  const WealthPathSet r = simulate_paths(plan(100000, 256, 2026), ctx);
  CHECK(std::abs(r.terminal.mean - 1.2) <= 3.0 * r.terminal.mean_se);
  CHECK(r.min_cone_slack >= -1e-10);
  CHECK(r.min_wealth >= 0.0);
  CHECK(r.paths_with_negative_wealth == 0);
  // E[phi(t) X(t)] stays at x0 along the grid.
  for (std::size_t i = 0; i < r.priced_wealth.size(); i += 32) {
    CHECK(r.priced_wealth[i] == doctest::Approx(1.0).epsilon(5e-3));
  }
}

TEST_CASE("unrestricted variant can go negative") {
  const PolicyContext ctx = context(ConeConstraint::no_shorting(), Variant::BankruptcyAllowed);
  const WealthPathSet r = simulate_paths(plan(20000, 64, 9), ctx);
  CHECK(r.paths_with_negative_wealth > 0);
  CHECK(r.min_wealth < 0.0);
  CHECK(r.min_cone_slack >= -1e-10);
  CHECK(std::abs(r.terminal.mean - 1.2) <= 3.0 * r.terminal.mean_se);
}

TEST_CASE("Euler wealth converges to the policy wealth") {
  const PolicyContext ctx = context(ConeConstraint::unconstrained(), Variant::BankruptcyProhibited);
  double prev = INFINITY;
  for (std::size_t steps : {64u, 128u, 256u}) {
    const SdeReport rep = sde_consistency(plan(20000, steps, 3), ctx);
    CHECK(rep.max_rms < prev);
    CHECK(rep.max_rms <= 0.9 * prev);
    prev = rep.max_rms;
    if (steps == 256) CHECK(rep.terminal_rms < 0.05 * 1.2);
  }
}

TEST_CASE("zero gamma Euler is exact") {
  const PolicyContext ctx = context(ConeConstraint::unconstrained(), Variant::BankruptcyProhibited, std::exp(0.03));
  const SdeReport rep = sde_consistency(plan(2000, 64, 3), ctx);
  CHECK(rep.max_rms <= 1e-14);
}

TEST_CASE("moment estimates") {
  const std::vector<double> x = {1.0, 2.0, 3.0, 4.0, 5.0};
  const MomentEstimate e = estimate_moments(x);
  CHECK(e.mean == 3.0);
  CHECK(e.var == doctest::Approx(2.5));
  CHECK(e.mean_se == doctest::Approx(std::sqrt(2.5 / 5.0)));
}

}  // TEST_SUITE
