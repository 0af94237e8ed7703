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

#include <bit>
#include <cstring>
#include <random>
#include <vector>

#include "mvcone/simd/kernels.hpp"

using namespace mvcone::simd;

namespace {

bool same_bits(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

bool same_bits(const LaneSums& a, const LaneSums& b) {
  return std::memcmp(a.lane, b.lane, sizeof(a.lane)) == 0;
}

std::vector<double> draws(std::size_t n, std::uint64_t seed, double lo, double hi) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> v(n);
  for (auto& x : v) x = u(gen);
  return v;
}

}  // namespace

TEST_SUITE("simd") {

TEST_CASE("scalar level is always available") {
  const auto levels = available_levels();
  REQUIRE(!levels.empty());
  CHECK(levels.front() == Level::Scalar);
  CHECK(kernels(Level::Scalar).level == Level::Scalar);
}

TEST_CASE("every level reproduces the scalar kernels bit for bit") {
  const KernelTable& ref = scalar_kernels();
  for (Level level : available_levels()) {
    CAPTURE(to_string(level));
    const KernelTable& k = kernels(level);
    for (std::size_t n : {0u, 1u, 3u, 4u, 5u, 7u, 8u, 31u, 1000u, 4097u}) {
      CAPTURE(n);
      const auto z = draws(n, 1 + n, -4.0, 4.0);
      const auto scale = draws(n, 2 + n, 0.0, 3.0);
      const auto phi = draws(n, 3 + n, 0.01, 9.0);

      auto a = draws(n, 4 + n, -1.0, 1.0);
      auto b = a;
      ref.log_density_step(a.data(), z.data(), n, 0.0123, 0.6789);
      k.log_density_step(b.data(), z.data(), n, 0.0123, 0.6789);
      CHECK(same_bits(a, b));

      a = draws(n, 5 + n, 0.0, 2.0);
      b = a;
      ref.discounted_euler_step(a.data(), scale.data(), z.data(), n, 1.0001, 0.0018, 0.0424);
      k.discounted_euler_step(b.data(), scale.data(), z.data(), n, 1.0001, 0.0018, 0.0424);
      CHECK(same_bits(a, b));

      std::vector<double> pa(n), pb(n);
      ref.floored_payoff(phi.data(), pa.data(), n, 1.5, 0.3);
      k.floored_payoff(phi.data(), pb.data(), n, 1.5, 0.3);
      CHECK(same_bits(pa, pb));
      ref.linear_payoff(phi.data(), pa.data(), n, 1.5, 0.3);
      k.linear_payoff(phi.data(), pb.data(), n, 1.5, 0.3);
      CHECK(same_bits(pa, pb));

      CHECK(same_bits(ref.sum(phi.data(), n), k.sum(phi.data(), n)));
      LaneSums s2a, s4a, s2b, s4b;
      ref.centered_powers(phi.data(), n, 1.1, &s2a, &s4a);
      k.centered_powers(phi.data(), n, 1.1, &s2b, &s4b);
      CHECK(same_bits(s2a, s2b));
      CHECK(same_bits(s4a, s4b));
    }
  }
}

TEST_CASE("kernel results are the plain formulas") {
  const std::vector<double> phi = {0.5, 5.0, 6.0, 1.0, 2.0};
  std::vector<double> out(phi.size());
  scalar_kernels().floored_payoff(phi.data(), out.data(), phi.size(), 1.5, 0.3);
  CHECK(out[0] == 1.5 - 0.3 * 0.5);
  CHECK(out[1] == 0.0);  // kink: mu - gamma * phi == 0
  CHECK(out[2] == 0.0);
  const LaneSums s = scalar_kernels().sum(phi.data(), phi.size());
  CHECK(s.total() == doctest::Approx(14.5));
  CHECK(s.lane[0] == 0.5 + 2.0);
}

}  // TEST_SUITE
