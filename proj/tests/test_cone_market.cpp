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

#include <random>

#include "mvcone/cone_market.hpp"
#include "mvcone/error.hpp"
#include "oracles.hpp"

using namespace mvcone;

namespace {

Eigen::MatrixXd random_spd(std::mt19937_64& gen, int m) {
  std::normal_distribution<double> n;
  Eigen::MatrixXd a(m, m);
  for (int i = 0; i < m * m; ++i) a(i / m, i % m) = n(gen);
  return a * a.transpose() + 0.5 * Eigen::MatrixXd::Identity(m, m);
}

Eigen::VectorXd random_vector(std::mt19937_64& gen, int m) {
  std::normal_distribution<double> n;
  Eigen::VectorXd v(m);
  for (int i = 0; i < m; ++i) v[i] = n(gen);
  return v;
}

double objective(const Eigen::MatrixXd& g, const Eigen::VectorXd& b, const Eigen::VectorXd& z) {
  return 0.5 * z.dot(g * z) - b.dot(z);
}

}  // namespace

TEST_SUITE("cone") {

TEST_CASE("example market projections") {
  const MarketModel m = MarketModel::build(oracle::example_market());
  const Eigen::MatrixXd g = m.gram(0);
  const Eigen::VectorXd b = m.excess_return(0);

  const ProjectionResult free = project_cone(g, b, Eigen::MatrixXd(3, 0));
  CHECK((free.z - Eigen::Vector3d(3.52, -0.8, 1.6)).cwiseAbs().maxCoeff() <= 1e-3);

  const ProjectionResult ns = project_cone(g, b, Eigen::MatrixXd::Identity(3, 3));
  CHECK((ns.z - Eigen::Vector3d(2.72, 0.0, 1.28)).cwiseAbs().maxCoeff() <= 1e-3);
  CHECK(ns.z[1] == 0.0);
  const Eigen::VectorXd lambda = g * ns.z - b;
  CHECK((lambda - Eigen::Vector3d(0.0, 0.03, 0.0)).cwiseAbs().maxCoeff() <= 1e-4);
  CHECK(ns.nu.minCoeff() >= -1e-8);
  CHECK(std::abs(lambda.dot(ns.z)) <= 1e-8);
}

TEST_CASE("excess return inside the negative cone projects to zero") {
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(0.1, 2.0);
  const MarketModel m = MarketModel::build(oracle::example_market());
  for (int trial = 0; trial < 10; ++trial) {
    const Eigen::MatrixXd c = Eigen::MatrixXd::Identity(3, 3);
    const Eigen::Vector3d chi(u(gen), u(gen), u(gen));
    const ProjectionResult r = project_cone(m.gram(0), -c * chi, c);
    CHECK(r.z.norm() == 0.0);
  }
}

TEST_CASE("active-set solution matches exhaustive enumeration") {
  std::mt19937_64 gen(17);
  for (int trial = 0; trial < 200; ++trial) {
    const int m = 3 + trial % 3;
    const Eigen::MatrixXd g = random_spd(gen, m);
    const Eigen::VectorXd b = random_vector(gen, m);
    Eigen::MatrixXd c = Eigen::MatrixXd::Identity(m, m);
    if (trial % 2 == 1) {
      c = Eigen::MatrixXd(m, m - 1);
      for (int j = 0; j < m - 1; ++j) c.col(j) = random_vector(gen, m);
    }
    const Eigen::VectorXd expected = oracle::enumerate_cone_qp(g, b, c);
    const ProjectionResult r = project_cone(g, b, c);
    CHECK((r.z - expected).cwiseAbs().maxCoeff() <= 1e-8);
    CHECK((c.transpose() * r.z).minCoeff() >= -1e-10);
    // KKT: gram z - B = C nu with nu >= 0 and complementary slackness.
    CHECK((g * r.z - b - c * r.nu).norm() <= 1e-8);
    CHECK(r.nu.minCoeff() >= -1e-8);
    CHECK(std::abs(r.nu.dot(c.transpose() * r.z)) <= 1e-8);
  }
}

TEST_CASE("no feasible point beats the projection") {
  std::mt19937_64 gen(5);
  std::normal_distribution<double> n;
  const Eigen::MatrixXd g = random_spd(gen, 4);
  const Eigen::VectorXd b = random_vector(gen, 4);
  const Eigen::MatrixXd c = Eigen::MatrixXd::Identity(4, 4);
  const ProjectionResult r = project_cone(g, b, c);
  const double best = objective(g, b, r.z);
  for (int i = 0; i < 1000; ++i) {
    Eigen::VectorXd z(4);
    for (int j = 0; j < 4; ++j) z[j] = std::abs(n(gen)) * 3.0;
    CHECK(objective(g, b, z) >= best - 1e-12);
  }
}

TEST_CASE("dual form agrees with the primal multiplier for no-shorting") {
  const MarketModel m = MarketModel::build(oracle::example_market());
  const Eigen::VectorXd b = m.excess_return(0);
  const ProjectionResult ns = project_cone(m.gram(0), b, Eigen::MatrixXd::Identity(3, 3));
  const Eigen::VectorXd lambda = m.gram(0) * ns.z - b;
  const Eigen::VectorXd dual = no_shorting_dual_adjustment(m.invert_sigma(0), b);
  CHECK((dual - lambda).cwiseAbs().maxCoeff() <= 1e-8);

  std::mt19937_64 gen(23);
  for (int trial = 0; trial < 50; ++trial) {
    Eigen::MatrixXd sigma = random_spd(gen, 3);
    const Eigen::VectorXd excess = random_vector(gen, 3);
    const Eigen::MatrixXd gram = sigma * sigma.transpose();
    const ProjectionResult p = project_cone(gram, excess, Eigen::MatrixXd::Identity(3, 3));
    const Eigen::VectorXd d = no_shorting_dual_adjustment(sigma.inverse(), excess);
    CHECK((d - (gram * p.z - excess)).cwiseAbs().maxCoeff() <= 1e-8);
  }
}

TEST_CASE("scaling the excess return scales the solution") {
  const MarketModel m = MarketModel::build(oracle::example_market());
  const Eigen::MatrixXd c = Eigen::MatrixXd::Identity(3, 3);
  const ScalingReport two = scaling_check(m.gram(0), m.excess_return(0), c, 2.0);
  CHECK(two.pass);
  CHECK((two.solution - 2.0 * Eigen::Vector3d(2.72, 0.0, 1.28)).cwiseAbs().maxCoeff() <= 2e-3);

  const ScalingReport free = scaling_check(m.gram(0), m.excess_return(0), Eigen::MatrixXd(3, 0), 1.0);
  const Eigen::VectorXd b = m.excess_return(0);
  CHECK(free.value == doctest::Approx(-0.5 * b.dot(m.gram(0).ldlt().solve(b))).epsilon(1e-12));

  std::mt19937_64 gen(29);
  const Eigen::MatrixXd g = random_spd(gen, 4);
  const Eigen::VectorXd rb = random_vector(gen, 4);
  const Eigen::MatrixXd rc = Eigen::MatrixXd::Identity(4, 4);
  const Eigen::VectorXd base = project_cone(g, rb, rc).z;
  for (double alpha : {0.5, 1.0, 3.0}) {
    const Eigen::VectorXd scaled = project_cone(g, alpha * rb, rc).z;
    CHECK((scaled - alpha * base).cwiseAbs().maxCoeff() <= 1e-10);
    CHECK(scaling_check(g, rb, rc, alpha).pass);
  }
}

TEST_CASE("effective market") {
  const auto cfg = oracle::example_market();
  const EffectiveMarket free(MarketModel::build(cfg), ConeConstraint::unconstrained());
  CHECK((free.segment(0).theta_hat - Eigen::Vector3d(0.36, 0.2540, 0.5164)).cwiseAbs().maxCoeff() <= 1e-3);
  CHECK(free.total_theta_sq() == doctest::Approx(0.4608).epsilon(1e-12));

  const EffectiveMarket ns(MarketModel::build(cfg), ConeConstraint::no_shorting());
  CHECK((ns.segment(0).theta_hat - Eigen::Vector3d(0.36, 0.3695, 0.4131)).cwiseAbs().maxCoeff() <= 1e-3);
  const Eigen::VectorXd th = ns.segment(0).theta_hat;
  CHECK(ns.total_theta_sq() == doctest::Approx(th.squaredNorm()).epsilon(1e-14));
  CHECK(ns.total_theta_sq() == doctest::Approx(0.4368).epsilon(1e-4));
  CHECK(!ns.degenerate());

  auto flat = cfg;
  flat.segments[0].b = Eigen::Vector3d::Constant(0.03);
  const EffectiveMarket zero(MarketModel::build(flat), ConeConstraint::no_shorting());
  CHECK(zero.segment(0).z_bar.norm() == 0.0);
  CHECK(zero.segment(0).theta_hat.norm() == 0.0);
  CHECK(zero.degenerate());
}

TEST_CASE("general cone with per-segment matrices") {
  auto cfg = oracle::example_market();
  auto second = cfg.segments[0];
  cfg.segments[0].t_end = 0.5;
  second.r = 0.02;
  cfg.segments.push_back(second);
  Eigen::MatrixXd c1(3, 1);
  c1 << 0.0, 1.0, 0.0;
  const auto cone = ConeConstraint::general(std::vector<Eigen::MatrixXd>{c1, Eigen::MatrixXd::Identity(3, 3)});
  const EffectiveMarket eff(MarketModel::build(cfg), cone);
  CHECK(eff.segment(0).z_bar[1] >= -1e-12);
  CHECK(eff.segment(1).z_bar.minCoeff() >= -1e-12);
  CHECK(eff.rate_integral(0.0, 1.0) == doctest::Approx(0.025).epsilon(1e-14));
  CHECK(eff.theta_sq_integral(0.25, 0.75) ==
        doctest::Approx(0.25 * eff.segment(0).theta_sq + 0.25 * eff.segment(1).theta_sq).epsilon(1e-14));
}

}  // TEST_SUITE
