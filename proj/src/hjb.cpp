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

#include "mvcone/hjb.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <fmt/format.h>

#include "mvcone/error.hpp"
#include "mvcone/lagrange.hpp"

// In xi = x exp(int_t^T r) / c and u = v / c^2 the transport term drops out
// and, with tau = int_t^T |theta_hat|^2 as the time variable, the equation is
//   u_tau = inf_q { q u_xi + q^2 u_xixi / 2 },  u(0, xi) = (xi - 1)^2,
//   u(tau, 0) = 1,  u(tau, 1) = 0,
// where q is the position in the effective direction z_bar, in xi units.

namespace mvcone {
namespace {

constexpr double kCurvatureFloor = 1e-12;

// Solves a tridiagonal system in place (Thomas); rhs holds the solution.
void solve_tridiagonal(const std::vector<double>& lower, std::vector<double> diag,
                       const std::vector<double>& upper, std::vector<double>& rhs) {
  const std::size_t n = diag.size();
  for (std::size_t i = 1; i < n; ++i) {
    const double w = lower[i] / diag[i - 1];
    diag[i] -= w * upper[i - 1];
    rhs[i] -= w * rhs[i - 1];
  }
  rhs[n - 1] /= diag[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) rhs[i] = (rhs[i] - upper[i] * rhs[i + 1]) / diag[i];
}

// q = -u_xi / u_xixi on interior nodes, zero on the boundary.
void optimal_control(const std::vector<double>& u, double h, std::vector<double>& q,
                     std::size_t& floor_hits) {
  const std::size_t last = u.size() - 1;
  q[0] = 0.0;
  q[last] = 0.0;
  for (std::size_t j = 1; j < last; ++j) {
    const double slope = (u[j + 1] - u[j - 1]) / (2.0 * h);
    double curvature = (u[j + 1] - 2.0 * u[j] + u[j - 1]) / (h * h);
    if (curvature < kCurvatureFloor) {
      curvature = kCurvatureFloor;
      ++floor_hits;
    }
    q[j] = std::max(0.0, -slope / curvature);
  }
}

}  // namespace

void HjbProblem::validate() const {
  if (!market) throw Error(ErrorCode::InvalidScenario, "HJB problem needs a market");
  if (!(c > 0.0) || !std::isfinite(c)) {
    throw Error(ErrorCode::DomainError, "HJB target c must be positive");
  }
  if (grid < 64 || time_steps < 64) {
    throw Error(ErrorCode::InvalidScenario, "HJB grid and time steps must be >= 64");
  }
  if (max_policy_iterations < 1) {
    throw Error(ErrorCode::InvalidScenario, "need at least one policy iteration");
  }
}

double HjbSolution::wealth(std::size_t time, std::size_t node) const {
  return xi[node] * c * std::exp(-tail_rate[time]);
}

double HjbSolution::value_at(std::size_t time, double x) const {
  const std::size_t n = nodes();
  const double h = xi[1] - xi[0];
  const double s = x * std::exp(tail_rate[time]) / c;
  if (!(s >= 0.0) || s > 1.0 + 1e-12) {
    throw Error(ErrorCode::OutOfRange, "wealth outside the HJB domain");
  }
  auto base = static_cast<std::size_t>(std::clamp(std::floor(s / h), 1.0,
                                                  static_cast<double>(n - 3)));
  const double* row = &normalized[time * n];
  double out = 0.0;
  for (std::size_t a = base - 1; a <= base + 2; ++a) {
    double w = 1.0;
    for (std::size_t b = base - 1; b <= base + 2; ++b) {
      if (b != a) w *= (s - xi[b]) / (xi[a] - xi[b]);
    }
    out += w * row[a];
  }
  return c * c * out;
}

void HjbSolution::write_surface(std::ostream& out, std::size_t stride) const {
  stride = std::max<std::size_t>(1, stride);
  out << "t,x,v\n";
  for (std::size_t n = 0; n < times.size(); n += stride) {
    for (std::size_t j = 0; j < nodes(); j += stride) {
      out << fmt::format("{:.17g},{:.17g},{:.17g}\n", times[n], wealth(n, j), value(n, j));
    }
  }
}

HjbSolution solve_hjb_fd(const HjbProblem& problem) {
  problem.validate();
  const EffectiveMarket& market = *problem.market;
  const std::size_t nx = problem.grid;
  const std::size_t nt = problem.time_steps;
  const double h = 1.0 / static_cast<double>(nx);

  HjbSolution sol;
  sol.c = problem.c;
  sol.x0 = market.x0();
  sol.xi.resize(nx + 1);
  for (std::size_t j = 0; j <= nx; ++j) sol.xi[j] = static_cast<double>(j) * h;
  sol.xi.back() = 1.0;
  sol.times.resize(nt + 1);
  sol.tail_rate.resize(nt + 1);
  for (std::size_t n = 0; n <= nt; ++n) {
    sol.times[n] = market.horizon() * static_cast<double>(n) / static_cast<double>(nt);
  }
  sol.times.back() = market.horizon();
  for (std::size_t n = 0; n <= nt; ++n) sol.tail_rate[n] = market.tail_rate(sol.times[n]);

  const double cap = problem.c * std::exp(-sol.tail_rate[0]);
  if (sol.x0 > cap * (1.0 + 1e-12)) {
    throw Error(ErrorCode::TargetAboveCap,
                fmt::format("x0 = {} exceeds c*exp(-int r) = {}", sol.x0, cap));
  }

  const std::size_t stride = nx + 1;
  sol.normalized.assign((nt + 1) * stride, 0.0);
  sol.control.assign((nt + 1) * stride, 0.0);
  HjbDiagnostics& diag = sol.diagnostics;
  diag.min_second_difference = INFINITY;

  std::vector<double> next(stride), current(stride), previous(stride), q(stride);
  for (std::size_t j = 0; j <= nx; ++j) next[j] = (sol.xi[j] - 1.0) * (sol.xi[j] - 1.0);
  std::copy(next.begin(), next.end(), sol.normalized.begin() + static_cast<long>(nt * stride));
  optimal_control(next, h, q, diag.floor_activations);
  std::copy(q.begin(), q.end(), sol.control.begin() + static_cast<long>(nt * stride));

  std::vector<double> lower(stride), mid(stride), upper(stride);
  for (std::size_t n = nt; n-- > 0;) {
    const double dtau =
        std::max(0.0, market.theta_sq_integral(sol.times[n], sol.times[n + 1]));
    current = next;
    int it = 0;
    double change = 0.0;
    for (; it < problem.max_policy_iterations; ++it) {
      previous = current;
      lower[0] = 0.0; mid[0] = 1.0; upper[0] = 0.0; current[0] = 1.0;
      lower[nx] = 0.0; mid[nx] = 1.0; upper[nx] = 0.0; current[nx] = 0.0;
      for (std::size_t j = 1; j < nx; ++j) {
        const double diffusion = 0.5 * q[j] * q[j] / (h * h);
        double down = diffusion - q[j] / (2.0 * h);
        double up = diffusion + q[j] / (2.0 * h);
        if (down < 0.0) {
          // Upwind the drift where the central stencil is not monotone.
          down = diffusion;
          up = diffusion + q[j] / h;
          if (it == 0) ++diag.upwinded_nodes;
        }
        lower[j] = -dtau * down;
        upper[j] = -dtau * up;
        mid[j] = 1.0 + dtau * (down + up);
        current[j] = next[j];
      }
      solve_tridiagonal(lower, mid, upper, current);
      change = 0.0;
      for (std::size_t j = 0; j <= nx; ++j) {
        change = std::max(change, std::abs(current[j] - previous[j]));
      }
      if (!std::isfinite(change)) {
        throw Error(ErrorCode::NoConvergence, fmt::format("non-finite HJB slice at t = {}", sol.times[n]));
      }
      optimal_control(current, h, q, diag.floor_activations);
      if (change <= problem.fixed_point_tol) {
        ++it;
        break;
      }
    }
    diag.max_iterations_used = std::max(diag.max_iterations_used, it);
    if (change > problem.fixed_point_tol) {
      ++diag.unconverged_steps;
      diag.worst_fixed_point_change = std::max(diag.worst_fixed_point_change, change);
    }

    for (std::size_t j = 1; j < nx; ++j) {
      const double second = current[j + 1] - 2.0 * current[j] + current[j - 1];
      diag.min_second_difference = std::min(diag.min_second_difference, second);
      if (second < -problem.convexity_tol) {
        throw Error(ErrorCode::ConvexityLost,
                    fmt::format("second difference {} at t = {}, xi = {}", second,
                                sol.times[n], sol.xi[j]));
      }
    }
    std::copy(current.begin(), current.end(),
              sol.normalized.begin() + static_cast<long>(n * stride));
    std::copy(q.begin(), q.end(), sol.control.begin() + static_cast<long>(n * stride));
    next.swap(current);
  }

  sol.value_at_x0 = sol.value_at(0, sol.x0);
  return sol;
}

AnalyticValue analytic_value(double c, double x0, double rate_integral, double theta_sq_integral) {
  if (!(c > 0.0) || !(x0 > 0.0)) {
    throw Error(ErrorCode::DomainError, "analytic value needs c > 0 and x0 > 0");
  }
  AnalyticValue out;
  out.c = c;
  out.x0 = x0;
  const double cap = c * std::exp(-rate_integral);
  if (x0 > cap * (1.0 + 1e-12)) {
    throw Error(ErrorCode::TargetAboveCap, fmt::format("x0 = {} exceeds c*exp(-int r) = {}", x0, cap));
  }
  if (std::abs(x0 - cap) <= 1e-12 * cap) return out;
  if (theta_sq_integral == 0.0) {
    const double terminal = x0 * std::exp(rate_integral) - c;
    out.value = terminal * terminal;
    return out;
  }

  // E[phi (c - gamma phi)^+] decreases from c e^{-I_r} to 0 as gamma grows.
  auto priced = [&](double log_gamma) {
    return payoff_moments(c, std::exp(log_gamma), rate_integral, theta_sq_integral).priced - x0;
  };
  double lo = std::log(c) - 1.0;
  double hi = lo + 2.0;
  for (int i = 0; i < 400 && !(priced(lo) > 0.0); ++i) lo -= 1.0;
  for (int i = 0; i < 400 && !(priced(hi) < 0.0); ++i) hi += 1.0;
  if (!(priced(lo) > 0.0) || !(priced(hi) < 0.0)) {
    throw Error(ErrorCode::NoConvergence, "could not bracket the budget root");
  }
  for (int i = 0; i < 300 && hi - lo > 1e-14 * std::max(1.0, std::abs(lo)); ++i) {
    const double mid = 0.5 * (lo + hi);
    (priced(mid) > 0.0 ? lo : hi) = mid;
  }
  out.gamma = std::exp(0.5 * (lo + hi));
  const PayoffMoments mom = payoff_moments(c, out.gamma, rate_integral, theta_sq_integral);
  // E[(P - c)^2] with P = (c - gamma phi)^+.
  out.value = c * c - 2.0 * c * mom.mean + mom.second;
  return out;
}

HjbComparison compare(const HjbSolution& fd, const AnalyticValue& exact) {
  if (fd.c != exact.c || fd.x0 != exact.x0) {
    throw Error(ErrorCode::InvalidScenario,
                fmt::format("comparing FD (c = {}, x0 = {}) with analytic (c = {}, x0 = {})", fd.c,
                            fd.x0, exact.c, exact.x0));
  }
  HjbComparison out;
  out.fd_value = fd.value_at_x0;
  out.analytic_value = exact.value;
  out.absolute_gap = std::abs(out.fd_value - out.analytic_value);
  out.relative_gap = out.analytic_value != 0.0 ? out.absolute_gap / out.analytic_value
                                               : out.absolute_gap;
  return out;
}

HjbComparison compare(const HjbProblem& problem) {
  const HjbSolution fd = solve_hjb_fd(problem);
  const EffectiveMarket& m = *problem.market;
  return compare(fd, analytic_value(problem.c, m.x0(), m.total_rate(), m.total_theta_sq()));
}

}  // namespace mvcone
