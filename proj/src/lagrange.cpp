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

#include "mvcone/lagrange.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mvcone/error.hpp"
#include "mvcone/normal.hpp"

namespace mvcone {

double MomentInputs::risk_free_terminal() const { return x0 * std::exp(rate_integral); }

std::string_view to_string(Provenance p) noexcept {
  switch (p) {
    case Provenance::SystemSolve: return "SystemSolve";
    case Provenance::ClosedForm: return "ClosedForm";
    case Provenance::DegenerateZeroRisk: return "DegenerateZeroRisk";
  }
  return "Unknown";
}

namespace {

constexpr double kRiskFreeTol = 1e-12;

void validate(const MomentInputs& in) {
  if (!(in.x0 > 0.0)) throw Error(ErrorCode::NonPositiveInitialWealth, "x0 must be > 0");
  if (!std::isfinite(in.d) || !std::isfinite(in.rate_integral) ||
      !(in.theta_sq_integral >= 0.0) || !std::isfinite(in.theta_sq_integral)) {
    throw Error(ErrorCode::DomainError, "moment inputs must be finite with I_theta >= 0");
  }
}

// True when d sits on the risk-free point; throws when it is below it.
bool at_risk_free(const MomentInputs& in) {
  const double floor = in.risk_free_terminal();
  if (std::abs(in.d - floor) <= kRiskFreeTol * floor) return true;
  if (in.d < floor) {
    throw Error(ErrorCode::TargetBelowRiskFree,
                "target " + std::to_string(in.d) + " below x0*exp(int r) = " +
                    std::to_string(floor));
  }
  return false;
}

LagrangePair degenerate_pair(const MomentInputs& in) {
  LagrangePair p;
  p.mu = in.d;
  p.gamma = 0.0;
  p.provenance = Provenance::DegenerateZeroRisk;
  return p;
}

struct Residual {
  double mean;
  double budget;
  double norm() const { return std::max(std::abs(mean), std::abs(budget)); }
};

Residual residual(double mu, double gamma, const MomentInputs& in) {
  const SystemLhs lhs = system_lhs(mu, gamma, in);
  return {lhs.mean / in.d - 1.0, lhs.budget / in.risk_free_terminal() - 1.0};
}

bool newton(const MomentInputs& in, const SolveOptions& opt, LagrangePair& pair) {
  const double s = std::sqrt(in.theta_sq_integral);
  const double budget_target = in.risk_free_terminal();
  const double disc = std::exp(-in.rate_integral);
  const double disc_tilt = std::exp(-in.rate_integral + in.theta_sq_integral);

  double log_mu = std::log(pair.mu);
  double log_gamma = std::log(pair.gamma);
  Residual f = residual(pair.mu, pair.gamma, in);
  for (int it = 0; it < opt.max_newton; ++it) {
    if (f.norm() <= opt.tolerance) {
      pair.mu = std::exp(log_mu);
      pair.gamma = std::exp(log_gamma);
      pair.iterations = it;
      return true;
    }
    const double mu = std::exp(log_mu);
    const double gamma = std::exp(log_gamma);
    const double a_plus = (log_mu - log_gamma + in.rate_integral + 0.5 * in.theta_sq_integral) / s;
    const double a_minus = a_plus - s;
    // Derivatives with respect to (ln mu, ln gamma); the kink terms cancel.
    const double j11 = mu * normal_cdf(a_plus) / in.d;
    const double j12 = -gamma * disc * normal_cdf(a_minus) / in.d;
    const double j21 = mu * normal_cdf(a_minus) / budget_target;
    const double j22 = -gamma * disc_tilt * normal_cdf(a_minus - s) / budget_target;
    const double det = j11 * j22 - j12 * j21;
    if (!(std::abs(det) > 0.0) || !std::isfinite(det)) return false;
    const double du = -(j22 * f.mean - j12 * f.budget) / det;
    const double dv = -(-j21 * f.mean + j11 * f.budget) / det;

    double step = 1.0;
    bool accepted = false;
    for (int halving = 0; halving < 40; ++halving, step *= 0.5) {
      const double u = log_mu + step * du;
      const double v = log_gamma + step * dv;
      const Residual trial = residual(std::exp(u), std::exp(v), in);
      if (std::isfinite(trial.norm()) && trial.norm() < f.norm()) {
        log_mu = u;
        log_gamma = v;
        f = trial;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
  }
  pair.mu = std::exp(log_mu);
  pair.gamma = std::exp(log_gamma);
  pair.iterations = opt.max_newton;
  return f.norm() <= opt.tolerance;
}

// Both equations are homogeneous of degree one in (mu, gamma), so for a fixed
// ratio rho = mu / gamma the scale follows from the mean equation and only the
// ratio mean/budget has to be matched.
bool bracketing(const MomentInputs& in, const SolveOptions& opt, LagrangePair& pair) {
  const double target = in.d / in.risk_free_terminal();
  auto ratio_gap = [&](double log_rho) {
    const SystemLhs lhs = system_lhs(std::exp(log_rho), 1.0, in);
    return lhs.mean / lhs.budget - target;
  };
  double lo = std::log(pair.mu / pair.gamma) - 1.0;
  double hi = lo + 2.0;
  for (int i = 0; i < 200 && !(ratio_gap(lo) > 0.0); ++i) lo -= 1.0;
  for (int i = 0; i < 200 && !(ratio_gap(hi) < 0.0); ++i) hi += 1.0;
  if (!(ratio_gap(lo) > 0.0) || !(ratio_gap(hi) < 0.0)) return false;

  int it = 0;
  for (; it < opt.max_bisection && hi - lo > 1e-15 * std::max(1.0, std::abs(lo)); ++it) {
    const double mid = 0.5 * (lo + hi);
    (ratio_gap(mid) > 0.0 ? lo : hi) = mid;
  }
  const double rho = std::exp(0.5 * (lo + hi));
  const double scale = in.d / system_lhs(rho, 1.0, in).mean;
  pair.mu = rho * scale;
  pair.gamma = scale;
  pair.iterations += it;
  pair.used_fallback = true;
  return residual(pair.mu, pair.gamma, in).norm() <= std::max(opt.tolerance, 1e-11);
}

}  // namespace

PayoffMoments payoff_moments(double mu, double gamma, double rate_integral,
                             double theta_sq_integral) {
  PayoffMoments out;
  const double disc = std::exp(-rate_integral);
  if (gamma == 0.0) {
    const double p = std::max(mu, 0.0);
    return {p, p * disc, p * p};
  }
  if (theta_sq_integral == 0.0) {
    const double p = std::max(mu - gamma * disc, 0.0);
    return {p, p * disc, p * p};
  }
  const double s = std::sqrt(theta_sq_integral);
  const double a_plus = (std::log(mu / gamma) + rate_integral + 0.5 * theta_sq_integral) / s;
  const double a_minus = a_plus - s;
  const double a_tilt = a_minus - s;
  const double second_phi = std::exp(-2.0 * rate_integral + theta_sq_integral);
  const double n_plus = normal_cdf(a_plus);
  const double n_minus = normal_cdf(a_minus);
  const double n_tilt = normal_cdf(a_tilt);
  out.mean = mu * n_plus - gamma * disc * n_minus;
  out.priced = mu * disc * n_minus - gamma * second_phi * n_tilt;
  out.second = mu * mu * n_plus - 2.0 * mu * gamma * disc * n_minus +
               gamma * gamma * second_phi * n_tilt;
  return out;
}

SystemLhs system_lhs(double mu, double gamma, const MomentInputs& inputs) {
  if (!(mu > 0.0) || !(gamma > 0.0)) {
    throw Error(ErrorCode::DomainError, "system_lhs requires mu > 0 and gamma > 0");
  }
  if (!(inputs.theta_sq_integral > 0.0)) {
    throw Error(ErrorCode::DomainError, "system_lhs requires I_theta > 0");
  }
  const double s = std::sqrt(inputs.theta_sq_integral);
  const double ir = inputs.rate_integral;
  const double it = inputs.theta_sq_integral;
  const double log_ratio = std::log(mu / gamma);
  const double a_plus = (log_ratio + ir + 0.5 * it) / s;
  const double a_minus = (log_ratio + ir - 0.5 * it) / s;
  const double a_tilt = (log_ratio + ir - 1.5 * it) / s;
  SystemLhs out;
  out.mean = mu * normal_cdf(a_plus) - gamma * std::exp(-ir) * normal_cdf(a_minus);
  out.budget = mu * normal_cdf(a_minus) - gamma * std::exp(-(ir - it)) * normal_cdf(a_tilt);
  return out;
}

LagrangePair solve_mu_gamma(const MomentInputs& inputs, const SolveOptions& options) {
  validate(inputs);
  if (at_risk_free(inputs)) return degenerate_pair(inputs);
  if (!(inputs.theta_sq_integral > 0.0)) {
    throw Error(ErrorCode::DegenerateMarket,
                "I_theta = 0: no target above x0*exp(int r) is attainable");
  }

  LagrangePair pair = closed_form_mu_gamma(inputs);
  pair.provenance = Provenance::SystemSolve;
  bool ok = false;
  if (!options.force_fallback) ok = newton(inputs, options, pair);
  if (!ok) {
    LagrangePair start = closed_form_mu_gamma(inputs);
    start.provenance = Provenance::SystemSolve;
    start.iterations = pair.iterations;
    pair = start;
    ok = bracketing(inputs, options, pair);
  }
  const Residual f = residual(pair.mu, pair.gamma, inputs);
  pair.mean_residual = f.mean;
  pair.budget_residual = f.budget;
  if (!ok) {
    throw Error(ErrorCode::NoConvergence,
                "(mu, gamma) solve stalled at mu=" + std::to_string(pair.mu) +
                    " gamma=" + std::to_string(pair.gamma) +
                    " residuals=(" + std::to_string(f.mean) + ", " + std::to_string(f.budget) + ")");
  }
  return pair;
}

LagrangePair closed_form_mu_gamma(const MomentInputs& inputs) {
  validate(inputs);
  if (at_risk_free(inputs)) {
    LagrangePair p = degenerate_pair(inputs);
    p.mu = inputs.risk_free_terminal();
    return p;
  }
  if (!(inputs.theta_sq_integral > 0.0)) {
    throw Error(ErrorCode::DegenerateMarket,
                "I_theta = 0: no target above x0*exp(int r) is attainable");
  }
  const double ir = inputs.rate_integral;
  const double it = inputs.theta_sq_integral;
  const double denom = -std::expm1(-it);
  LagrangePair p;
  p.mu = (inputs.d - inputs.x0 * std::exp(ir - it)) / denom;
  p.gamma = (inputs.d - inputs.risk_free_terminal()) * std::exp(ir - it) / denom;
  p.provenance = Provenance::ClosedForm;
  // Linear payoff: E[X] = mu - gamma E[phi], E[phi X] = mu E[phi] - gamma E[phi^2].
  const double e_phi = std::exp(-ir);
  const double e_phi2 = std::exp(-2.0 * ir + it);
  p.mean_residual = (p.mu - p.gamma * e_phi) / inputs.d - 1.0;
  p.budget_residual = (p.mu * e_phi - p.gamma * e_phi2) / inputs.x0 - 1.0;
  return p;
}

double terminal_variance(const LagrangePair& pair, const MomentInputs& inputs,
                         bool bankruptcy_prohibited) {
  if (pair.gamma == 0.0) return 0.0;
  const double ir = inputs.rate_integral;
  const double it = inputs.theta_sq_integral;
  if (!bankruptcy_prohibited) {
    return pair.gamma * pair.gamma * std::exp(-2.0 * ir) * std::expm1(it);
  }
  const PayoffMoments mom = payoff_moments(pair.mu, pair.gamma, ir, it);
  return std::max(0.0, mom.second - inputs.d * inputs.d);
}

}  // namespace mvcone
