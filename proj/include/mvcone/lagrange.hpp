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

#ifndef MVCONE_LAGRANGE_HPP
#define MVCONE_LAGRANGE_HPP

#include <string_view>

namespace mvcone {

/// Scalars describing the terminal-wealth problem after the market has been
/// reduced to its effective form.
struct MomentInputs {
  double d = 0.0;           // target mean of terminal wealth
  double x0 = 0.0;          // initial wealth
  double rate_integral = 0.0;      // int_0^T r
  double theta_sq_integral = 0.0;  // int_0^T |theta_hat|^2

  /// x0 * exp(int_0^T r): terminal wealth of the all-bond strategy.
  double risk_free_terminal() const;
};

enum class Provenance { SystemSolve, ClosedForm, DegenerateZeroRisk };
std::string_view to_string(Provenance p) noexcept;

/// Terminal payoff X(T) = mu - gamma * phi(T), floored at zero when
/// bankruptcy is prohibited.
struct LagrangePair {
  double mu = 0.0;
  double gamma = 0.0;
  Provenance provenance = Provenance::SystemSolve;
  double mean_residual = 0.0;    // relative
  double budget_residual = 0.0;  // relative
  int iterations = 0;
  bool used_fallback = false;
};

/// Moments of P = (mu - gamma * phi(T))^+ with phi(T) lognormal,
/// E[phi] = exp(-rate_integral), Var(ln phi) = theta_sq_integral.
struct PayoffMoments {
  double mean = 0.0;        // E[P]
  double priced = 0.0;      // E[phi P]
  double second = 0.0;      // E[P^2]
};

PayoffMoments payoff_moments(double mu, double gamma, double rate_integral,
                             double theta_sq_integral);

struct SystemLhs {
  double mean = 0.0;    // E[(mu - gamma phi)^+], target d
  double budget = 0.0;  // e^{I_r} E[phi (mu - gamma phi)^+], target x0 e^{I_r}
};

/// Left-hand sides of the two moment equations in closed form.
/// Throws DomainError unless mu > 0, gamma > 0 and theta_sq_integral > 0.
SystemLhs system_lhs(double mu, double gamma, const MomentInputs& inputs);

struct SolveOptions {
  double tolerance = 1e-12;
  int max_newton = 100;
  int max_bisection = 200;
  /// Skip Newton and go straight to the bracketing solver (testing hook).
  bool force_fallback = false;
};

/// Solves the bankruptcy-prohibited moment system for (mu, gamma).
LagrangePair solve_mu_gamma(const MomentInputs& inputs, const SolveOptions& options = {});

/// Linear payoff (bankruptcy allowed) in closed form.
LagrangePair closed_form_mu_gamma(const MomentInputs& inputs);

/// Var(X*(T)) for the payoff described by pair.
double terminal_variance(const LagrangePair& pair, const MomentInputs& inputs,
                         bool bankruptcy_prohibited);

}  // namespace mvcone

#endif  // MVCONE_LAGRANGE_HPP
