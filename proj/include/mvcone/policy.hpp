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

#ifndef MVCONE_POLICY_HPP
#define MVCONE_POLICY_HPP

#include <memory>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "mvcone/cone_market.hpp"
#include "mvcone/lagrange.hpp"

namespace mvcone {

enum class Variant { BankruptcyProhibited, BankruptcyAllowed };
std::string_view to_string(Variant v) noexcept;

struct Thresholds {
  double d1 = 0.0;
  double d2 = 0.0;
};

/// Time-dependent constants of the policy at a fixed t.
struct PolicySlice {
  double t = 0.0;
  double tail_rate = 0.0;      // int_t^T r
  double tail_theta_sq = 0.0;  // int_t^T |theta_hat|^2
  double discount = 1.0;       // exp(-tail_rate)
  double bond = 0.0;           // mu * discount
  double carry = 0.0;          // gamma * exp(-(2 tail_rate - tail_theta_sq))
  double root = 0.0;           // sqrt(tail_theta_sq)
  double shift = 0.0;          // ln(gamma/mu) - tail_rate + 1.5 tail_theta_sq
  bool deterministic = false;  // no diffusion left before T
};

struct PolicyValue {
  double wealth = 0.0;
  double scale = 0.0;  // pi* = scale * direction(t)
};

struct LinearPolicy {
  double wealth = 0.0;
  Eigen::VectorXd portfolio;
};

/// Optimal wealth and holdings as functions of time and the state-price
/// density level y = phi(t).
class PolicyContext {
 public:
  /// Throws DomainError when the pair's provenance does not fit the variant.
  PolicyContext(std::shared_ptr<const EffectiveMarket> market, LagrangePair pair,
                Variant variant);

  const EffectiveMarket& market() const { return *market_; }
  std::shared_ptr<const EffectiveMarket> market_ptr() const { return market_; }
  const LagrangePair& pair() const { return pair_; }
  Variant variant() const { return variant_; }
  int asset_count() const { return market_->market().asset_count(); }

  /// (sigma sigma')^{-1} B_hat on the segment containing t.
  const Eigen::VectorXd& direction(double t) const;

  Thresholds d1_d2(double t, double y) const;

  /// f(t, y); bankruptcy-prohibited variant with gamma > 0 and t < T.
  double wealth_value(double t, double y) const;

  /// Efficient portfolio in closed form.
  Eigen::VectorXd optimal_portfolio(double t, double y) const;
  /// Same portfolio written as feedback on current wealth.
  Eigen::VectorXd feedback_portfolio(double t, double y, double wealth) const;

  /// (mu - gamma * phi_T)^+
  double terminal_payoff(double phi_t) const;

  /// Unfloored policy of the bankruptcy-allowed variant.
  LinearPolicy linear_policy(double t, double y) const;

  PolicySlice slice(double t) const;
  /// Wealth and portfolio scale at density level y; same values as
  /// wealth() and portfolio_scale() with the time constants hoisted.
  PolicyValue evaluate(const PolicySlice& slice, double y) const;
  double feedback_scale(const PolicySlice& slice, double y, double wealth) const;

  /// Wealth for any t in [0, T], either variant. Covers gamma = 0, t = T and
  /// segments where theta_hat vanishes for the rest of the horizon.
  double wealth(double t, double y) const;
  /// Scalar s >= 0 with pi*(t) = s * direction(t).
  double portfolio_scale(double t, double y) const;
  /// Scalar form of feedback_portfolio.
  double feedback_scale(double t, double y, double wealth) const;

 private:
  bool deterministic_tail(double t) const;

  std::shared_ptr<const EffectiveMarket> market_;
  LagrangePair pair_;
  Variant variant_;
  std::vector<Eigen::VectorXd> directions_;
};

}  // namespace mvcone

#endif  // MVCONE_POLICY_HPP
