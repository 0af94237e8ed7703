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

#include "mvcone/policy.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mvcone/error.hpp"
#include "mvcone/normal.hpp"

namespace mvcone {

std::string_view to_string(Variant v) noexcept {
  return v == Variant::BankruptcyProhibited ? "bankruptcy_prohibited" : "bankruptcy_allowed";
}

PolicyContext::PolicyContext(std::shared_ptr<const EffectiveMarket> market, LagrangePair pair,
                             Variant variant)
    : market_(std::move(market)), pair_(pair), variant_(variant) {
  if (!market_) throw Error(ErrorCode::DomainError, "policy needs an effective market");
  const bool degenerate = pair_.provenance == Provenance::DegenerateZeroRisk;
  if (variant_ == Variant::BankruptcyAllowed && pair_.provenance != Provenance::ClosedForm &&
      !degenerate) {
    throw Error(ErrorCode::DomainError, "bankruptcy-allowed policy needs a closed-form pair");
  }
  if (variant_ == Variant::BankruptcyProhibited && pair_.provenance == Provenance::ClosedForm) {
    throw Error(ErrorCode::DomainError, "bankruptcy-prohibited policy needs a system-solve pair");
  }
  if (!(pair_.gamma >= 0.0) || !(pair_.mu > 0.0)) {
    throw Error(ErrorCode::DomainError, "policy needs mu > 0 and gamma >= 0");
  }
  const auto& mkt = market_->market();
  for (std::size_t i = 0; i < mkt.segment_count(); ++i) {
    directions_.push_back(market_->segment(i).z_bar);  // gram^{-1} B_hat by construction
  }
}

const Eigen::VectorXd& PolicyContext::direction(double t) const {
  return directions_[market_->market().segment_index(t)];
}

bool PolicyContext::deterministic_tail(double t) const {
  return t >= market_->horizon() || market_->tail_theta_sq(t) == 0.0;
}

Thresholds PolicyContext::d1_d2(double t, double y) const {
  if (pair_.gamma == 0.0) {
    throw Error(ErrorCode::DomainError, "d1/d2 undefined for gamma = 0");
  }
  if (!(y > 0.0)) throw Error(ErrorCode::DomainError, "density level must be positive");
  if (!(t >= 0.0) || !(t < market_->horizon())) {
    throw Error(ErrorCode::DomainError, "d1/d2 need 0 <= t < T");
  }
  const double tail_r = market_->tail_rate(t);
  const double tail_theta = market_->tail_theta_sq(t);
  if (!(tail_theta > 0.0)) {
    throw Error(ErrorCode::DomainError, "d1/d2 undefined where int_t^T |theta_hat|^2 = 0");
  }
  const double root = std::sqrt(tail_theta);
  Thresholds out;
  out.d1 = (std::log(pair_.gamma * y / pair_.mu) - tail_r + 1.5 * tail_theta) / root;
  out.d2 = out.d1 - root;
  return out;
}

double PolicyContext::wealth_value(double t, double y) const {
  if (variant_ != Variant::BankruptcyProhibited) {
    throw Error(ErrorCode::DomainError, "wealth_value is the bankruptcy-prohibited wealth");
  }
  const Thresholds th = d1_d2(t, y);
  const double tail_r = market_->tail_rate(t);
  const double tail_theta = market_->tail_theta_sq(t);
  return pair_.mu * normal_cdf(-th.d2) * std::exp(-tail_r) -
         pair_.gamma * normal_cdf(-th.d1) * y * std::exp(-(2.0 * tail_r - tail_theta));
}

Eigen::VectorXd PolicyContext::optimal_portfolio(double t, double y) const {
  return portfolio_scale(t, y) * direction(t);
}

Eigen::VectorXd PolicyContext::feedback_portfolio(double t, double y, double wealth) const {
  return feedback_scale(t, y, wealth) * direction(t);
}

double PolicyContext::terminal_payoff(double phi_t) const {
  return std::max(pair_.mu - pair_.gamma * phi_t, 0.0);
}

LinearPolicy PolicyContext::linear_policy(double t, double y) const {
  const double tail_r = market_->tail_rate(t);
  const double tail_theta = market_->tail_theta_sq(t);
  const double risky = pair_.gamma * y * std::exp(-(2.0 * tail_r - tail_theta));
  LinearPolicy out;
  out.wealth = pair_.mu * std::exp(-tail_r) - risky;
  out.portfolio = risky * direction(t);
  return out;
}

PolicySlice PolicyContext::slice(double t) const {
  PolicySlice s;
  s.t = t;
  s.tail_rate = market_->tail_rate(t);
  s.tail_theta_sq = market_->tail_theta_sq(t);
  s.discount = std::exp(-s.tail_rate);
  s.bond = pair_.mu * s.discount;
  s.carry = pair_.gamma * std::exp(-(2.0 * s.tail_rate - s.tail_theta_sq));
  s.root = std::sqrt(s.tail_theta_sq);
  s.deterministic = deterministic_tail(t);
  if (pair_.gamma > 0.0) {
    s.shift = std::log(pair_.gamma / pair_.mu) - s.tail_rate + 1.5 * s.tail_theta_sq;
  }
  return s;
}

PolicyValue PolicyContext::evaluate(const PolicySlice& s, double y) const {
  if (variant_ == Variant::BankruptcyAllowed) return {s.bond - s.carry * y, s.carry * y};
  if (pair_.gamma == 0.0) return {s.bond, 0.0};
  if (s.deterministic) return {s.discount * terminal_payoff(y * s.discount), 0.0};
  const double d1 = (std::log(y) + s.shift) / s.root;
  const double d2 = d1 - s.root;
  const double risky = s.carry * y * normal_cdf(-d1);
  return {s.bond * normal_cdf(-d2) - risky, risky};
}

double PolicyContext::feedback_scale(const PolicySlice& s, double y, double wealth) const {
  if (variant_ == Variant::BankruptcyAllowed || pair_.gamma == 0.0) return -(wealth - s.bond);
  if (s.deterministic) return 0.0;
  const double d2 = (std::log(y) + s.shift) / s.root - s.root;
  return -(wealth - s.bond * normal_cdf(-d2));
}

double PolicyContext::wealth(double t, double y) const {
  if (!(y > 0.0)) throw Error(ErrorCode::DomainError, "density level must be positive");
  return evaluate(slice(t), y).wealth;
}

double PolicyContext::portfolio_scale(double t, double y) const {
  if (!(y > 0.0)) throw Error(ErrorCode::DomainError, "density level must be positive");
  return evaluate(slice(t), y).scale;
}

double PolicyContext::feedback_scale(double t, double y, double wealth) const {
  if (!(y > 0.0)) throw Error(ErrorCode::DomainError, "density level must be positive");
  return feedback_scale(slice(t), y, wealth);
}

}  // namespace mvcone
