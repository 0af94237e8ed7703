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

#ifndef MVCONE_CLI_HPP
#define MVCONE_CLI_HPP

#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mvcone/cone_market.hpp"
#include "mvcone/lagrange.hpp"
#include "mvcone/policy.hpp"
#include "mvcone/scenario.hpp"

namespace mvcone {

/// Exit codes of the command line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalid = 2;
inline constexpr int kExitNumerical = 3;

std::shared_ptr<const EffectiveMarket> effective_market(const Scenario& s);
MomentInputs moment_inputs(const EffectiveMarket& market, double d);
/// Bankruptcy-prohibited scenarios solve the nonlinear system; the
/// unrestricted variant uses the closed form.
LagrangePair lagrange_pair(const Scenario& s, const EffectiveMarket& market);

struct SolveSummary {
  std::shared_ptr<const EffectiveMarket> market;
  MomentInputs inputs;
  LagrangePair pair;
  double variance = 0.0;
  double wealth_at_origin = 0.0;          // policy wealth at t = 0, phi = 1
  Eigen::VectorXd portfolio_at_origin;
};

SolveSummary solve_scenario(const Scenario& s);
nlohmann::json summary_json(const Scenario& s, const SolveSummary& summary);

/// Full command line entry point. `args[0]` is the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mvcone

#endif  // MVCONE_CLI_HPP
