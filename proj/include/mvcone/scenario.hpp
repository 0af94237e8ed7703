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

#ifndef MVCONE_SCENARIO_HPP
#define MVCONE_SCENARIO_HPP

#include <cstdint>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "mvcone/cone_market.hpp"
#include "mvcone/market_model.hpp"
#include "mvcone/monte_carlo.hpp"
#include "mvcone/policy.hpp"

namespace mvcone {

struct FrontierSettings {
  std::optional<double> d_min;
  std::optional<double> d_max;
  std::size_t points = 21;
  bool operator==(const FrontierSettings&) const = default;
};

struct HjbSettings {
  std::optional<double> c;
  std::size_t grid = 256;
  std::size_t time_steps = 256;
  std::size_t stride = 16;
  bool operator==(const HjbSettings&) const = default;
};

struct SimulateSettings {
  std::size_t paths = 100000;
  std::size_t steps = 256;
  std::uint64_t seed = 0;
  std::size_t chunk_size = 4096;
  bool antithetic = false;
  std::size_t stored_paths = 100;
  bool operator==(const SimulateSettings&) const = default;

  SimulationPlan plan() const;
};

/// Everything one run needs. Unknown JSON fields are rejected.
struct Scenario {
  MarketConfig market;
  ConeConstraint cone;
  double d = 0.0;
  bool bankruptcy_prohibited = true;
  SimulateSettings simulate;
  FrontierSettings frontier;
  HjbSettings hjb;

  Variant variant() const {
    return bankruptcy_prohibited ? Variant::BankruptcyProhibited : Variant::BankruptcyAllowed;
  }
};

bool operator==(const Scenario& a, const Scenario& b);

/// Throws Error(InvalidScenario) on schema violations.
Scenario parse_scenario(const nlohmann::json& j);
Scenario load_scenario(const std::string& path);
nlohmann::json to_json(const Scenario& s);
/// FNV-1a of the canonical JSON form, as 16 hex digits.
std::string scenario_hash(const Scenario& s);

}  // namespace mvcone

#endif  // MVCONE_SCENARIO_HPP
