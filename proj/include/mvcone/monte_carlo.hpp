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

#ifndef MVCONE_MONTE_CARLO_HPP
#define MVCONE_MONTE_CARLO_HPP

#include <cstddef>
#include <cstdint>
#include <vector>

#include "mvcone/cone_market.hpp"
#include "mvcone/policy.hpp"

namespace mvcone {

struct SimulationPlan {
  std::size_t n_paths = 100000;
  std::size_t n_steps = 256;
  std::uint64_t seed = 0;
  std::size_t chunk_size = 4096;
  bool antithetic = false;
  /// Number of full trajectories kept in the result (the first ones).
  std::size_t stored_paths = 100;
  /// Worker threads; 0 means std::thread::hardware_concurrency().
  unsigned threads = 0;

  void validate() const;
  /// Noise for (path, step): a standard normal, shared by every quantity
  /// simulated on that path.
  double shock(std::uint64_t path, std::uint32_t step) const;
};

/// Uniform grid t_i = T * i / n_steps.
std::vector<double> time_grid(double horizon, std::size_t n_steps);

struct DensitySample {
  std::vector<double> times;
  std::vector<double> terminal;  // phi(T) for every path
  /// First stored_paths trajectories, row-major [path][time].
  std::vector<double> stored;
  std::size_t stored_count = 0;
};

/// Exact lognormal stepping of the state-price density.
DensitySample simulate_phi(const SimulationPlan& plan, const EffectiveMarket& market);

struct MomentEstimate {
  double mean = 0.0;
  double mean_se = 0.0;
  double var = 0.0;
  double var_se = 0.0;
};

/// Sample mean / variance with standard errors; deterministic summation order.
MomentEstimate estimate_moments(const std::vector<double>& x);

struct WealthPathSet {
  std::vector<double> times;
  std::size_t asset_count = 0;
  std::size_t stored_count = 0;
  /// Stored trajectories, row-major [path][time] (portfolio: [path][time][asset]).
  std::vector<double> phi;
  std::vector<double> wealth;
  std::vector<double> portfolio;

  std::vector<double> terminal_wealth;  // every path
  std::vector<double> terminal_phi;     // every path
  /// Monte Carlo estimate of E[phi(t) X*(t)] on the grid (budget martingale).
  std::vector<double> priced_wealth;

  MomentEstimate terminal;
  double min_wealth = 0.0;             // over all paths and grid times
  double min_wealth_before_T = 0.0;    // over all paths, t < T
  double min_cone_slack = 0.0;         // min over paths, times, rows of C' pi*
  std::size_t paths_with_negative_wealth = 0;

  double stored_phi(std::size_t path, std::size_t step) const {
    return phi[path * times.size() + step];
  }
  double stored_wealth(std::size_t path, std::size_t step) const {
    return wealth[path * times.size() + step];
  }
};

/// Simulates phi, X* = f(t, phi) and pi* on the grid for every path.
WealthPathSet simulate_paths(const SimulationPlan& plan, const PolicyContext& context);

struct SdeReport {
  std::size_t n_steps = 0;
  std::vector<double> rms_by_time;  // RMS of Euler X - f(t, phi(t))
  double max_rms = 0.0;
  double terminal_rms = 0.0;  // Euler X(T) against the terminal payoff
};

/// Integrates the effective wealth SDE under the feedback policy with an
/// Euler scheme on discounted wealth, driven by the same shocks as phi, and
/// compares with the closed-form wealth.
SdeReport sde_consistency(const SimulationPlan& plan, const PolicyContext& context);

}  // namespace mvcone

#endif  // MVCONE_MONTE_CARLO_HPP
