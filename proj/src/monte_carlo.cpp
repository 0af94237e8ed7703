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

#include "mvcone/monte_carlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

#include "mvcone/error.hpp"
#include "mvcone/rng.hpp"
#include "mvcone/simd/kernels.hpp"

namespace mvcone {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct StepCoefficients {
  double growth = 1.0;   // exp(int r) over the step
  double drift = 0.0;    // int (r + |theta|^2 / 2)
  double variance = 0.0; // int |theta|^2
  double vol = 0.0;      // sqrt(variance)
};

std::vector<StepCoefficients> step_coefficients(const EffectiveMarket& market,
                                                const std::vector<double>& times) {
  std::vector<StepCoefficients> out(times.size() - 1);
  for (std::size_t i = 0; i + 1 < times.size(); ++i) {
    const double rate = market.rate_integral(times[i], times[i + 1]);
    const double var = std::max(0.0, market.theta_sq_integral(times[i], times[i + 1]));
    out[i] = {std::exp(rate), rate + 0.5 * var, var, std::sqrt(var)};
  }
  return out;
}

// Runs fn(chunk) for every chunk on a small pool. Chunks write disjoint
// output, so the schedule cannot change results.
template <class Fn>
void for_each_chunk(std::size_t n_chunks, unsigned threads, Fn&& fn) {
  unsigned workers = threads != 0 ? threads : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, n_chunks));
  if (workers <= 1) {
    for (std::size_t c = 0; c < n_chunks; ++c) fn(c);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t c = next++; c < n_chunks; c = next++) {
          try {
            fn(c);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
          }
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
}

std::size_t chunk_count(const SimulationPlan& plan) {
  return (plan.n_paths + plan.chunk_size - 1) / plan.chunk_size;
}

void fill_shocks(const SimulationPlan& plan, std::size_t first_path, std::uint32_t step,
                 std::vector<double>& z) {
  for (std::size_t j = 0; j < z.size(); ++j) z[j] = plan.shock(first_path + j, step);
}

}  // namespace

void SimulationPlan::validate() const {
  if (n_paths == 0 || n_steps == 0 || chunk_size == 0) {
    throw Error(ErrorCode::InvalidScenario, "paths, steps and chunk size must be positive");
  }
  if (n_steps > std::numeric_limits<std::uint32_t>::max()) {
    throw Error(ErrorCode::InvalidScenario, "too many time steps");
  }
}

double SimulationPlan::shock(std::uint64_t path, std::uint32_t step) const {
  const CounterRng rng(seed);
  if (!antithetic) return rng.normal(path, step);
  const double z = rng.normal(path / 2, step);
  return (path & 1u) ? -z : z;
}

std::vector<double> time_grid(double horizon, std::size_t n_steps) {
  std::vector<double> t(n_steps + 1);
  for (std::size_t i = 0; i <= n_steps; ++i) {
    t[i] = horizon * static_cast<double>(i) / static_cast<double>(n_steps);
  }
  t.back() = horizon;
  return t;
}

DensitySample simulate_phi(const SimulationPlan& plan, const EffectiveMarket& market) {
  plan.validate();
  DensitySample out;
  out.times = time_grid(market.horizon(), plan.n_steps);
  const auto coef = step_coefficients(market, out.times);
  const std::size_t n_times = out.times.size();
  out.terminal.assign(plan.n_paths, 0.0);
  out.stored_count = std::min(plan.stored_paths, plan.n_paths);
  out.stored.assign(out.stored_count * n_times, 0.0);

  for_each_chunk(chunk_count(plan), plan.threads, [&](std::size_t chunk) {
    const std::size_t first = chunk * plan.chunk_size;
    const std::size_t n = std::min(plan.chunk_size, plan.n_paths - first);
    std::vector<double> log_phi(n, 0.0), z(n);
    auto store = [&](std::size_t step) {
      for (std::size_t j = 0; j < n && first + j < out.stored_count; ++j) {
        out.stored[(first + j) * n_times + step] = std::exp(log_phi[j]);
      }
    };
    store(0);
    for (std::size_t i = 0; i + 1 < n_times; ++i) {
      fill_shocks(plan, first, static_cast<std::uint32_t>(i), z);
      simd::log_density_step(log_phi, z, coef[i].drift, coef[i].vol);
      store(i + 1);
    }
    for (std::size_t j = 0; j < n; ++j) out.terminal[first + j] = std::exp(log_phi[j]);
  });
  return out;
}

MomentEstimate estimate_moments(const std::vector<double>& x) {
  MomentEstimate est;
  const std::size_t n = x.size();
  if (n == 0) return est;
  const double count = static_cast<double>(n);
  est.mean = simd::sum(x).total() / count;
  if (n < 2) return est;
  simd::LaneSums second, fourth;
  simd::kernels().centered_powers(x.data(), n, est.mean, &second, &fourth);
  const double m2 = second.total() / count;
  const double m4 = fourth.total() / count;
  est.var = second.total() / (count - 1.0);
  est.mean_se = std::sqrt(est.var / count);
  est.var_se = std::sqrt(std::max(0.0, m4 - m2 * m2) / count);
  return est;
}

WealthPathSet simulate_paths(const SimulationPlan& plan, const PolicyContext& context) {
  plan.validate();
  const EffectiveMarket& market = context.market();
  const auto& mkt = market.market();
  const bool prohibited = context.variant() == Variant::BankruptcyProhibited;
  const LagrangePair& pair = context.pair();

  WealthPathSet out;
  out.times = time_grid(market.horizon(), plan.n_steps);
  const std::size_t n_times = out.times.size();
  const auto coef = step_coefficients(market, out.times);
  const auto m = static_cast<std::size_t>(mkt.asset_count());
  out.asset_count = m;
  out.stored_count = std::min(plan.stored_paths, plan.n_paths);
  out.phi.assign(out.stored_count * n_times, 0.0);
  out.wealth.assign(out.stored_count * n_times, 0.0);
  out.portfolio.assign(out.stored_count * n_times * m, 0.0);
  out.terminal_wealth.assign(plan.n_paths, 0.0);
  out.terminal_phi.assign(plan.n_paths, 0.0);

  std::vector<PolicySlice> slices;
  std::vector<const Eigen::VectorXd*> directions;
  std::vector<double> cone_floor;  // min_j (C' direction)_j, +inf when k = 0
  for (double t : out.times) {
    slices.push_back(context.slice(t));
    directions.push_back(&context.direction(t));
    const Eigen::MatrixXd& c = market.constraint(mkt.segment_index(t));
    cone_floor.push_back(c.cols() == 0 ? kInf : (c.transpose() * *directions.back()).minCoeff());
  }

  struct ChunkStats {
    double min_wealth = kInf;
    double min_before_T = kInf;
    double min_slack = kInf;
    std::size_t negative_paths = 0;
    std::vector<double> priced;
  };
  const std::size_t n_chunks = chunk_count(plan);
  std::vector<ChunkStats> stats(n_chunks);

  for_each_chunk(n_chunks, plan.threads, [&](std::size_t chunk) {
    const std::size_t first = chunk * plan.chunk_size;
    const std::size_t n = std::min(plan.chunk_size, plan.n_paths - first);
    ChunkStats& st = stats[chunk];
    st.priced.assign(n_times, 0.0);
    std::vector<double> log_phi(n, 0.0), phi(n, 1.0), z(n), wealth(n), scale(n);
    std::vector<char> went_negative(n, 0);

    auto record = [&](std::size_t step) {
      const bool final_step = step + 1 == n_times;
      for (std::size_t j = 0; j < n; ++j) {
        const double x = wealth[j];
        st.min_wealth = std::min(st.min_wealth, x);
        if (!final_step) st.min_before_T = std::min(st.min_before_T, x);
        if (x < 0.0) went_negative[j] = 1;
        if (cone_floor[step] != kInf) {
          st.min_slack = std::min(st.min_slack, scale[j] * cone_floor[step]);
        }
        st.priced[step] += phi[j] * x;
        const std::size_t path = first + j;
        if (path < out.stored_count) {
          const std::size_t at = path * n_times + step;
          out.phi[at] = phi[j];
          out.wealth[at] = x;
          for (std::size_t a = 0; a < m; ++a) {
            out.portfolio[at * m + a] = scale[j] * (*directions[step])[static_cast<Eigen::Index>(a)];
          }
        }
      }
    };

    const PolicyValue start = context.evaluate(slices[0], 1.0);
    std::fill(wealth.begin(), wealth.end(), start.wealth);
    std::fill(scale.begin(), scale.end(), start.scale);
    record(0);

    for (std::size_t i = 0; i + 1 < n_times; ++i) {
      fill_shocks(plan, first, static_cast<std::uint32_t>(i), z);
      simd::log_density_step(log_phi, z, coef[i].drift, coef[i].vol);
      for (std::size_t j = 0; j < n; ++j) phi[j] = std::exp(log_phi[j]);
      const PolicySlice& s = slices[i + 1];
      if (i + 2 == n_times) {
        if (prohibited) {
          simd::floored_payoff(phi, wealth, pair.mu, pair.gamma);
        } else {
          simd::linear_payoff(phi, wealth, pair.mu, pair.gamma);
        }
        for (std::size_t j = 0; j < n; ++j) scale[j] = context.evaluate(s, phi[j]).scale;
      } else {
        for (std::size_t j = 0; j < n; ++j) {
          const PolicyValue v = context.evaluate(s, phi[j]);
          wealth[j] = v.wealth;
          scale[j] = v.scale;
        }
      }
      record(i + 1);
    }
    for (std::size_t j = 0; j < n; ++j) {
      out.terminal_wealth[first + j] = wealth[j];
      out.terminal_phi[first + j] = phi[j];
      st.negative_paths += went_negative[j] ? 1 : 0;
    }
  });

  out.min_wealth = kInf;
  out.min_wealth_before_T = kInf;
  out.min_cone_slack = kInf;
  out.priced_wealth.assign(n_times, 0.0);
  for (const ChunkStats& st : stats) {
    out.min_wealth = std::min(out.min_wealth, st.min_wealth);
    out.min_wealth_before_T = std::min(out.min_wealth_before_T, st.min_before_T);
    out.min_cone_slack = std::min(out.min_cone_slack, st.min_slack);
    out.paths_with_negative_wealth += st.negative_paths;
    for (std::size_t i = 0; i < n_times; ++i) out.priced_wealth[i] += st.priced[i];
  }
  for (double& v : out.priced_wealth) v /= static_cast<double>(plan.n_paths);
  out.terminal = estimate_moments(out.terminal_wealth);
  return out;
}

SdeReport sde_consistency(const SimulationPlan& plan, const PolicyContext& context) {
  plan.validate();
  const EffectiveMarket& market = context.market();
  const auto times = time_grid(market.horizon(), plan.n_steps);
  const std::size_t n_times = times.size();
  const auto coef = step_coefficients(market, times);
  std::vector<PolicySlice> slices;
  for (double t : times) slices.push_back(context.slice(t));

  const std::size_t n_chunks = chunk_count(plan);
  std::vector<std::vector<double>> sq_err(n_chunks);

  for_each_chunk(n_chunks, plan.threads, [&](std::size_t chunk) {
    const std::size_t first = chunk * plan.chunk_size;
    const std::size_t n = std::min(plan.chunk_size, plan.n_paths - first);
    auto& err = sq_err[chunk];
    err.assign(n_times, 0.0);
    std::vector<double> log_phi(n, 0.0), phi(n, 1.0), z(n), scale(n);
    std::vector<double> euler(n, context.evaluate(slices[0], 1.0).wealth);

    for (std::size_t i = 0; i + 1 < n_times; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        scale[j] = context.feedback_scale(slices[i], phi[j], euler[j]);
      }
      fill_shocks(plan, first, static_cast<std::uint32_t>(i), z);
      // dX = r X dt + s |theta|^2 dt + s theta'dW, rate part integrated exactly.
      simd::discounted_euler_step(euler, scale, z, coef[i].growth, coef[i].variance, coef[i].vol);
      simd::log_density_step(log_phi, z, coef[i].drift, coef[i].vol);
      for (std::size_t j = 0; j < n; ++j) {
        phi[j] = std::exp(log_phi[j]);
        const double exact = context.evaluate(slices[i + 1], phi[j]).wealth;
        const double e = euler[j] - exact;
        err[i + 1] += e * e;
      }
    }
  });

  SdeReport report;
  report.n_steps = plan.n_steps;
  report.rms_by_time.assign(n_times, 0.0);
  for (const auto& err : sq_err) {
    for (std::size_t i = 0; i < n_times; ++i) report.rms_by_time[i] += err[i];
  }
  for (double& v : report.rms_by_time) {
    v = std::sqrt(v / static_cast<double>(plan.n_paths));
    report.max_rms = std::max(report.max_rms, v);
  }
  report.terminal_rms = report.rms_by_time.back();
  return report;
}

}  // namespace mvcone
