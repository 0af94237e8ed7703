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

#include "mvcone/cli.hpp"

#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include "mvcone/error.hpp"
#include "mvcone/frontier.hpp"
#include "mvcone/hjb.hpp"
#include "mvcone/monte_carlo.hpp"

namespace mvcone {
namespace {

using nlohmann::json;

json vec_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::InvalidScenario, fmt::format("cannot write '{}'", path));
  return f;
}

void write_json(const std::string& path, const json& j) {
  auto f = open_output(path);
  f << j.dump(2) << '\n';
}

std::string moments_path(const std::string& paths_csv) {
  std::filesystem::path p(paths_csv);
  p.replace_extension(".moments.json");
  return p.string();
}

struct Common {
  std::string config;
  std::string out;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--config", c.config, "Scenario JSON file")->required();
  sub->add_option("--out", c.out, "Output file");
}

int cmd_solve(const Common& c, bool dump_config, std::ostream& out) {
  const Scenario s = load_scenario(c.config);
  if (dump_config) {
    out << to_json(s).dump(2) << '\n';
    return kExitOk;
  }
  const SolveSummary sum = solve_scenario(s);
  const json j = summary_json(s, sum);
  fmt::print(out, "scenario {}  variant {}\n", scenario_hash(s), to_string(s.variant()));
  fmt::print(out, "I_r = {:.6g}  I_theta = {:.6g}\n", sum.inputs.rate_integral,
             sum.inputs.theta_sq_integral);
  fmt::print(out, "mu = {:.6g}  gamma = {:.6g}  ({})\n", sum.pair.mu, sum.pair.gamma,
             to_string(sum.pair.provenance));
  fmt::print(out, "variance = {:.6g}\n", sum.variance);
  if (c.out.empty()) {
    out << j.dump(2) << '\n';
  } else {
    write_json(c.out, j);
  }
  return kExitOk;
}

struct FrontierFlags {
  std::optional<double> d_min, d_max;
  std::optional<std::size_t> points;
};

int cmd_frontier(const Common& c, const FrontierFlags& f, std::ostream& out) {
  Scenario s = load_scenario(c.config);
  if (f.d_min) s.frontier.d_min = f.d_min;
  if (f.d_max) s.frontier.d_max = f.d_max;
  if (f.points) s.frontier.points = *f.points;

  const auto market = effective_market(s);
  const FrontierInputs inputs = frontier_inputs(*market);
  std::vector<double> grid;
  if (s.frontier.d_min || s.frontier.d_max) {
    grid = linear_grid(s.frontier.d_min.value_or(inputs.risk_free_terminal()),
                       s.frontier.d_max.value_or(2.0 * inputs.risk_free_terminal()),
                       s.frontier.points);
  } else {
    grid = default_grid(inputs, s.frontier.points);
  }
  const auto points = compute_frontier(inputs, grid, s.variant());

  std::string text = fmt::format("# scenario={}\nd,variance,mu,gamma\n", scenario_hash(s));
  for (const auto& p : points) {
    text += fmt::format("{:.17g},{:.17g},{:.17g},{:.17g}\n", p.d, p.variance, p.mu, p.gamma);
  }
  if (c.out.empty()) {
    out << text;
  } else {
    auto file = open_output(c.out);
    file << text;
  }

  const ShapeReport shape = check_shape(points, inputs.risk_free_terminal());
  fmt::print(out, "{} frontier points, min slope {:.6g}, min curvature {:.6g}\n", shape.points,
             shape.min_first_difference, shape.min_second_difference);
  return kExitOk;
}

struct SimulateFlags {
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> paths, steps, chunk_size;
  unsigned threads = 0;
};

int cmd_simulate(const Common& c, const SimulateFlags& f, std::ostream& out) {
  Scenario s = load_scenario(c.config);
  if (f.seed) s.simulate.seed = *f.seed;
  if (f.paths) s.simulate.paths = *f.paths;
  if (f.steps) s.simulate.steps = *f.steps;
  if (f.chunk_size) s.simulate.chunk_size = *f.chunk_size;
  if (c.out.empty()) throw Error(ErrorCode::InvalidScenario, "simulate requires --out");

  SimulationPlan plan = s.simulate.plan();
  plan.threads = f.threads;
  plan.validate();

  const auto market = effective_market(s);
  const PolicyContext ctx(market, lagrange_pair(s, *market), s.variant());
  const WealthPathSet set = simulate_paths(plan, ctx);
  const std::string hash = scenario_hash(s);

  {
    auto file = open_output(c.out);
    std::string header = "path,t,phi,X";
    for (std::size_t a = 1; a <= set.asset_count; ++a) header += fmt::format(",pi_{}", a);
    fmt::print(file, "# scenario={} seed={}\n{}\n", hash, plan.seed, header);
    const std::size_t nt = set.times.size();
    for (std::size_t p = 0; p < set.stored_count; ++p) {
      for (std::size_t i = 0; i < nt; ++i) {
        std::string line = fmt::format("{},{:.17g},{:.17g},{:.17g}", p, set.times[i],
                                       set.stored_phi(p, i), set.stored_wealth(p, i));
        const double* pi = &set.portfolio[(p * nt + i) * set.asset_count];
        for (std::size_t a = 0; a < set.asset_count; ++a) line += fmt::format(",{:.17g}", pi[a]);
        line += '\n';
        file << line;
      }
    }
  }

  const json moments = {
      {"scenario_hash", hash},
      {"seed", plan.seed},
      {"paths", plan.n_paths},
      {"steps", plan.n_steps},
      {"mean", set.terminal.mean},
      {"mean_se", set.terminal.mean_se},
      {"var", set.terminal.var},
      {"var_se", set.terminal.var_se},
      {"min_wealth", set.min_wealth},
      {"paths_with_negative_wealth", set.paths_with_negative_wealth},
  };
  write_json(moments_path(c.out), moments);

  fmt::print(out, "mean = {:.6g} +/- {:.6g}  var = {:.6g} +/- {:.6g}  min wealth = {:.6g}\n",
             set.terminal.mean, set.terminal.mean_se, set.terminal.var, set.terminal.var_se,
             set.min_wealth);
  return kExitOk;
}

struct HjbFlags {
  std::optional<double> c;
  std::optional<std::size_t> grid, time_steps, stride;
  std::string surface;
};

int cmd_hjb(const Common& c, const HjbFlags& f, std::ostream& out) {
  Scenario s = load_scenario(c.config);
  if (f.c) s.hjb.c = f.c;
  if (f.grid) s.hjb.grid = *f.grid;
  if (f.time_steps) s.hjb.time_steps = *f.time_steps;
  if (f.stride) s.hjb.stride = *f.stride;
  if (!s.hjb.c) throw Error(ErrorCode::InvalidScenario, "hjb-check needs a cap c (hjb.c or --c)");

  HjbProblem problem;
  problem.c = *s.hjb.c;
  problem.market = effective_market(s);
  problem.grid = s.hjb.grid;
  problem.time_steps = s.hjb.time_steps;

  const HjbSolution fd = solve_hjb_fd(problem);
  const AnalyticValue exact = analytic_value(problem.c, problem.market->x0(),
                                             problem.market->total_rate(),
                                             problem.market->total_theta_sq());
  const HjbComparison cmp = compare(fd, exact);

  const auto& dg = fd.diagnostics;
  const json report = {
      {"scenario_hash", scenario_hash(s)},
      {"c", problem.c},
      {"grid", problem.grid},
      {"time_steps", problem.time_steps},
      {"fd_value", cmp.fd_value},
      {"analytic_value", cmp.analytic_value},
      {"absolute_gap", cmp.absolute_gap},
      {"relative_gap", cmp.relative_gap},
      {"analytic_gamma", exact.gamma},
      {"diagnostics",
       {{"floor_activations", dg.floor_activations},
        {"unconverged_steps", dg.unconverged_steps},
        {"max_iterations_used", dg.max_iterations_used},
        {"worst_fixed_point_change", dg.worst_fixed_point_change},
        {"min_second_difference", dg.min_second_difference},
        {"upwinded_nodes", dg.upwinded_nodes}}},
  };
  if (c.out.empty()) {
    out << report.dump(2) << '\n';
  } else {
    write_json(c.out, report);
  }
  if (!f.surface.empty()) {
    auto file = open_output(f.surface);
    fd.write_surface(file, s.hjb.stride);
  }
  fmt::print(out, "v(0, x0): fd {:.6g}  analytic {:.6g}  relative gap {:.6g}\n", cmp.fd_value,
             cmp.analytic_value, cmp.relative_gap);
  return kExitOk;
}

}  // namespace

std::shared_ptr<const EffectiveMarket> effective_market(const Scenario& s) {
  return std::make_shared<const EffectiveMarket>(MarketModel::build(s.market), s.cone);
}

MomentInputs moment_inputs(const EffectiveMarket& market, double d) {
  return {d, market.x0(), market.total_rate(), market.total_theta_sq()};
}

LagrangePair lagrange_pair(const Scenario& s, const EffectiveMarket& market) {
  const MomentInputs in = moment_inputs(market, s.d);
  return s.bankruptcy_prohibited ? solve_mu_gamma(in) : closed_form_mu_gamma(in);
}

SolveSummary solve_scenario(const Scenario& s) {
  SolveSummary sum;
  sum.market = effective_market(s);
  sum.inputs = moment_inputs(*sum.market, s.d);
  sum.pair = lagrange_pair(s, *sum.market);
  sum.variance = terminal_variance(sum.pair, sum.inputs, s.bankruptcy_prohibited);
  const PolicyContext ctx(sum.market, sum.pair, s.variant());
  sum.wealth_at_origin = ctx.wealth(0.0, 1.0);
  sum.portfolio_at_origin = ctx.portfolio_scale(0.0, 1.0) * ctx.direction(0.0);
  return sum;
}

json summary_json(const Scenario& s, const SolveSummary& sum) {
  const EffectiveMarket& m = *sum.market;
  json segs = json::array();
  for (std::size_t i = 0; i < m.segments().size(); ++i) {
    const auto& seg = m.segment(i);
    const auto& raw = m.market().segment(i);
    segs.push_back({{"t_begin", raw.t_begin},
                    {"t_end", raw.t_end},
                    {"z_bar", vec_json(seg.z_bar)},
                    {"lambda", vec_json(seg.lambda)},
                    {"B_hat", vec_json(seg.b_hat)},
                    {"theta_hat", vec_json(seg.theta_hat)},
                    {"theta_sq", seg.theta_sq}});
  }
  return {
      {"scenario_hash", scenario_hash(s)},
      {"seed", s.simulate.seed},
      {"variant", std::string(to_string(s.variant()))},
      {"d", s.d},
      {"x0", m.x0()},
      {"effective_market", {{"segments", segs}, {"degenerate", m.degenerate()}}},
      {"I_r", sum.inputs.rate_integral},
      {"I_theta", sum.inputs.theta_sq_integral},
      {"risk_free_terminal", sum.inputs.risk_free_terminal()},
      {"mu", sum.pair.mu},
      {"gamma", sum.pair.gamma},
      {"provenance", std::string(to_string(sum.pair.provenance))},
      {"mean_residual", sum.pair.mean_residual},
      {"budget_residual", sum.pair.budget_residual},
      {"variance", sum.variance},
      {"policy_at_origin", {{"wealth", sum.wealth_at_origin}, {"portfolio", vec_json(sum.portfolio_at_origin)}}},
  };
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Mean-variance portfolio selection under cone constraints", "mvcone"};
  app.require_subcommand(1);

  Common common;
  bool dump_config = false;
  FrontierFlags ff;
  SimulateFlags sf;
  HjbFlags hf;

  auto* solve = app.add_subcommand("solve", "Solve for the Lagrange pair and report the optimum");
  add_common(solve, common);
  solve->add_flag("--dump-config", dump_config, "Print the canonical scenario and exit");

  auto* frontier = app.add_subcommand("frontier", "Tabulate the efficient frontier");
  add_common(frontier, common);
  frontier->add_option("--d-min", ff.d_min, "Smallest target mean");
  frontier->add_option("--d-max", ff.d_max, "Largest target mean");
  frontier->add_option("--points", ff.points, "Number of grid points");

  auto* simulate = app.add_subcommand("simulate", "Monte Carlo simulation of the optimal policy");
  add_common(simulate, common);
  simulate->add_option("--seed", sf.seed, "Random seed");
  simulate->add_option("--paths", sf.paths, "Number of paths");
  simulate->add_option("--steps", sf.steps, "Time steps");
  simulate->add_option("--chunk-size", sf.chunk_size, "Paths per work unit");
  simulate->add_option("--threads", sf.threads, "Worker threads (0 = all cores)");

  auto* hjb = app.add_subcommand("hjb-check", "Finite-difference value function check");
  add_common(hjb, common);
  hjb->add_option("--c", hf.c, "Terminal cap c");
  hjb->add_option("--grid", hf.grid, "Spatial intervals");
  hjb->add_option("--time-steps", hf.time_steps, "Time steps");
  hjb->add_option("--stride", hf.stride, "Surface output stride");
  hjb->add_option("--surface", hf.surface, "Write the value surface as CSV");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  if (!reversed.empty()) reversed.pop_back();
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInvalid;
  }

  try {
    if (*solve) return cmd_solve(common, dump_config, out);
    if (*frontier) return cmd_frontier(common, ff, out);
    if (*simulate) return cmd_simulate(common, sf, out);
    return cmd_hjb(common, hf, out);
  } catch (const Error& e) {
    fmt::print(err, "error [{}]: {}\n", to_string(e.code()), e.what());
    return is_validation_error(e.code()) ? kExitInvalid : kExitNumerical;
  } catch (const json::exception& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kExitInvalid;
  }
}

}  // namespace mvcone
