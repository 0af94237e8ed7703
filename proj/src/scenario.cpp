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

#include "mvcone/scenario.hpp"

#include <fstream>
#include <initializer_list>
#include <set>
#include <string_view>

#include <fmt/format.h>

#include "mvcone/error.hpp"

namespace mvcone {
namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& what) { throw Error(ErrorCode::InvalidScenario, what); }

void reject_unknown(const json& j, std::string_view where, std::initializer_list<std::string_view> allowed) {
  if (!j.is_object()) fail(fmt::format("{} must be an object", where));
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (auto a : allowed) ok = ok || key == a;
    if (!ok) fail(fmt::format("unknown field '{}' in {}", key, where));
  }
}

const json& require(const json& j, const char* key, std::string_view where) {
  if (!j.contains(key)) fail(fmt::format("missing field '{}' in {}", key, where));
  return j.at(key);
}

double number(const json& j, std::string_view what) {
  if (!j.is_number()) fail(fmt::format("{} must be a number", what));
  return j.get<double>();
}

std::size_t count(const json& j, std::string_view what) {
  if (!j.is_number_unsigned()) fail(fmt::format("{} must be a non-negative integer", what));
  return j.get<std::size_t>();
}

Eigen::VectorXd vector(const json& j, std::string_view what) {
  if (!j.is_array()) fail(fmt::format("{} must be an array", what));
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = number(j[i], what);
  return v;
}

Eigen::MatrixXd matrix(const json& j, std::string_view what) {
  if (!j.is_array() || j.empty()) fail(fmt::format("{} must be a non-empty array of rows", what));
  const std::size_t cols = j[0].is_array() ? j[0].size() : 0;
  Eigen::MatrixXd a(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < j.size(); ++r) {
    if (!j[r].is_array() || j[r].size() != cols) fail(fmt::format("{} rows must have equal length", what));
    for (std::size_t c = 0; c < cols; ++c) {
      a(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = number(j[r][c], what);
    }
  }
  return a;
}

json to_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

json to_json(const Eigen::MatrixXd& a) {
  json out = json::array();
  for (Eigen::Index r = 0; r < a.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < a.cols(); ++c) row.push_back(a(r, c));
    out.push_back(row);
  }
  return out;
}

ConeConstraint parse_cone(const json& j) {
  reject_unknown(j, "cone", {"kind", "C"});
  const json& kind = require(j, "kind", "cone");
  if (!kind.is_string()) fail("cone.kind must be a string");
  const auto k = kind.get<std::string>();
  if (k == "unconstrained" || k == "no_shorting") {
    if (j.contains("C")) fail("cone.C is only allowed for kind 'general'");
    return k == "unconstrained" ? ConeConstraint::unconstrained() : ConeConstraint::no_shorting();
  }
  if (k != "general") fail(fmt::format("unknown cone kind '{}'", k));
  const json& c = require(j, "C", "cone");
  // A list of matrices gives one per segment; a single matrix applies to all.
  if (c.is_array() && !c.empty() && c[0].is_array() && !c[0].empty() && c[0][0].is_array()) {
    std::vector<Eigen::MatrixXd> per;
    for (const auto& m : c) per.push_back(matrix(m, "cone.C"));
    return ConeConstraint::general(std::move(per));
  }
  return ConeConstraint::general(matrix(c, "cone.C"));
}

json cone_json(const ConeConstraint& cone) {
  switch (cone.kind()) {
    case ConeConstraint::Kind::Unconstrained: return {{"kind", "unconstrained"}};
    case ConeConstraint::Kind::NoShorting: return {{"kind", "no_shorting"}};
    case ConeConstraint::Kind::General: break;
  }
  const auto& ms = cone.general_matrices();
  if (ms.size() == 1) return {{"kind", "general"}, {"C", to_json(ms.front())}};
  json all = json::array();
  for (const auto& m : ms) all.push_back(to_json(m));
  return {{"kind", "general"}, {"C", all}};
}

}  // namespace

SimulationPlan SimulateSettings::plan() const {
  SimulationPlan p;
  p.n_paths = paths;
  p.n_steps = steps;
  p.seed = seed;
  p.chunk_size = chunk_size;
  p.antithetic = antithetic;
  p.stored_paths = stored_paths;
  return p;
}

bool operator==(const Scenario& a, const Scenario& b) {
  if (a.market.m != b.market.m || a.market.horizon != b.market.horizon ||
      a.market.x0 != b.market.x0 || a.market.eigen_floor != b.market.eigen_floor ||
      a.market.segments.size() != b.market.segments.size()) {
    return false;
  }
  for (std::size_t i = 0; i < a.market.segments.size(); ++i) {
    const auto& x = a.market.segments[i];
    const auto& y = b.market.segments[i];
    if (x.t_end != y.t_end || x.r != y.r || x.b.size() != y.b.size() || x.b != y.b ||
        x.sigma.rows() != y.sigma.rows() || x.sigma.cols() != y.sigma.cols() || x.sigma != y.sigma) {
      return false;
    }
  }
  return a.cone == b.cone && a.d == b.d && a.bankruptcy_prohibited == b.bankruptcy_prohibited &&
         a.simulate == b.simulate && a.frontier == b.frontier && a.hjb == b.hjb;
}

Scenario parse_scenario(const json& j) {
  reject_unknown(j, "scenario", {"m", "T", "x0", "eigen_floor", "segments", "cone", "objective",
                                 "bankruptcy_prohibited", "simulate", "frontier", "hjb"});
  Scenario s;
  const json& m = require(j, "m", "scenario");
  if (!m.is_number_integer() || m.get<long>() <= 0) fail("m must be a positive integer");
  s.market.m = m.get<int>();
  s.market.horizon = number(require(j, "T", "scenario"), "T");
  s.market.x0 = number(require(j, "x0", "scenario"), "x0");
  if (j.contains("eigen_floor")) s.market.eigen_floor = number(j["eigen_floor"], "eigen_floor");

  const json& segs = require(j, "segments", "scenario");
  if (!segs.is_array() || segs.empty()) fail("segments must be a non-empty array");
  for (const auto& seg : segs) {
    reject_unknown(seg, "segment", {"t_end", "r", "b", "sigma"});
    SegmentConfig sc;
    sc.t_end = number(require(seg, "t_end", "segment"), "t_end");
    sc.r = number(require(seg, "r", "segment"), "r");
    sc.b = vector(require(seg, "b", "segment"), "b");
    sc.sigma = matrix(require(seg, "sigma", "segment"), "sigma");
    s.market.segments.push_back(std::move(sc));
  }

  if (j.contains("cone")) s.cone = parse_cone(j["cone"]);

  const json& obj = require(j, "objective", "scenario");
  reject_unknown(obj, "objective", {"d"});
  s.d = number(require(obj, "d", "objective"), "objective.d");

  if (j.contains("bankruptcy_prohibited")) {
    if (!j["bankruptcy_prohibited"].is_boolean()) fail("bankruptcy_prohibited must be a boolean");
    s.bankruptcy_prohibited = j["bankruptcy_prohibited"].get<bool>();
  }

  if (j.contains("simulate")) {
    const json& sim = j["simulate"];
    reject_unknown(sim, "simulate", {"paths", "steps", "seed", "chunk_size", "antithetic", "stored_paths"});
    if (sim.contains("paths")) s.simulate.paths = count(sim["paths"], "simulate.paths");
    if (sim.contains("steps")) s.simulate.steps = count(sim["steps"], "simulate.steps");
    if (sim.contains("seed")) {
      if (!sim["seed"].is_number_unsigned()) fail("simulate.seed must be an unsigned integer");
      s.simulate.seed = sim["seed"].get<std::uint64_t>();
    }
    if (sim.contains("chunk_size")) s.simulate.chunk_size = count(sim["chunk_size"], "simulate.chunk_size");
    if (sim.contains("antithetic")) {
      if (!sim["antithetic"].is_boolean()) fail("simulate.antithetic must be a boolean");
      s.simulate.antithetic = sim["antithetic"].get<bool>();
    }
    if (sim.contains("stored_paths")) {
      s.simulate.stored_paths = count(sim["stored_paths"], "simulate.stored_paths");
    }
  }

  if (j.contains("frontier")) {
    const json& f = j["frontier"];
    reject_unknown(f, "frontier", {"d_min", "d_max", "points"});
    if (f.contains("d_min")) s.frontier.d_min = number(f["d_min"], "frontier.d_min");
    if (f.contains("d_max")) s.frontier.d_max = number(f["d_max"], "frontier.d_max");
    if (f.contains("points")) s.frontier.points = count(f["points"], "frontier.points");
  }

  if (j.contains("hjb")) {
    const json& h = j["hjb"];
    reject_unknown(h, "hjb", {"c", "grid", "time_steps", "stride"});
    if (h.contains("c")) s.hjb.c = number(h["c"], "hjb.c");
    if (h.contains("grid")) s.hjb.grid = count(h["grid"], "hjb.grid");
    if (h.contains("time_steps")) s.hjb.time_steps = count(h["time_steps"], "hjb.time_steps");
    if (h.contains("stride")) s.hjb.stride = count(h["stride"], "hjb.stride");
  }
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(fmt::format("cannot open scenario file '{}'", path));
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    fail(fmt::format("scenario '{}' is not valid JSON: {}", path, e.what()));
  }
  return parse_scenario(j);
}

json to_json(const Scenario& s) {
  json segs = json::array();
  for (const auto& seg : s.market.segments) {
    segs.push_back({{"t_end", seg.t_end}, {"r", seg.r}, {"b", to_json(seg.b)},
                    {"sigma", to_json(seg.sigma)}});
  }
  json frontier = {{"points", s.frontier.points}};
  if (s.frontier.d_min) frontier["d_min"] = *s.frontier.d_min;
  if (s.frontier.d_max) frontier["d_max"] = *s.frontier.d_max;
  json hjb = {{"grid", s.hjb.grid}, {"time_steps", s.hjb.time_steps}, {"stride", s.hjb.stride}};
  if (s.hjb.c) hjb["c"] = *s.hjb.c;
  return {
      {"m", s.market.m},
      {"T", s.market.horizon},
      {"x0", s.market.x0},
      {"eigen_floor", s.market.eigen_floor},
      {"segments", segs},
      {"cone", cone_json(s.cone)},
      {"objective", {{"d", s.d}}},
      {"bankruptcy_prohibited", s.bankruptcy_prohibited},
      {"simulate",
       {{"paths", s.simulate.paths},
        {"steps", s.simulate.steps},
        {"seed", s.simulate.seed},
        {"chunk_size", s.simulate.chunk_size},
        {"antithetic", s.simulate.antithetic},
        {"stored_paths", s.simulate.stored_paths}}},
      {"frontier", frontier},
      {"hjb", hjb},
  };
}

std::string scenario_hash(const Scenario& s) {
  const std::string text = to_json(s).dump();
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  return fmt::format("{:016x}", h);
}

}  // namespace mvcone
