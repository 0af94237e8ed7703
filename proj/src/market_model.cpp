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

#include "mvcone/market_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Eigenvalues>

#include "mvcone/error.hpp"

namespace mvcone {
namespace {

bool all_finite(const Eigen::MatrixXd& a) { return a.allFinite(); }

}  // namespace

Eigen::VectorXd MarketSegment::excess_return() const {
  return b - Eigen::VectorXd::Constant(b.size(), r);
}

MarketModel MarketModel::build(const MarketConfig& config) {
  if (config.m <= 0) {
    throw Error(ErrorCode::InvalidScenario, "asset count must be positive");
  }
  if (!(config.horizon > 0.0) || !std::isfinite(config.horizon)) {
    throw Error(ErrorCode::BadSchedule, "horizon must be positive and finite");
  }
  if (!(config.x0 > 0.0) || !std::isfinite(config.x0)) {
    throw Error(ErrorCode::NonPositiveInitialWealth, "initial wealth must be > 0");
  }
  if (config.segments.empty()) {
    throw Error(ErrorCode::BadSchedule, "at least one segment is required");
  }
  if (!(config.eigen_floor > 0.0)) {
    throw Error(ErrorCode::InvalidScenario, "eigenvalue floor must be positive");
  }

  MarketModel model;
  model.m_ = config.m;
  model.horizon_ = config.horizon;
  model.x0_ = config.x0;
  model.eigen_floor_ = config.eigen_floor;
  model.delta_ = std::numeric_limits<double>::infinity();

  const auto m = static_cast<Eigen::Index>(config.m);
  double t_prev = 0.0;
  for (std::size_t i = 0; i < config.segments.size(); ++i) {
    const SegmentConfig& raw = config.segments[i];
    const std::string where = "segment " + std::to_string(i);
    if (!std::isfinite(raw.t_end) || !(raw.t_end > t_prev)) {
      throw Error(ErrorCode::BadSchedule, where + ": boundaries must be strictly increasing");
    }
    if (raw.b.size() != m || raw.sigma.rows() != m || raw.sigma.cols() != m) {
      throw Error(ErrorCode::InvalidScenario, where + ": coefficient dimensions do not match m");
    }
    if (!std::isfinite(raw.r) || !all_finite(raw.b) || !all_finite(raw.sigma)) {
      throw Error(ErrorCode::InvalidScenario, where + ": coefficients must be finite");
    }

    MarketSegment seg;
    seg.t_begin = t_prev;
    seg.t_end = raw.t_end;
    seg.r = raw.r;
    seg.b = raw.b;
    seg.sigma = raw.sigma;
    seg.gram = raw.sigma * raw.sigma.transpose();
    seg.gram = 0.5 * (seg.gram + seg.gram.transpose()).eval();

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(seg.gram, Eigen::EigenvaluesOnly);
    seg.min_eigenvalue = eig.eigenvalues().minCoeff();
    if (!(seg.min_eigenvalue >= config.eigen_floor)) {
      throw Error(ErrorCode::NonInvertibleVolatility,
                  where + ": smallest eigenvalue of sigma*sigma' is " +
                      std::to_string(seg.min_eigenvalue));
    }
    seg.gram_llt.compute(seg.gram);
    if (seg.gram_llt.info() != Eigen::Success ||
        seg.gram_llt.matrixLLT().diagonal().minCoeff() < std::sqrt(config.eigen_floor) * 1e-3) {
      throw Error(ErrorCode::NonInvertibleVolatility, where + ": Cholesky of sigma*sigma' failed");
    }
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(seg.sigma);
    seg.sigma_inv = lu.inverse();
    if (!seg.sigma_inv.allFinite()) {
      throw Error(ErrorCode::NonInvertibleVolatility, where + ": sigma is singular");
    }

    model.delta_ = std::min(model.delta_, seg.min_eigenvalue);
    model.segments_.push_back(std::move(seg));
    t_prev = raw.t_end;
  }

  if (std::abs(t_prev - config.horizon) > 1e-12 * config.horizon) {
    throw Error(ErrorCode::BadSchedule, "last segment must end at the horizon");
  }
  model.segments_.back().t_end = config.horizon;
  return model;
}

std::size_t MarketModel::segment_index(double t) const {
  auto it = std::upper_bound(segments_.begin(), segments_.end(), t,
                             [](double v, const MarketSegment& s) { return v < s.t_end; });
  if (it == segments_.end()) return segments_.size() - 1;
  return static_cast<std::size_t>(it - segments_.begin());
}

void MarketModel::check_interval(double t_a, double t_b) const {
  if (!(t_a >= 0.0) || !(t_b <= horizon_) || !(t_a <= t_b)) {
    throw Error(ErrorCode::OutOfRange, "interval [" + std::to_string(t_a) + ", " +
                                           std::to_string(t_b) + "] not inside [0, T]");
  }
}

double MarketModel::integrate_rate(double t_a, double t_b) const {
  return integrate_piecewise(t_a, t_b, [this](std::size_t i) { return segments_[i].r; });
}

MarketConfig MarketModel::config() const {
  MarketConfig out;
  out.m = m_;
  out.horizon = horizon_;
  out.x0 = x0_;
  out.eigen_floor = eigen_floor_;
  for (const auto& s : segments_) {
    out.segments.push_back(SegmentConfig{s.t_end, s.r, s.b, s.sigma});
  }
  return out;
}

}  // namespace mvcone
