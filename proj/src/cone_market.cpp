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

#include "mvcone/cone_market.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/QR>

#include "mvcone/error.hpp"

namespace mvcone {

ConeConstraint ConeConstraint::unconstrained() { return ConeConstraint{}; }

ConeConstraint ConeConstraint::no_shorting() {
  ConeConstraint c;
  c.kind_ = Kind::NoShorting;
  return c;
}

ConeConstraint ConeConstraint::general(Eigen::MatrixXd c) {
  return general(std::vector<Eigen::MatrixXd>{std::move(c)});
}

ConeConstraint ConeConstraint::general(std::vector<Eigen::MatrixXd> per_segment) {
  if (per_segment.empty()) {
    throw Error(ErrorCode::InvalidScenario, "general cone needs at least one matrix");
  }
  for (const auto& c : per_segment) {
    if (!c.allFinite()) throw Error(ErrorCode::InvalidScenario, "cone matrix must be finite");
  }
  ConeConstraint out;
  out.kind_ = Kind::General;
  out.matrices_ = std::move(per_segment);
  return out;
}

Eigen::MatrixXd ConeConstraint::matrix(std::size_t segment, int m) const {
  switch (kind_) {
    case Kind::Unconstrained:
      return Eigen::MatrixXd(m, 0);
    case Kind::NoShorting:
      return Eigen::MatrixXd::Identity(m, m);
    case Kind::General:
      break;
  }
  const auto& c = matrices_.size() == 1 ? matrices_.front() : matrices_.at(segment);
  if (c.rows() != m) {
    throw Error(ErrorCode::InvalidScenario,
                "cone matrix has " + std::to_string(c.rows()) + " rows, expected " +
                    std::to_string(m));
  }
  return c;
}

bool operator==(const ConeConstraint& a, const ConeConstraint& b) {
  if (a.kind_ != b.kind_ || a.matrices_.size() != b.matrices_.size()) return false;
  for (std::size_t i = 0; i < a.matrices_.size(); ++i) {
    const auto& x = a.matrices_[i];
    const auto& y = b.matrices_[i];
    if (x.rows() != y.rows() || x.cols() != y.cols() || x != y) return false;
  }
  return true;
}

namespace {

struct EqualitySolve {
  Eigen::VectorXd z;
  Eigen::VectorXd nu;  // one per working-set column
};

// min 0.5 z'Gz - B'z  s.t.  A'z = 0, via the null space of A'. A has full
// column rank by construction of the working set.
EqualitySolve solve_on_face(const Eigen::MatrixXd& gram, const Eigen::VectorXd& excess,
                            const Eigen::MatrixXd& a) {
  const Eigen::Index m = gram.rows();
  const Eigen::Index w = a.cols();
  EqualitySolve out;
  if (w == 0) {
    out.z = gram.llt().solve(excess);
    out.nu.resize(0);
    return out;
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
  const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(m, m);
  const Eigen::MatrixXd range = q.leftCols(w);
  const Eigen::MatrixXd null = q.rightCols(m - w);
  if (null.cols() > 0) {
    const Eigen::MatrixXd reduced = null.transpose() * gram * null;
    out.z = null * reduced.llt().solve(null.transpose() * excess);
  } else {
    out.z = Eigen::VectorXd::Zero(m);
  }
  // A nu = G z - B, solved through the triangular factor.
  const Eigen::MatrixXd r = qr.matrixQR().topRows(w).triangularView<Eigen::Upper>();
  const Eigen::VectorXd rhs = range.transpose() * (gram * out.z - excess);
  out.nu = r.triangularView<Eigen::Upper>().solve(rhs);
  return out;
}

}  // namespace

ProjectionResult project_cone(const Eigen::MatrixXd& gram, const Eigen::VectorXd& excess,
                              const Eigen::MatrixXd& c, const ProjectionOptions& options) {
  const Eigen::Index m = gram.rows();
  if (gram.cols() != m || excess.size() != m || (c.cols() > 0 && c.rows() != m)) {
    throw Error(ErrorCode::DomainError, "project_cone: dimension mismatch");
  }
  if (!gram.allFinite() || !excess.allFinite() || !c.allFinite()) {
    throw Error(ErrorCode::DomainError, "project_cone: inputs must be finite");
  }
  Eigen::LLT<Eigen::MatrixXd> llt(gram);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorCode::DomainError, "project_cone: gram matrix is not positive definite");
  }

  const Eigen::Index k = c.cols();
  ProjectionResult result;
  result.nu = Eigen::VectorXd::Zero(k);
  result.z = llt.solve(excess);
  if (k == 0 || (c.transpose() * result.z).minCoeff() >= -options.feasibility_tol) {
    return result;
  }

  // Primal active set from the apex z = 0, which is always feasible.
  std::vector<int> working;
  Eigen::VectorXd z = Eigen::VectorXd::Zero(m);
  const long guard = 10L * (1L << std::min<Eigen::Index>(k, 20));
  for (long iter = 1; iter <= guard; ++iter) {
    Eigen::MatrixXd a(m, static_cast<Eigen::Index>(working.size()));
    for (std::size_t j = 0; j < working.size(); ++j) a.col(j) = c.col(working[j]);
    const EqualitySolve face = solve_on_face(gram, excess, a);
    const Eigen::VectorXd step = face.z - z;

    double alpha = 1.0;
    int blocking = -1;
    for (int i = 0; i < k; ++i) {
      if (std::find(working.begin(), working.end(), i) != working.end()) continue;
      const double slope = c.col(i).dot(step);
      if (slope >= -1e-14 * (1.0 + step.norm()) * c.col(i).norm()) continue;
      const double slack = std::max(0.0, c.col(i).dot(z));
      const double a_i = slack / -slope;
      if (a_i < alpha) {
        alpha = a_i;
        blocking = i;
      }
    }

    if (blocking >= 0) {
      z += alpha * step;
      working.insert(std::upper_bound(working.begin(), working.end(), blocking), blocking);
      continue;
    }

    z = face.z;
    Eigen::Index drop = -1;
    double most_negative = -options.kkt_tol;
    for (Eigen::Index j = 0; j < face.nu.size(); ++j) {
      if (face.nu[j] < most_negative) {
        most_negative = face.nu[j];
        drop = j;
      }
    }
    if (drop < 0) {
      result.z = z;
      for (std::size_t j = 0; j < working.size(); ++j) result.nu[working[j]] = face.nu[j];
      result.active = working;
      result.iterations = static_cast<int>(iter);
      return result;
    }
    working.erase(working.begin() + drop);
  }
  throw Error(ErrorCode::QPNotConverged,
              "active-set iteration limit " + std::to_string(guard) + " reached");
}

Eigen::VectorXd no_shorting_dual_adjustment(const Eigen::MatrixXd& sigma_inv,
                                            const Eigen::VectorXd& excess) {
  // |sigma^{-1}(y + B)|^2 = (y + B)' H (y + B) with H = sigma^{-T} sigma^{-1}.
  const Eigen::MatrixXd h = sigma_inv.transpose() * sigma_inv;
  const Eigen::Index m = excess.size();
  return project_cone(h, -(h * excess), Eigen::MatrixXd::Identity(m, m)).z;
}

ScalingReport scaling_check(const Eigen::MatrixXd& gram, const Eigen::VectorXd& excess,
                            const Eigen::MatrixXd& c, double alpha, double tol) {
  if (!(alpha > 0.0)) throw Error(ErrorCode::DomainError, "alpha must be positive");
  const Eigen::VectorXd base = project_cone(gram, excess, c).z;
  const Eigen::VectorXd scaled = project_cone(gram, alpha * excess, c).z;

  ScalingReport report;
  report.alpha = alpha;
  report.solution = scaled;
  report.expected_solution = alpha * base;
  report.value = 0.5 * scaled.dot(gram * scaled) - alpha * excess.dot(scaled);
  report.expected_value = -0.5 * alpha * alpha * base.dot(gram * base);
  report.solution_residual = (report.solution - report.expected_solution).cwiseAbs().maxCoeff();
  report.value_residual = std::abs(report.value - report.expected_value);
  report.pass = report.solution_residual <= tol && report.value_residual <= tol;
  return report;
}

EffectiveMarket::EffectiveMarket(MarketModel market, ConeConstraint cone,
                                 const ProjectionOptions& options)
    : market_(std::move(market)), cone_(std::move(cone)) {
  const int m = market_.asset_count();
  const std::size_t n = market_.segment_count();
  segments_.reserve(n);
  constraints_.reserve(n);
  if (cone_.kind() == ConeConstraint::Kind::General && cone_.general_matrices().size() != 1 &&
      cone_.general_matrices().size() != n) {
    throw Error(ErrorCode::InvalidScenario, "cone needs one matrix or one per segment");
  }
  for (std::size_t i = 0; i < n; ++i) {
    const MarketSegment& seg = market_.segment(i);
    constraints_.push_back(cone_.matrix(i, m));
    const Eigen::VectorXd excess = seg.excess_return();
    ProjectionResult proj = project_cone(seg.gram, excess, constraints_.back(), options);

    EffectiveSegment eff;
    eff.z_bar = std::move(proj.z);
    eff.nu = std::move(proj.nu);
    eff.b_hat = seg.gram * eff.z_bar;
    eff.lambda = eff.b_hat - excess;
    eff.theta_hat = seg.sigma.transpose() * eff.z_bar;
    eff.theta_sq = eff.theta_hat.squaredNorm();
    segments_.push_back(std::move(eff));
  }

  tail_r_.assign(n + 1, 0.0);
  tail_theta_.assign(n + 1, 0.0);
  for (std::size_t i = n; i-- > 0;) {
    const double len = market_.segment(i).length();
    tail_r_[i] = tail_r_[i + 1] + market_.segment(i).r * len;
    tail_theta_[i] = tail_theta_[i + 1] + segments_[i].theta_sq * len;
  }
}

double EffectiveMarket::tail_rate(double t) const {
  if (!(t >= 0.0) || !(t <= horizon())) {
    throw Error(ErrorCode::OutOfRange, "time " + std::to_string(t) + " outside [0, T]");
  }
  const std::size_t i = market_.segment_index(t);
  return tail_r_[i + 1] + market_.segment(i).r * (market_.segment(i).t_end - t);
}

double EffectiveMarket::tail_theta_sq(double t) const {
  if (!(t >= 0.0) || !(t <= horizon())) {
    throw Error(ErrorCode::OutOfRange, "time " + std::to_string(t) + " outside [0, T]");
  }
  const std::size_t i = market_.segment_index(t);
  return tail_theta_[i + 1] + segments_[i].theta_sq * (market_.segment(i).t_end - t);
}

std::vector<double> EffectiveMarket::cumulative_rate() const {
  std::vector<double> out(segments_.size() + 1, 0.0);
  for (std::size_t i = 0; i < segments_.size(); ++i) {
    out[i + 1] = out[i] + market_.segment(i).r * market_.segment(i).length();
  }
  return out;
}

std::vector<double> EffectiveMarket::cumulative_theta_sq() const {
  std::vector<double> out(segments_.size() + 1, 0.0);
  for (std::size_t i = 0; i < segments_.size(); ++i) {
    out[i + 1] = out[i] + segments_[i].theta_sq * market_.segment(i).length();
  }
  return out;
}

MarketModel reduced_market(const EffectiveMarket& effective) {
  MarketConfig config = effective.market().config();
  for (std::size_t i = 0; i < config.segments.size(); ++i) {
    auto& seg = config.segments[i];
    seg.b = effective.segment(i).b_hat + Eigen::VectorXd::Constant(seg.b.size(), seg.r);
  }
  return MarketModel::build(config);
}

}  // namespace mvcone
