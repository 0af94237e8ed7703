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

#include "mvcone/simd/kernels.hpp"

namespace mvcone::simd {
namespace {

void log_density_step(double* log_phi, const double* z, std::size_t n, double drift, double vol) {
  for (std::size_t i = 0; i < n; ++i) log_phi[i] = log_phi[i] - (drift + vol * z[i]);
}

void discounted_euler_step(double* x, const double* scale, const double* z, std::size_t n,
                           double growth, double drift, double vol) {
  for (std::size_t i = 0; i < n; ++i) x[i] = growth * (x[i] + scale[i] * (drift + vol * z[i]));
}

void floored_payoff(const double* phi, double* out, std::size_t n, double mu, double gamma) {
  for (std::size_t i = 0; i < n; ++i) {
    const double v = mu - gamma * phi[i];
    out[i] = v > 0.0 ? v : 0.0;
  }
}

void linear_payoff(const double* phi, double* out, std::size_t n, double mu, double gamma) {
  for (std::size_t i = 0; i < n; ++i) out[i] = mu - gamma * phi[i];
}

LaneSums sum(const double* x, std::size_t n) {
  LaneSums s;
  for (std::size_t i = 0; i < n; ++i) s.lane[i % 4] += x[i];
  return s;
}

void centered_powers(const double* x, std::size_t n, double center, LaneSums* second,
                     LaneSums* fourth) {
  LaneSums s2, s4;
  for (std::size_t i = 0; i < n; ++i) {
    const double dev = x[i] - center;
    const double sq = dev * dev;
    s2.lane[i % 4] += sq;
    s4.lane[i % 4] += sq * sq;
  }
  *second = s2;
  *fourth = s4;
}

}  // namespace

const KernelTable& scalar_kernels() {
  static const KernelTable table{Level::Scalar,  log_density_step, discounted_euler_step,
                                 floored_payoff, linear_payoff,    sum,
                                 centered_powers};
  return table;
}

}  // namespace mvcone::simd
