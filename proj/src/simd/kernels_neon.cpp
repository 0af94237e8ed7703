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

#include <arm_neon.h>

#include "mvcone/simd/kernels.hpp"

// Two float64x2_t registers per iteration so the lane layout matches the
// four-lane accumulators of the scalar reference.

namespace mvcone::simd {
namespace {

constexpr std::size_t kWidth = 4;

void log_density_step(double* log_phi, const double* z, std::size_t n, double drift, double vol) {
  const float64x2_t vdrift = vdupq_n_f64(drift);
  const float64x2_t vvol = vdupq_n_f64(vol);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t inc = vaddq_f64(vdrift, vmulq_f64(vvol, vld1q_f64(z + i)));
    vst1q_f64(log_phi + i, vsubq_f64(vld1q_f64(log_phi + i), inc));
  }
  for (; i < n; ++i) log_phi[i] = log_phi[i] - (drift + vol * z[i]);
}

void discounted_euler_step(double* x, const double* scale, const double* z, std::size_t n,
                           double growth, double drift, double vol) {
  const float64x2_t vgrowth = vdupq_n_f64(growth);
  const float64x2_t vdrift = vdupq_n_f64(drift);
  const float64x2_t vvol = vdupq_n_f64(vol);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t shock = vaddq_f64(vdrift, vmulq_f64(vvol, vld1q_f64(z + i)));
    const float64x2_t moved = vaddq_f64(vld1q_f64(x + i), vmulq_f64(vld1q_f64(scale + i), shock));
    vst1q_f64(x + i, vmulq_f64(vgrowth, moved));
  }
  for (; i < n; ++i) x[i] = growth * (x[i] + scale[i] * (drift + vol * z[i]));
}

void floored_payoff(const double* phi, double* out, std::size_t n, double mu, double gamma) {
  const float64x2_t vmu = vdupq_n_f64(mu);
  const float64x2_t vgamma = vdupq_n_f64(gamma);
  const float64x2_t zero = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t v = vsubq_f64(vmu, vmulq_f64(vgamma, vld1q_f64(phi + i)));
    vst1q_f64(out + i, vbslq_f64(vcgtq_f64(v, zero), v, zero));
  }
  for (; i < n; ++i) {
    const double v = mu - gamma * phi[i];
    out[i] = v > 0.0 ? v : 0.0;
  }
}

void linear_payoff(const double* phi, double* out, std::size_t n, double mu, double gamma) {
  const float64x2_t vmu = vdupq_n_f64(mu);
  const float64x2_t vgamma = vdupq_n_f64(gamma);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    vst1q_f64(out + i, vsubq_f64(vmu, vmulq_f64(vgamma, vld1q_f64(phi + i))));
  }
  for (; i < n; ++i) out[i] = mu - gamma * phi[i];
}

LaneSums sum(const double* x, std::size_t n) {
  float64x2_t lo = vdupq_n_f64(0.0);
  float64x2_t hi = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + kWidth <= n; i += kWidth) {
    lo = vaddq_f64(lo, vld1q_f64(x + i));
    hi = vaddq_f64(hi, vld1q_f64(x + i + 2));
  }
  LaneSums s;
  vst1q_f64(s.lane, lo);
  vst1q_f64(s.lane + 2, hi);
  for (; i < n; ++i) s.lane[i % kWidth] += x[i];
  return s;
}

void centered_powers(const double* x, std::size_t n, double center, LaneSums* second,
                     LaneSums* fourth) {
  const float64x2_t vc = vdupq_n_f64(center);
  float64x2_t a2[2] = {vdupq_n_f64(0.0), vdupq_n_f64(0.0)};
  float64x2_t a4[2] = {vdupq_n_f64(0.0), vdupq_n_f64(0.0)};
  std::size_t i = 0;
  for (; i + kWidth <= n; i += kWidth) {
    for (int h = 0; h < 2; ++h) {
      const float64x2_t dev = vsubq_f64(vld1q_f64(x + i + 2 * h), vc);
      const float64x2_t sq = vmulq_f64(dev, dev);
      a2[h] = vaddq_f64(a2[h], sq);
      a4[h] = vaddq_f64(a4[h], vmulq_f64(sq, sq));
    }
  }
  LaneSums s2, s4;
  vst1q_f64(s2.lane, a2[0]);
  vst1q_f64(s2.lane + 2, a2[1]);
  vst1q_f64(s4.lane, a4[0]);
  vst1q_f64(s4.lane + 2, a4[1]);
  for (; i < n; ++i) {
    const double dev = x[i] - center;
    const double sq = dev * dev;
    s2.lane[i % kWidth] += sq;
    s4.lane[i % kWidth] += sq * sq;
  }
  *second = s2;
  *fourth = s4;
}

}  // namespace

const KernelTable& neon_kernels() {
  static const KernelTable table{Level::Neon,    log_density_step, discounted_euler_step,
                                 floored_payoff, linear_payoff,    sum,
                                 centered_powers};
  return table;
}

}  // namespace mvcone::simd
