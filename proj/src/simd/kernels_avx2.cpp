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

#include <immintrin.h>

#include "mvcone/simd/kernels.hpp"

namespace mvcone::simd {
namespace {

constexpr std::size_t kWidth = 4;

void log_density_step(double* log_phi, const double* z, std::size_t n, double drift, double vol) {
  const __m256d vdrift = _mm256_set1_pd(drift);
  const __m256d vvol = _mm256_set1_pd(vol);
  std::size_t i = 0;
  for (; i + kWidth <= n; i += kWidth) {
    const __m256d inc = _mm256_add_pd(vdrift, _mm256_mul_pd(vvol, _mm256_loadu_pd(z + i)));
    _mm256_storeu_pd(log_phi + i, _mm256_sub_pd(_mm256_loadu_pd(log_phi + i), inc));
  }
  for (; i < n; ++i) log_phi[i] = log_phi[i] - (drift + vol * z[i]);
}

void discounted_euler_step(double* x, const double* scale, const double* z, std::size_t n,
                           double growth, double drift, double vol) {
  const __m256d vgrowth = _mm256_set1_pd(growth);
  const __m256d vdrift = _mm256_set1_pd(drift);
  const __m256d vvol = _mm256_set1_pd(vol);
  std::size_t i = 0;
  for (; i + kWidth <= n; i += kWidth) {
    const __m256d shock = _mm256_add_pd(vdrift, _mm256_mul_pd(vvol, _mm256_loadu_pd(z + i)));
    const __m256d moved =
        _mm256_add_pd(_mm256_loadu_pd(x + i), _mm256_mul_pd(_mm256_loadu_pd(scale + i), shock));
    _mm256_storeu_pd(x + i, _mm256_mul_pd(vgrowth, moved));
  }
  for (; i < n; ++i) x[i] = growth * (x[i] + scale[i] * (drift + vol * z[i]));
}

void floored_payoff(const double* phi, double* out, std::size_t n, double mu, double gamma) {
  const __m256d vmu = _mm256_set1_pd(mu);
  const __m256d vgamma = _mm256_set1_pd(gamma);
  const __m256d zero = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + kWidth <= n; i += kWidth) {
    const __m256d v = _mm256_sub_pd(vmu, _mm256_mul_pd(vgamma, _mm256_loadu_pd(phi + i)));
    // max_pd(v, 0) returns v only when v > 0, matching the scalar ternary.
    _mm256_storeu_pd(out + i, _mm256_max_pd(v, zero));
  }
  for (; i < n; ++i) {
    const double v = mu - gamma * phi[i];
    out[i] = v > 0.0 ? v : 0.0;
  }
}

void linear_payoff(const double* phi, double* out, std::size_t n, double mu, double gamma) {
  const __m256d vmu = _mm256_set1_pd(mu);
  const __m256d vgamma = _mm256_set1_pd(gamma);
  std::size_t i = 0;
  for (; i + kWidth <= n; i += kWidth) {
    _mm256_storeu_pd(out + i, _mm256_sub_pd(vmu, _mm256_mul_pd(vgamma, _mm256_loadu_pd(phi + i))));
  }
  for (; i < n; ++i) out[i] = mu - gamma * phi[i];
}

LaneSums sum(const double* x, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + kWidth <= n; i += kWidth) acc = _mm256_add_pd(acc, _mm256_loadu_pd(x + i));
  LaneSums s;
  _mm256_storeu_pd(s.lane, acc);
  for (; i < n; ++i) s.lane[i % kWidth] += x[i];
  return s;
}

void centered_powers(const double* x, std::size_t n, double center, LaneSums* second,
                     LaneSums* fourth) {
  const __m256d vc = _mm256_set1_pd(center);
  __m256d acc2 = _mm256_setzero_pd();
  __m256d acc4 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + kWidth <= n; i += kWidth) {
    const __m256d dev = _mm256_sub_pd(_mm256_loadu_pd(x + i), vc);
    const __m256d sq = _mm256_mul_pd(dev, dev);
    acc2 = _mm256_add_pd(acc2, sq);
    acc4 = _mm256_add_pd(acc4, _mm256_mul_pd(sq, sq));
  }
  LaneSums s2, s4;
  _mm256_storeu_pd(s2.lane, acc2);
  _mm256_storeu_pd(s4.lane, acc4);
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

const KernelTable& avx2_kernels() {
  static const KernelTable table{Level::Avx2,    log_density_step, discounted_euler_step,
                                 floored_payoff, linear_payoff,    sum,
                                 centered_powers};
  return table;
}

}  // namespace mvcone::simd
