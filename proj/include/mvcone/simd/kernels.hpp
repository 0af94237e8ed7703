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

#ifndef MVCONE_SIMD_KERNELS_HPP
#define MVCONE_SIMD_KERNELS_HPP

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

// Data-parallel loops of the path simulator. Every variant performs the same
// IEEE operations in the same order as the scalar reference, so results are
// bit-identical whichever variant the dispatcher picks. Keep it that way:
// no FMA, no reassociation.

namespace mvcone::simd {

enum class Level { Scalar, Avx2, Neon };
std::string_view to_string(Level level) noexcept;

/// Per-lane accumulators; lane l holds the elements with index % 4 == l.
struct LaneSums {
  double lane[4] = {0.0, 0.0, 0.0, 0.0};
  double total() const { return (lane[0] + lane[1]) + (lane[2] + lane[3]); }
};

struct KernelTable {
  Level level;
  // log_phi[i] = log_phi[i] - (drift + vol * z[i])
  void (*log_density_step)(double* log_phi, const double* z, std::size_t n, double drift,
                           double vol);
  // x[i] = growth * (x[i] + scale[i] * (drift + vol * z[i]))
  void (*discounted_euler_step)(double* x, const double* scale, const double* z, std::size_t n,
                                double growth, double drift, double vol);
  // out[i] = (mu - gamma * phi[i]) > 0 ? mu - gamma * phi[i] : 0
  void (*floored_payoff)(const double* phi, double* out, std::size_t n, double mu, double gamma);
  // out[i] = mu - gamma * phi[i]
  void (*linear_payoff)(const double* phi, double* out, std::size_t n, double mu, double gamma);
  LaneSums (*sum)(const double* x, std::size_t n);
  // lanes of (x - center)^power for power 2 and 4
  void (*centered_powers)(const double* x, std::size_t n, double center, LaneSums* second,
                          LaneSums* fourth);
};

/// Variants compiled into this build and supported by the running CPU.
std::vector<Level> available_levels();
/// Level used by the free functions below. Honors MVCONE_SIMD=scalar|avx2|neon
/// when that level is available, otherwise the widest available one.
Level active_level();
const KernelTable& kernels(Level level);
const KernelTable& kernels();

const KernelTable& scalar_kernels();
#if defined(MVCONE_HAVE_AVX2_KERNELS)
const KernelTable& avx2_kernels();
#endif
#if defined(MVCONE_HAVE_NEON_KERNELS)
const KernelTable& neon_kernels();
#endif

inline void log_density_step(std::span<double> log_phi, std::span<const double> z, double drift,
                             double vol) {
  kernels().log_density_step(log_phi.data(), z.data(), log_phi.size(), drift, vol);
}

inline void discounted_euler_step(std::span<double> x, std::span<const double> scale,
                                  std::span<const double> z, double growth, double drift,
                                  double vol) {
  kernels().discounted_euler_step(x.data(), scale.data(), z.data(), x.size(), growth, drift, vol);
}

inline void floored_payoff(std::span<const double> phi, std::span<double> out, double mu,
                           double gamma) {
  kernels().floored_payoff(phi.data(), out.data(), phi.size(), mu, gamma);
}

inline void linear_payoff(std::span<const double> phi, std::span<double> out, double mu,
                          double gamma) {
  kernels().linear_payoff(phi.data(), out.data(), phi.size(), mu, gamma);
}

inline LaneSums sum(std::span<const double> x) { return kernels().sum(x.data(), x.size()); }

}  // namespace mvcone::simd

#endif  // MVCONE_SIMD_KERNELS_HPP
