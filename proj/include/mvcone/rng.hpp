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

#ifndef MVCONE_RNG_HPP
#define MVCONE_RNG_HPP

#include <array>
#include <cstdint>

namespace mvcone {

/// Philox4x32-10 (Salmon et al., "Parallel random numbers: as easy as 1, 2, 3").
struct Philox4x32 {
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter generate(Counter ctr, Key key) noexcept;
};

/// Maps 52 random bits to the open interval (0, 1). With 53 bits the largest
/// value would round up to exactly 1.
inline double to_open_unit(std::uint64_t bits) noexcept {
  return (static_cast<double>(bits >> 12) + 0.5) * 0x1.0p-52;
}

/// Stateless stream: every draw is a pure function of
/// (seed, stream, path, step), so any schedule reproduces the same numbers.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) noexcept : seed_(seed) {}

  std::uint64_t seed() const noexcept { return seed_; }

  std::uint64_t bits(std::uint64_t path, std::uint32_t step, std::uint32_t stream = 0) const noexcept;
  double uniform(std::uint64_t path, std::uint32_t step, std::uint32_t stream = 0) const noexcept;
  /// Standard normal by inverse-CDF transform of uniform().
  double normal(std::uint64_t path, std::uint32_t step, std::uint32_t stream = 0) const noexcept;

 private:
  std::uint64_t seed_;
};

}  // namespace mvcone

#endif  // MVCONE_RNG_HPP
