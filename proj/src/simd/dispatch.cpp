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

#include <cstdlib>
#include <string_view>

#include "mvcone/simd/kernels.hpp"

namespace mvcone::simd {
namespace {

bool cpu_supports(Level level) {
  switch (level) {
    case Level::Scalar:
      return true;
    case Level::Avx2:
#if defined(MVCONE_HAVE_AVX2_KERNELS)
      return __builtin_cpu_supports("avx2");
#else
      return false;
#endif
    case Level::Neon:
#if defined(MVCONE_HAVE_NEON_KERNELS)
      return true;
#else
      return false;
#endif
  }
  return false;
}

Level choose_level() {
  if (const char* env = std::getenv("MVCONE_SIMD")) {
    const std::string_view want(env);
    for (Level l : {Level::Scalar, Level::Avx2, Level::Neon}) {
      if (want == to_string(l) && cpu_supports(l)) return l;
    }
  }
  const auto levels = available_levels();
  return levels.back();
}

}  // namespace

std::string_view to_string(Level level) noexcept {
  switch (level) {
    case Level::Scalar: return "scalar";
    case Level::Avx2: return "avx2";
    case Level::Neon: return "neon";
  }
  return "unknown";
}

std::vector<Level> available_levels() {
  std::vector<Level> out;
  for (Level l : {Level::Scalar, Level::Avx2, Level::Neon}) {
    if (cpu_supports(l)) out.push_back(l);
  }
  return out;
}

Level active_level() {
  static const Level level = choose_level();
  return level;
}

const KernelTable& kernels(Level level) {
  switch (level) {
#if defined(MVCONE_HAVE_AVX2_KERNELS)
    case Level::Avx2:
      if (cpu_supports(level)) return avx2_kernels();
      break;
#endif
#if defined(MVCONE_HAVE_NEON_KERNELS)
    case Level::Neon:
      return neon_kernels();
#endif
    default:
      break;
  }
  return scalar_kernels();
}

const KernelTable& kernels() {
  static const KernelTable& table = kernels(active_level());
  return table;
}

}  // namespace mvcone::simd
