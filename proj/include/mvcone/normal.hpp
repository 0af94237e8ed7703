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

#ifndef MVCONE_NORMAL_HPP
#define MVCONE_NORMAL_HPP

namespace mvcone {

/// Standard normal CDF, evaluated through erfc so both tails keep full
/// relative precision.
double normal_cdf(double y);

double normal_pdf(double y);

/// Inverse of normal_cdf on (0, 1) (Wichura's AS 241, ~1e-16 relative).
double inverse_normal_cdf(double p);

}  // namespace mvcone

#endif  // MVCONE_NORMAL_HPP
