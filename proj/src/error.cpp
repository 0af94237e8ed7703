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

#include "mvcone/error.hpp"

namespace mvcone {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NonInvertibleVolatility: return "NonInvertibleVolatility";
    case ErrorCode::BadSchedule: return "BadSchedule";
    case ErrorCode::NonPositiveInitialWealth: return "NonPositiveInitialWealth";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::TargetBelowRiskFree: return "TargetBelowRiskFree";
    case ErrorCode::TargetAboveCap: return "TargetAboveCap";
    case ErrorCode::DegenerateMarket: return "DegenerateMarket";
    case ErrorCode::InvalidScenario: return "InvalidScenario";
    case ErrorCode::QPNotConverged: return "QPNotConverged";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::ShapeViolation: return "ShapeViolation";
    case ErrorCode::ConvexityLost: return "ConvexityLost";
  }
  return "Unknown";
}

bool is_validation_error(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::QPNotConverged:
    case ErrorCode::NoConvergence:
    case ErrorCode::ShapeViolation:
    case ErrorCode::ConvexityLost:
      return false;
    default:
      return true;
  }
}

}  // namespace mvcone
