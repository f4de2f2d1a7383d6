/*
 * Copyright 2026 The Crane Teleop Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace crane {

/// Failure classes raised by the numerical core. Each one marks a point where
/// the model or one of its inversions stops being valid.
enum class Fault {
  kSingularConfig,    // l < l_min or |theta| beyond the swing guard
  kNonFinite,         // a state component left the finite range
  kCableSlack,        // y2'' <= -g, or cable force not negative
  kDegenerateLength,  // desired payload length <= 0
  kBetaSingular,      // decoupling matrix not invertible
  kGainReject,        // gains fail the closed-loop stability conditions
  kIllConditioned,    // boundary-value solve residual too large
  kUnsolvable,        // pole placement coefficient map inconsistent
  kInfeasibleSegment  // planned segment violates feasibility or workspace
};

std::string_view to_string(Fault fault);

class CraneError : public std::runtime_error {
 public:
  CraneError(Fault fault, const std::string& what)
      : std::runtime_error(std::string(to_string(fault)) + ": " + what),
        fault_(fault) {}

  Fault fault() const noexcept { return fault_; }

 private:
  Fault fault_;
};

inline std::string_view to_string(Fault fault) {
  switch (fault) {
    case Fault::kSingularConfig:
      return "SingularConfig";
    case Fault::kNonFinite:
      return "NonFinite";
    case Fault::kCableSlack:
      return "CableSlack";
    case Fault::kDegenerateLength:
      return "DegenerateLength";
    case Fault::kBetaSingular:
      return "BetaSingular";
    case Fault::kGainReject:
      return "GainReject";
    case Fault::kIllConditioned:
      return "IllConditioned";
    case Fault::kUnsolvable:
      return "Unsolvable";
    case Fault::kInfeasibleSegment:
      return "InfeasibleSegment";
  }
  return "Unknown";
}

}  // namespace crane
