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

// Quantities in config files: a bare number is SI, a string is
// "<number> <unit>" and is converted to SI at parse time.

#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace crane::units {

enum class Dim {
  kDimensionless,
  kLength,         // m, cm, mm
  kMass,           // kg, g
  kTime,           // s, ms
  kVelocity,       // m/s, cm/s, mm/s
  kAcceleration,   // m/s^2
  kForce,          // N
  kStiffness,      // N/m, N/cm, N/mm
  kDamping,        // N s/m, N s/mm
  kAngularGain,    // N/rad, N/deg
  kAngularDamping, // N s/rad
  kAngle,          // rad, deg
  kRate,           // rad/s, 1/s, Hz (converted to rad/s)
  kFrequency,      // Hz
};

const char* to_string(Dim d);

/// Factor to SI for `unit` in dimension `d`; nullopt if not accepted.
std::optional<double> factor(Dim d, std::string_view unit);

/// Parses "<number> <unit>" (the space is optional). Throws
/// std::invalid_argument with a readable reason.
double parse(std::string_view text, Dim d);

}  // namespace crane::units
