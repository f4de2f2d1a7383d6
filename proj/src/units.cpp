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

#include "crane/units.hpp"

#include <charconv>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>

namespace crane::units {
namespace {

struct Entry {
  Dim dim;
  const char* unit;  // canonical: no spaces, '*' and U+00B7 removed
  double factor;
};

constexpr double kDeg = std::numbers::pi / 180.0;

constexpr Entry kTable[] = {
    {Dim::kLength, "m", 1.0},
    {Dim::kLength, "cm", 1e-2},
    {Dim::kLength, "mm", 1e-3},
    {Dim::kMass, "kg", 1.0},
    {Dim::kMass, "g", 1e-3},
    {Dim::kTime, "s", 1.0},
    {Dim::kTime, "ms", 1e-3},
    {Dim::kVelocity, "m/s", 1.0},
    {Dim::kVelocity, "cm/s", 1e-2},
    {Dim::kVelocity, "mm/s", 1e-3},
    {Dim::kAcceleration, "m/s^2", 1.0},
    {Dim::kAcceleration, "m/s2", 1.0},
    {Dim::kForce, "N", 1.0},
    {Dim::kStiffness, "N/m", 1.0},
    {Dim::kStiffness, "N/cm", 1e2},
    {Dim::kStiffness, "N/mm", 1e3},
    {Dim::kDamping, "Ns/m", 1.0},
    {Dim::kDamping, "Ns/cm", 1e2},
    {Dim::kDamping, "Ns/mm", 1e3},
    {Dim::kAngularGain, "N/rad", 1.0},
    {Dim::kAngularGain, "N/deg", 1.0 / kDeg},
    {Dim::kAngularDamping, "Ns/rad", 1.0},
    {Dim::kAngle, "rad", 1.0},
    {Dim::kAngle, "deg", kDeg},
    {Dim::kRate, "rad/s", 1.0},
    {Dim::kRate, "1/s", 1.0},
    {Dim::kRate, "Hz", 2.0 * std::numbers::pi},
    {Dim::kFrequency, "Hz", 1.0},
    {Dim::kFrequency, "1/s", 1.0},
};

std::string canonical(std::string_view u) {
  std::string out;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const char c = u[i];
    if (c == ' ' || c == '\t' || c == '*') continue;
    // UTF-8 middle dot
    if (static_cast<unsigned char>(c) == 0xC2 && i + 1 < u.size() &&
        static_cast<unsigned char>(u[i + 1]) == 0xB7) {
      ++i;
      continue;
    }
    out.push_back(c);
  }
  return out;
}

}  // namespace

const char* to_string(Dim d) {
  switch (d) {
    case Dim::kDimensionless: return "dimensionless";
    case Dim::kLength: return "length";
    case Dim::kMass: return "mass";
    case Dim::kTime: return "time";
    case Dim::kVelocity: return "velocity";
    case Dim::kAcceleration: return "acceleration";
    case Dim::kForce: return "force";
    case Dim::kStiffness: return "stiffness";
    case Dim::kDamping: return "damping";
    case Dim::kAngularGain: return "angular gain";
    case Dim::kAngularDamping: return "angular damping";
    case Dim::kAngle: return "angle";
    case Dim::kRate: return "rate";
    case Dim::kFrequency: return "frequency";
  }
  return "?";
}

std::optional<double> factor(Dim d, std::string_view unit) {
  const std::string u = canonical(unit);
  for (const Entry& e : kTable) {
    if (e.dim == d && u == e.unit) return e.factor;
  }
  return std::nullopt;
}

double parse(std::string_view text, Dim d) {
  std::size_t b = 0;
  while (b < text.size() && (text[b] == ' ' || text[b] == '\t')) ++b;
  const char* first = text.data() + b;
  const char* last = text.data() + text.size();
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr == first) {
    throw std::invalid_argument("expected '<number> <unit>', got '" +
                                std::string(text) + "'");
  }
  std::string_view unit(ptr, static_cast<std::size_t>(last - ptr));
  while (!unit.empty() && (unit.front() == ' ' || unit.front() == '\t')) {
    unit.remove_prefix(1);
  }
  if (canonical(unit).empty()) return value;  // bare number in a string: SI
  const auto f = factor(d, unit);
  if (!f) {
    throw std::invalid_argument("unit '" + std::string(unit) +
                                "' is not a " + to_string(d) + " unit");
  }
  return value * *f;
}

}  // namespace crane::units
