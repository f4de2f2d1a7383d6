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

// Scenario files: one JSON document per experiment. The key tree is
// documented in docs/scenario.md.

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "crane/controller.hpp"
#include "crane/model.hpp"
#include "crane/planner.hpp"
#include "crane/sensor.hpp"

namespace crane {

using Json = nlohmann::ordered_json;

/// Every problem found while reading a scenario, each prefixed with the
/// dotted path of the offending field.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> issues);
  const std::vector<std::string>& issues() const { return issues_; }

 private:
  std::vector<std::string> issues_;
};

struct JoystickSample {
  double t = 0.0;
  double j1 = 0.0;
  double j2 = 0.0;
};

struct ModeSwitch {
  double t = 0.0;
  ctl::Mode mode = ctl::Mode::kSC;
};

struct RampReference {
  double dy1 = 0.75;
  double dy2 = 0.15;
  double Tt = 4.0;
  double alpha = 10.0;  // rad/s
};

enum class ReferenceKind { kJoystick, kRamp };

struct MetricsConfig {
  std::optional<double> window_start;
  std::optional<double> window_end;
  double completion_tol = 0.005;  // m
  std::optional<OutputPoint> target;
};

struct Scenario {
  std::string name = "unnamed";
  PhysParams plant;
  plan::Workspace workspace;
  bool has_workspace = false;
  ctl::ControllerConfig controller;
  double x0 = 0.0;
  double l0 = 0.72;
  double duration = 10.0;
  double dt = 1e-3;
  ReferenceKind reference = ReferenceKind::kJoystick;
  std::vector<JoystickSample> tape;
  RampReference ramp;
  std::vector<ModeSwitch> mode_switches;
  NoiseConfig noise;
  std::uint64_t seed = 1;
  MetricsConfig metrics;

  OutputPoint start_point() const { return {x0, -l0}; }
  std::int64_t steps() const;
  /// Held joystick value at time t (zero before the first sample).
  ctl::Joystick joystick_at(double t) const;
};

/// Throws ConfigError listing every invalid field.
Scenario parse_scenario(const Json& doc);
Scenario load_scenario(const std::filesystem::path& file);
Json load_json(const std::filesystem::path& file);

}  // namespace crane
