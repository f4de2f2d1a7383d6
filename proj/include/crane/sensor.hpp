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

// Emulated fiducial-marker measurements. The payload marker reads (y1, y2)
// directly, the cart marker reads x; swing and length follow from the
// suspension kinematics.

#pragma once

#include <cstdint>
#include <random>

#include "crane/model.hpp"

namespace crane {

struct NoiseConfig {
  bool enabled = false;
  double sigma_x = 0.0007;
  double sigma_y1 = 0.0007;
  double sigma_l = 0.0059;
  double sigma_y2 = 0.0059;
  double sigma_theta = 0.0026;
};

struct SensorReading {
  double x_meas = 0.0;
  double l_meas = 0.0;
  double theta_meas = 0.0;
  double y1_meas = 0.0;
  double y2_meas = 0.0;
  double timestamp = 0.0;
};

struct MarkerGeometry {
  double x = 0.0;
  double theta = 0.0;
  double l = 0.0;
};

/// Swing angle and length from the payload marker (y1, y2) and the cart
/// position. Uses atan2(y1 - x, -y2) so that y2 = -l cos(theta) round-trips.
MarkerGeometry reconstruct_from_markers(double y1, double y2, double x);

/// Seeded measurement source; one instance per simulation run.
class Sensor {
 public:
  Sensor(NoiseConfig config, std::uint64_t seed)
      : config_(config), rng_(seed) {}

  SensorReading read(const CraneState& state);

  const NoiseConfig& config() const { return config_; }

 private:
  double noise(double sigma);

  NoiseConfig config_;
  std::mt19937_64 rng_;
  std::normal_distribution<double> unit_{0.0, 1.0};
};

/// One-shot reading with a fresh generator seeded by `rng_seed`.
SensorReading sense(const CraneState& state, const NoiseConfig& config,
                    std::uint64_t rng_seed);

/// State estimate handed to controllers: positions from the reading, rates
/// from the encoder channel (taken from `truth`), extended force states from
/// the controller's own integrator.
CraneState measured_state(const SensorReading& reading, const CraneState& truth);

}  // namespace crane
