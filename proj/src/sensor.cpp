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

#include "crane/sensor.hpp"

#include <cmath>

namespace crane {

MarkerGeometry reconstruct_from_markers(double y1, double y2, double x) {
  MarkerGeometry geo;
  geo.x = x;
  geo.theta = std::atan2(y1 - x, -y2);
  geo.l = -y2 / std::cos(geo.theta);
  return geo;
}

double Sensor::noise(double sigma) {
  if (!config_.enabled || sigma == 0.0) return 0.0;
  return sigma * unit_(rng_);
}

SensorReading Sensor::read(const CraneState& state) {
  const OutputPoint y = output_map(state);
  SensorReading r;
  r.timestamp = state.t;
  // Draw order is part of the reproducibility contract.
  r.x_meas = state.x + noise(config_.sigma_x);
  r.y1_meas = y.y1 + noise(config_.sigma_y1);
  r.y2_meas = y.y2 + noise(config_.sigma_y2);
  r.l_meas = state.l + noise(config_.sigma_l);
  r.theta_meas = state.theta + noise(config_.sigma_theta);
  return r;
}

SensorReading sense(const CraneState& state, const NoiseConfig& config,
                    std::uint64_t rng_seed) {
  Sensor sensor(config, rng_seed);
  return sensor.read(state);
}

CraneState measured_state(const SensorReading& reading,
                          const CraneState& truth) {
  CraneState est = truth;
  est.x = reading.x_meas;
  est.theta = reading.theta_meas;
  est.l = reading.l_meas;
  est.t = reading.timestamp;
  return est;
}

}  // namespace crane
