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
#include <vector>

#include <gtest/gtest.h>

namespace crane {
namespace {

CraneState swinging() {
  CraneState s;
  s.x = 0.31;
  s.x_dot = 0.02;
  s.theta = 0.07;
  s.theta_dot = -0.3;
  s.l = 0.68;
  s.l_dot = 0.01;
  s.f2 = -2.1;
  s.f2_dot = 0.4;
  s.t = 1.234;
  return s;
}

double mean(const std::vector<double>& v) {
  double sum = 0.0;
  for (double x : v) sum += x;
  return sum / static_cast<double>(v.size());
}

double stddev(const std::vector<double>& v) {
  const double mu = mean(v);
  double sq = 0.0;
  for (double x : v) sq += (x - mu) * (x - mu);
  return std::sqrt(sq / static_cast<double>(v.size() - 1));
}

TEST(Sensor, NoiseOffIsExact) {
  const CraneState s = swinging();
  const SensorReading r = sense(s, NoiseConfig{}, 42);
  const OutputPoint y = output_map(s);
  EXPECT_EQ(r.x_meas, s.x);
  EXPECT_EQ(r.l_meas, s.l);
  EXPECT_EQ(r.theta_meas, s.theta);
  EXPECT_EQ(r.y1_meas, y.y1);
  EXPECT_EQ(r.y2_meas, y.y2);
  EXPECT_EQ(r.timestamp, s.t);

  const CraneState est = measured_state(r, s);
  EXPECT_EQ(est.x, s.x);
  EXPECT_EQ(est.theta, s.theta);
  EXPECT_EQ(est.l, s.l);
  EXPECT_EQ(est.x_dot, s.x_dot);
  EXPECT_EQ(est.f2, s.f2);
}

TEST(Sensor, MarkerKinematicsInvertOutputMap) {
  for (double th : {-0.6, -0.1, 0.0, 0.05, 0.4}) {
    CraneState s = swinging();
    s.theta = th;
    const OutputPoint y = output_map(s);
    const MarkerGeometry g = reconstruct_from_markers(y.y1, y.y2, s.x);
    EXPECT_NEAR(g.theta, th, 1e-14);
    EXPECT_NEAR(g.l, s.l, 1e-14);
    EXPECT_NEAR(y.y1 - g.l * std::sin(g.theta), s.x, 1e-14);
  }
}

TEST(Sensor, SwingNoiseLevel) {
  NoiseConfig cfg;
  cfg.enabled = true;
  Sensor sensor(cfg, 7);
  CraneState rest;
  std::vector<double> theta;
  for (int i = 0; i < 10000; ++i) theta.push_back(sensor.read(rest).theta_meas);
  EXPECT_NEAR(stddev(theta), 0.0026, 0.1 * 0.0026);
  EXPECT_NEAR(mean(theta), 0.0, 4.0 * 0.0026 / 100.0);
}

TEST(Sensor, LengthFromMarkersMatchesLengthChannel) {
  NoiseConfig cfg;
  cfg.enabled = true;
  Sensor sensor(cfg, 19);
  const CraneState s = swinging();
  std::vector<double> direct;
  std::vector<double> from_markers;
  for (int i = 0; i < 10000; ++i) {
    const SensorReading r = sensor.read(s);
    direct.push_back(r.l_meas);
    from_markers.push_back(-r.y2_meas / std::cos(r.theta_meas));
  }
  const double n = static_cast<double>(direct.size());
  const double spread =
      3.0 * std::hypot(stddev(direct), stddev(from_markers)) / std::sqrt(n);
  EXPECT_NEAR(mean(direct), mean(from_markers), spread);
}

TEST(Sensor, SeededReproducible) {
  NoiseConfig cfg;
  cfg.enabled = true;
  Sensor a(cfg, 5);
  Sensor b(cfg, 5);
  Sensor c(cfg, 6);
  const CraneState s = swinging();
  bool differs = false;
  for (int i = 0; i < 100; ++i) {
    const SensorReading ra = a.read(s);
    const SensorReading rb = b.read(s);
    const SensorReading rc = c.read(s);
    EXPECT_EQ(ra.x_meas, rb.x_meas);
    EXPECT_EQ(ra.theta_meas, rb.theta_meas);
    EXPECT_EQ(ra.y2_meas, rb.y2_meas);
    if (ra.theta_meas != rc.theta_meas) differs = true;
  }
  EXPECT_TRUE(differs);
}

}  // namespace
}  // namespace crane
