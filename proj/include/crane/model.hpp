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

// Planar variable-length gantry crane: cart on a rail, payload on a cable
// whose length is actuated. Generalized coordinates (x, theta, l); inputs are
// the cart force f1 and the cable force f2 (negative while the cable is taut).

#pragma once

#include <cmath>
#include <limits>
#include <numbers>

#include "crane/errors.hpp"

namespace crane {

struct PhysParams {
  double M = 0.815;  // cart mass (kg)
  double m = 0.225;  // payload mass (kg)
  double g = 9.81;   // (m/s^2)
  double l_min = 0.05;
  double theta_max = 80.0 * std::numbers::pi / 180.0;
  double f2_max = -0.01;  // cable force must stay below this (N)

  /// Throws std::invalid_argument listing the first violated invariant.
  void validate() const;

  double equilibrium_f2() const { return -m * g; }
};

/// Plant state plus the two extended states (f2, f2_dot) that carry the
/// controller's double-integrated cable force through the integrator.
struct CraneState {
  double x = 0.0;
  double x_dot = 0.0;
  double theta = 0.0;
  double theta_dot = 0.0;
  double l = 0.72;
  double l_dot = 0.0;
  double f2 = 0.0;
  double f2_dot = 0.0;
  double t = 0.0;

  /// Rest configuration with the extended force state at -m g.
  static CraneState at_rest(double x0, double l0, const PhysParams& params) {
    CraneState s;
    s.x = x0;
    s.l = l0;
    s.f2 = params.equilibrium_f2();
    return s;
  }
};

struct ForceInput {
  double f1 = 0.0;
  double f2 = 0.0;
};

/// What a control law hands the integrator at one query time: the forces the
/// plant sees and the second derivative driving the extended force state.
struct Actuation {
  ForceInput force;
  double f2_ddot = 0.0;
};

/// Time derivative of the six mechanical states.
struct PlantRate {
  double x_dot = 0.0;
  double x_ddot = 0.0;
  double theta_dot = 0.0;
  double theta_ddot = 0.0;
  double l_dot = 0.0;
  double l_ddot = 0.0;
};

struct OutputPoint {
  double y1 = 0.0;
  double y2 = 0.0;
};

/// Optional actuator saturation; unlimited by default.
struct ActuatorLimits {
  double f1_abs_max = std::numeric_limits<double>::infinity();
  double f2_min = -std::numeric_limits<double>::infinity();

  ForceInput apply(ForceInput in) const {
    if (in.f1 > f1_abs_max) in.f1 = f1_abs_max;
    if (in.f1 < -f1_abs_max) in.f1 = -f1_abs_max;
    if (in.f2 < f2_min) in.f2 = f2_min;
    return in;
  }
};

/// Throws CraneError(kSingularConfig) when l < l_min or |theta| >= theta_max.
void check_configuration(const CraneState& state, const PhysParams& params);

/// f(X) + g(X) F. Pure; raises kSingularConfig outside the valid region.
PlantRate dynamics_rhs(const CraneState& state, const ForceInput& input,
                       const PhysParams& params);

OutputPoint output_map(const CraneState& state);

/// Kinetic plus gravitational energy, plus the potential of a constant cable
/// force f2_const acting on l. Conserved when f1 = 0 and f2 = f2_const.
double mechanical_energy(const CraneState& state, const PhysParams& params,
                         double f2_const);

bool is_finite(const CraneState& state);

namespace detail {

struct Rate8 {
  double v[8];
};

inline Rate8 full_rate(const CraneState& s, const Actuation& a,
                       const PhysParams& p) {
  const PlantRate r = dynamics_rhs(s, a.force, p);
  return {{r.x_dot, r.x_ddot, r.theta_dot, r.theta_ddot, r.l_dot, r.l_ddot,
           s.f2_dot, a.f2_ddot}};
}

inline CraneState advance(const CraneState& s, const Rate8& k, double h) {
  CraneState out = s;
  out.x += h * k.v[0];
  out.x_dot += h * k.v[1];
  out.theta += h * k.v[2];
  out.theta_dot += h * k.v[3];
  out.l += h * k.v[4];
  out.l_dot += h * k.v[5];
  out.f2 += h * k.v[6];
  out.f2_dot += h * k.v[7];
  return out;
}

}  // namespace detail

/// Classical RK4 step of the eight-state system. `law(t, stage_state)` returns
/// the Actuation at any query time in [t, t + dt]; it may read the stage's
/// extended states. Deterministic: the evaluation order is fixed.
template <class Law>
CraneState step(const CraneState& state, Law&& law, const PhysParams& params,
                double dt) {
  if (!(dt > 0.0)) {
    throw std::invalid_argument("step: dt must be positive");
  }
  const double t = state.t;
  const double half = 0.5 * dt;

  CraneState s1 = state;
  const detail::Rate8 k1 = detail::full_rate(s1, law(t, s1), params);
  CraneState s2 = detail::advance(state, k1, half);
  s2.t = t + half;
  const detail::Rate8 k2 = detail::full_rate(s2, law(t + half, s2), params);
  CraneState s3 = detail::advance(state, k2, half);
  s3.t = t + half;
  const detail::Rate8 k3 = detail::full_rate(s3, law(t + half, s3), params);
  CraneState s4 = detail::advance(state, k3, dt);
  s4.t = t + dt;
  const detail::Rate8 k4 = detail::full_rate(s4, law(t + dt, s4), params);

  detail::Rate8 sum;
  for (int i = 0; i < 8; ++i) {
    sum.v[i] = (k1.v[i] + 2.0 * k2.v[i] + 2.0 * k3.v[i] + k4.v[i]) / 6.0;
  }
  CraneState next = detail::advance(state, sum, dt);
  next.t = t + dt;
  if (!is_finite(next)) {
    throw CraneError(Fault::kNonFinite, "state left the finite range");
  }
  return next;
}

}  // namespace crane
