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

#include "crane/model.hpp"

#include <sstream>
#include <stdexcept>

namespace crane {

void PhysParams::validate() const {
  std::ostringstream err;
  if (!(M > 0.0)) err << "M must be > 0; ";
  if (!(m > 0.0)) err << "m must be > 0; ";
  if (!(g > 0.0)) err << "g must be > 0; ";
  if (!(l_min > 0.0)) err << "l_min must be > 0; ";
  if (!(theta_max > 0.0 && theta_max < std::numbers::pi / 2)) {
    err << "theta_max must lie in (0, pi/2); ";
  }
  if (!(f2_max < 0.0)) err << "f2_max must be < 0; ";
  const std::string msg = err.str();
  if (!msg.empty()) throw std::invalid_argument("PhysParams: " + msg);
}

void check_configuration(const CraneState& state, const PhysParams& params) {
  if (!(state.l >= params.l_min)) {
    throw CraneError(Fault::kSingularConfig,
                     "payload length " + std::to_string(state.l) +
                         " below l_min");
  }
  if (!(std::abs(state.theta) < params.theta_max)) {
    throw CraneError(Fault::kSingularConfig,
                     "swing angle " + std::to_string(state.theta) +
                         " beyond guard");
  }
}

PlantRate dynamics_rhs(const CraneState& state, const ForceInput& input,
                       const PhysParams& params) {
  check_configuration(state, params);
  const double s = std::sin(state.theta);
  const double c = std::cos(state.theta);
  const double l = state.l;
  const double g = params.g;
  // Cart acceleration is shared by the swing and length rows.
  const double x_ddot = (input.f1 - s * input.f2) / params.M;

  PlantRate r;
  r.x_dot = state.x_dot;
  r.x_ddot = x_ddot;
  r.theta_dot = state.theta_dot;
  r.theta_ddot = -2.0 * state.l_dot * state.theta_dot / l - g * s / l -
                 c * x_ddot / l;
  r.l_dot = state.l_dot;
  r.l_ddot = l * state.theta_dot * state.theta_dot + g * c +
             input.f2 / params.m - s * x_ddot;
  return r;
}

OutputPoint output_map(const CraneState& state) {
  return {state.x + state.l * std::sin(state.theta),
          -state.l * std::cos(state.theta)};
}

double mechanical_energy(const CraneState& st, const PhysParams& p,
                         double f2_const) {
  const double s = std::sin(st.theta);
  const double c = std::cos(st.theta);
  const double kinetic =
      0.5 * (p.M + p.m) * st.x_dot * st.x_dot +
      p.m * st.x_dot * (st.l_dot * s + st.l * st.theta_dot * c) +
      0.5 * p.m *
          (st.l_dot * st.l_dot + st.l * st.l * st.theta_dot * st.theta_dot);
  const double gravity = -p.m * p.g * st.l * c;
  return kinetic + gravity - f2_const * st.l;
}

bool is_finite(const CraneState& s) {
  return std::isfinite(s.x) && std::isfinite(s.x_dot) &&
         std::isfinite(s.theta) && std::isfinite(s.theta_dot) &&
         std::isfinite(s.l) && std::isfinite(s.l_dot) && std::isfinite(s.f2) &&
         std::isfinite(s.f2_dot);
}

}  // namespace crane
