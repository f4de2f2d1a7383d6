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

// Open-loop feedforward runs: the plant driven by flatness feedforward alone,
// evaluated along the reference at every integrator stage and started from
// the reference's own initial state.

#pragma once

#include <algorithm>
#include <cmath>

#include "crane/flatness.hpp"
#include "crane/model.hpp"

namespace crane::testing {

struct OpenLoop {
  double max_error = 0.0;  // max |Y - Y_d| over both outputs
  double min_f2 = 0.0;
  double t_min_f2 = 0.0;
};

template <class Ref>
OpenLoop open_loop(const Ref& ref, double duration, const PhysParams& p,
                   double dt = 1e-3) {
  const flat::DesiredState d0 = flat::desired_state(ref(0.0), p.g);
  CraneState st;
  st.x = d0.x;
  st.x_dot = d0.x_dot;
  st.theta = d0.theta;
  st.theta_dot = d0.theta_dot;
  st.l = d0.l;
  st.l_dot = d0.l_dot;
  st.f2 = p.equilibrium_f2();
  auto law = [&](double t, const CraneState& stage) {
    const flat::OutputJet j = ref(t);
    const flat::FeedforwardOut ff = flat::feedforward(
        j, flat::desired_state(j, p.g), stage.f2, stage.f2_dot, p);
    return Actuation{{ff.f1, stage.f2}, ff.f2_ddot};
  };
  OpenLoop out;
  out.min_f2 = st.f2;
  const auto n = static_cast<long>(std::llround(duration / dt));
  for (long i = 0; i < n; ++i) {
    st = step(st, law, p, dt);
    const OutputPoint y = output_map(st);
    const OutputPoint yd = ref(st.t).point();
    out.max_error = std::max(
        {out.max_error, std::abs(y.y1 - yd.y1), std::abs(y.y2 - yd.y2)});
    if (st.f2 < out.min_f2) {
      out.min_f2 = st.f2;
      out.t_min_f2 = st.t;
    }
  }
  return out;
}

}  // namespace crane::testing
