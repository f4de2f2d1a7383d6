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

#include "crane/flatness.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace crane::flat {
namespace {

constexpr double kDivisionGuard = 1e-6;

void require_taut(double f2) {
  if (!(f2 < 0.0)) {
    throw CraneError(Fault::kCableSlack,
                     "cable force " + std::to_string(f2) + " is not negative");
  }
}

}  // namespace

bool OutputJet::is_finite() const {
  for (int i = 0; i <= kJetOrder; ++i) {
    if (!std::isfinite(y1[i]) || !std::isfinite(y2[i])) return false;
  }
  return true;
}

OutputJet output_jet_through_jerk(const CraneState& st, const PhysParams& p) {
  check_configuration(st, p);
  require_taut(st.f2);
  const double s = std::sin(st.theta);
  const double c = std::cos(st.theta);
  const double l = st.l;
  const double m = p.m;

  OutputJet j;
  j.y1[0] = st.x + l * s;
  j.y2[0] = -l * c;
  j.y1[1] = st.x_dot + st.l_dot * s + l * st.theta_dot * c;
  j.y2[1] = -st.l_dot * c + l * st.theta_dot * s;
  // The cart force drops out of the payload acceleration.
  j.y1[2] = st.f2 * s / m;
  j.y2[2] = -p.g - st.f2 * c / m;
  j.y1[3] = (st.f2 * st.theta_dot * c + s * st.f2_dot) / m;
  j.y2[3] = (st.f2 * st.theta_dot * s - c * st.f2_dot) / m;
  return j;
}

OutputJet output_jet_from_state(const CraneState& st, double f1,
                                double f2_ddot, const PhysParams& p) {
  OutputJet j = output_jet_through_jerk(st, p);
  const double s = std::sin(st.theta);
  const double c = std::cos(st.theta);
  const double theta_ddot = dynamics_rhs(st, {f1, st.f2}, p).theta_ddot;
  const double w2 = st.theta_dot * st.theta_dot;
  j.y1[4] = (f2_ddot * s + 2.0 * st.f2_dot * st.theta_dot * c +
             st.f2 * theta_ddot * c - st.f2 * w2 * s) /
            p.m;
  j.y2[4] = (-f2_ddot * c + 2.0 * st.f2_dot * st.theta_dot * s +
             st.f2 * theta_ddot * s + st.f2 * w2 * c) /
            p.m;
  return j;
}

DesiredState desired_state(const OutputJet& jet, double g) {
  const double y1dd = jet.y1[2];
  const double y1ddd = jet.y1[3];
  const double y2 = jet.y2[0];
  const double y2d = jet.y2[1];
  const double y2dd = jet.y2[2];
  const double y2ddd = jet.y2[3];

  const double den = y2dd + g;
  if (!(den > kDivisionGuard)) {
    throw CraneError(Fault::kCableSlack,
                     "desired y2'' + g = " + std::to_string(den));
  }
  // Horizontal offset of the payload from the cart, and its rate.
  const double offset = y1dd * y2 / den;
  const double offset_dot =
      (y1ddd * y2 + y1dd * y2d) / den - y1dd * y2 * y2ddd / (den * den);

  DesiredState d;
  d.x = jet.y1[0] - offset;
  d.x_dot = jet.y1[1] - offset_dot;
  d.l = std::sqrt(offset * offset + y2 * y2);
  if (!(d.l > 0.0)) {
    throw CraneError(Fault::kDegenerateLength, "desired payload length is 0");
  }
  d.l_dot = (y2 * y2d + offset * offset_dot) / d.l;
  d.theta = std::atan(-y1dd / den);
  d.theta_dot = (-y1ddd * den + y1dd * y2ddd) / (den * den + y1dd * y1dd);
  return d;
}

FeedforwardOut linearizing_inputs(double l, double theta, double theta_dot,
                                  double l_dot, double f2, double f2_dot,
                                  double v1, double v2, const PhysParams& p) {
  if (!(l != 0.0) || !(std::abs(theta) < std::numbers::pi / 2) ||
      !(f2 < 0.0)) {
    throw CraneError(Fault::kBetaSingular,
                     "requires l != 0, |theta| < pi/2, f2 < 0");
  }
  const double s = std::sin(theta);
  const double c = std::cos(theta);
  if (std::abs(f2 * c) < kDivisionGuard) {
    throw CraneError(Fault::kBetaSingular, "|f2 cos(theta)| below guard");
  }
  const double M = p.M;
  const double m = p.m;

  FeedforwardOut out;
  out.f1 = (M * l / (f2 * c)) *
           (-m * (c * v1 + s * v2) + 2.0 * f2_dot * theta_dot +
            f2 * f2 * s * c / (M * l) - 2.0 * f2 * l_dot * theta_dot / l -
            p.g * f2 * s / l);
  out.f2_ddot = m * (s * v1 - c * v2) + f2 * theta_dot * theta_dot;
  return out;
}

FeedforwardOut feedforward(const OutputJet& jet_d, const DesiredState& xd,
                           double f2, double f2_dot, const PhysParams& p) {
  return linearizing_inputs(xd.l, xd.theta, xd.theta_dot, xd.l_dot, f2, f2_dot,
                            jet_d.y1[4], jet_d.y2[4], p);
}

FeedbackTerms limited_feedback(const DesiredState& xd,
                               const CraneState& meas,
                               const stability::GainSet& k) {
  FeedbackTerms fb;
  fb.f1 = -k.k1 * (meas.x - xd.x) - k.k2 * (meas.x_dot - xd.x_dot) -
          k.k3 * (meas.theta - xd.theta) -
          k.k4 * (meas.theta_dot - xd.theta_dot);
  fb.f2 = -k.k5 * (meas.l - xd.l) - k.k6 * (meas.l_dot - xd.l_dot);
  return fb;
}

Actuation control_inputs(const OutputJet& jet_d, const DesiredState& xd,
                         const CraneState& meas,
                         const stability::ValidatedGains& gains,
                         const PhysParams& p) {
  const FeedforwardOut ff = feedforward(jet_d, xd, meas.f2, meas.f2_dot, p);
  const FeedbackTerms fb = limited_feedback(xd, meas, gains.gains());
  Actuation a;
  a.force.f1 = ff.f1 + fb.f1;
  a.force.f2 = meas.f2 + fb.f2;
  a.f2_ddot = ff.f2_ddot;
  return a;
}

LinearizationPoles LinearizationPoles::repeated(double pole) {
  const double p2 = pole * pole;
  const std::array<double, 4> a{p2 * p2, 4.0 * p2 * pole, 6.0 * p2,
                                4.0 * pole};
  return {a, a};
}

Actuation exact_linearization_inputs(const OutputJet& jet_d,
                                     const CraneState& meas,
                                     const LinearizationPoles& poles,
                                     const PhysParams& p) {
  const OutputJet y = output_jet_through_jerk(meas, p);
  double v1 = jet_d.y1[4];
  double v2 = jet_d.y2[4];
  for (int i = 0; i < 4; ++i) {
    v1 -= poles.a1[i] * (y.y1[i] - jet_d.y1[i]);
    v2 -= poles.a2[i] * (y.y2[i] - jet_d.y2[i]);
  }
  const FeedforwardOut u =
      linearizing_inputs(meas.l, meas.theta, meas.theta_dot, meas.l_dot,
                         meas.f2, meas.f2_dot, v1, v2, p);
  Actuation a;
  a.force.f1 = u.f1;
  a.force.f2 = meas.f2;
  a.f2_ddot = u.f2_ddot;
  return a;
}

}  // namespace crane::flat
