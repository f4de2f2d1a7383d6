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

// The payload coordinates (y1, y2) are flat outputs of the crane. With the
// cable force promoted to a doubly-integrated state (f2, f2_dot), the fourth
// output derivative depends affinely on (f1, f2_ddot) through
//
//   beta = 1/m [ -f2 c^2 / (M l)   s ]
//              [ -f2 c s / (M l)  -c ],     det = f2 c / (M l m^2),
//
// so both inputs follow from a desired output jet wherever l != 0,
// |theta| < pi/2 and f2 < 0.

#pragma once

#include <array>

#include "crane/model.hpp"
#include "crane/stability.hpp"

namespace crane::flat {

inline constexpr int kJetOrder = 4;

/// Output value and time derivatives 0..4 for both payload coordinates.
struct OutputJet {
  std::array<double, kJetOrder + 1> y1{};
  std::array<double, kJetOrder + 1> y2{};

  OutputPoint point() const { return {y1[0], y2[0]}; }
  static OutputJet at_rest(OutputPoint p) {
    OutputJet j;
    j.y1[0] = p.y1;
    j.y2[0] = p.y2;
    return j;
  }
  bool is_finite() const;
};

struct DesiredState {
  double x = 0.0;
  double x_dot = 0.0;
  double l = 0.0;
  double l_dot = 0.0;
  double theta = 0.0;
  double theta_dot = 0.0;
};

struct FeedforwardOut {
  double f1 = 0.0;
  double f2_ddot = 0.0;
};

/// Jet of the plant outputs. `state.f2` and `state.f2_dot` are the cable force
/// and its rate actually applied; f1 and f2_ddot enter the fourth derivative.
OutputJet output_jet_from_state(const CraneState& state, double f1,
                                double f2_ddot, const PhysParams& params);

/// Orders 0..3 only (order 4 left at zero); needs no input.
OutputJet output_jet_through_jerk(const CraneState& state,
                                  const PhysParams& params);

/// Algebraic state reconstruction from a desired jet.
/// Throws kCableSlack if y2'' + g <= 1e-6, kDegenerateLength if l_d <= 0.
DesiredState desired_state(const OutputJet& jet, double g);

/// Inputs (f1, f2_ddot) that make y^(4) = v given the quantities entering
/// beta and the drift term. Throws kBetaSingular when beta is not invertible
/// or |f2 cos(theta)| < 1e-6.
FeedforwardOut linearizing_inputs(double l, double theta, double theta_dot,
                                  double l_dot, double f2, double f2_dot,
                                  double v1, double v2,
                                  const PhysParams& params);

/// Open-loop inputs evaluated along the desired trajectory, with the
/// integrated cable force (f2, f2_dot).
FeedforwardOut feedforward(const OutputJet& jet_d, const DesiredState& state_d,
                           double f2, double f2_dot, const PhysParams& params);

struct FeedbackTerms {
  double f1 = 0.0;
  double f2 = 0.0;
};

/// -K (X - X_d) with the limited gain structure.
FeedbackTerms limited_feedback(const DesiredState& state_d,
                               const CraneState& measured,
                               const stability::GainSet& gains);

/// Feedforward plus limited state feedback. `measured.f2`/`f2_dot` carry the
/// double-integrated feedforward force; the returned f2 adds the length
/// feedback outside that integral.
Actuation control_inputs(const OutputJet& jet_d, const DesiredState& state_d,
                         const CraneState& measured,
                         const stability::ValidatedGains& gains,
                         const PhysParams& params);

/// Error-polynomial coefficients (a0..a3) for each output; the closed-loop
/// error obeys e^(4) + a3 e^(3) + a2 e'' + a1 e' + a0 e = 0.
struct LinearizationPoles {
  std::array<double, 4> a1{};
  std::array<double, 4> a2{};

  /// Both outputs with all four error poles at s = -p.
  static LinearizationPoles repeated(double p);
};

/// Full exact-feedback-linearization inputs using the measured jet through
/// the third derivative. The returned f2 is the integrated state itself.
Actuation exact_linearization_inputs(const OutputJet& jet_d,
                                     const CraneState& measured,
                                     const LinearizationPoles& poles,
                                     const PhysParams& params);

}  // namespace crane::flat
