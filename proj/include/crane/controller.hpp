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

// Closed-loop controllers driving the plant one control step at a time.
//
//   SC       replan a rest-terminating segment toward the collision-corrected
//            joystick reference, feedforward + limited state feedback
//   FF_ONLY  SC with all feedback gains at zero
//   EXACT    SC reference tracked by full exact linearization
//   VC       decoupled PD on (x, l) toward (y1, -y2) of the reference; no
//            swing compensation and no collision correction
//
// Per step the owner calls begin_step() with the sensed state, then hands
// actuation() to the integrator as the control law for that step. Feedback
// terms are sampled at the step start; feedforward is evaluated at every
// integrator stage from the stage's extended force states.

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>

#include "crane/flatness.hpp"
#include "crane/model.hpp"
#include "crane/planner.hpp"
#include "crane/stability.hpp"

namespace crane::ctl {

enum class Mode { kSC, kVC, kFFOnly, kExact };
const char* to_string(Mode m);
std::optional<Mode> mode_from_string(std::string_view s);

/// Where a replan takes its initial jet and ray base from.
enum class Anchor {
  kDesired,   // the active desired trajectory at the replan time
  kMeasured,  // the jet reconstructed from the sensed state every replan
};
const char* to_string(Anchor a);
std::optional<Anchor> anchor_from_string(std::string_view s);

struct Joystick {
  double j1 = 0.0;
  double j2 = 0.0;
};

struct ControllerConfig {
  Mode mode = Mode::kSC;
  stability::GainSet gains = stability::experiment_gains();
  plan::ReferenceCmd cmd;
  PhysParams model;  // the controller's belief; the plant may differ
  Anchor anchor = Anchor::kDesired;
  int replan_every = 20;        // control steps between replans
  double slack_margin_g = 0.5;  // reject plans with y2'' <= -g + margin*g
  int check_samples = 128;
  double exact_pole = 4.0;  // rad/s, all error poles for EXACT
  ActuatorLimits limits;
};

/// Time-parameterized desired output (absolute coordinates).
using ScriptedReference = std::function<flat::OutputJet(double)>;

/// Extended-state values the owner must write into the plant state before
/// integrating the current step.
struct ExtendedReset {
  double f2 = 0.0;
  double f2_dot = 0.0;
};

class Controller {
 public:
  /// Throws CraneError(kGainReject) when SC or VC gains fail the closed-loop
  /// conditions at l0, std::invalid_argument on a bad config.
  Controller(ControllerConfig config, const plan::Workspace* workspace,
             double l0);

  /// Track a fixed trajectory instead of joystick replanning.
  void set_scripted_reference(ScriptedReference ref);
  bool scripted() const { return static_cast<bool>(scripted_); }

  /// Takes effect at the next begin_step.
  void request_mode(Mode m) { pending_mode_ = m; }
  Mode mode() const { return mode_; }

  /// Samples the joystick, replans when due and fixes the feedback terms for
  /// the step [t, t + dt). `measured` carries sensed positions; its extended
  /// states are the controller's integrated force. Returns a reset when the
  /// controller (re)enters a flatness mode. Faults raised while planning are
  /// thrown as CraneError.
  std::optional<ExtendedReset> begin_step(std::int64_t step, double t,
                                          double dt, const CraneState& measured,
                                          Joystick js);

  /// The control law for the current step; may throw CraneError.
  Actuation actuation(double t, const CraneState& stage) const;

  /// Called by the owner after a step succeeded with the actuation applied at
  /// its start.
  void record_applied(const Actuation& a) { last_applied_ = a; }
  const Actuation& last_applied() const { return last_applied_; }

  /// Forces stay frozen at the last applied value from now on.
  void enter_fault(Fault f, std::string message);
  bool faulted() const { return fault_.has_value(); }
  std::optional<Fault> fault() const { return fault_; }
  const std::string& fault_message() const { return fault_message_; }

  // Telemetry of the current step.
  const flat::OutputJet& desired_jet() const { return desired_jet_; }
  const flat::DesiredState& desired_state() const { return desired_state_; }
  OutputPoint nominal_reference() const { return nominal_; }
  OutputPoint corrected_reference() const { return corrected_; }
  const plan::PolySegment& segment() const { return segment_; }
  bool has_segment() const { return has_segment_; }
  int rejected_plans() const { return rejected_plans_; }
  const ControllerConfig& config() const { return config_; }
  Joystick joystick() const { return joystick_; }

 private:
  bool flatness_mode() const { return mode_ != Mode::kVC; }
  flat::OutputJet reference_at(double t) const;
  void replan(double t, const CraneState& measured);
  void begin_vc(double t, double dt, const CraneState& measured);

  ControllerConfig config_;
  const plan::Workspace* workspace_;
  std::optional<stability::ValidatedGains> gains_;
  flat::LinearizationPoles poles_;
  ScriptedReference scripted_;

  Mode mode_;
  std::optional<Mode> pending_mode_;
  bool needs_anchor_from_state_ = true;

  Joystick joystick_;
  plan::PolySegment segment_;
  bool has_segment_ = false;
  OutputPoint nominal_;
  OutputPoint corrected_;
  int rejected_plans_ = 0;

  flat::OutputJet desired_jet_;
  flat::DesiredState desired_state_;
  flat::FeedbackTerms feedback_;

  // VC setpoint for (x, l) and its rate.
  double vc_x_ = 0.0;
  double vc_x_dot_ = 0.0;
  double vc_l_ = 0.0;
  double vc_l_dot_ = 0.0;

  Actuation last_applied_;
  std::optional<Fault> fault_;
  std::string fault_message_;
};

}  // namespace crane::ctl
