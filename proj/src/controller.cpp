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

#include "crane/controller.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

namespace crane::ctl {

const char* to_string(Mode m) {
  switch (m) {
    case Mode::kSC: return "SC";
    case Mode::kVC: return "VC";
    case Mode::kFFOnly: return "FF_ONLY";
    case Mode::kExact: return "EXACT";
  }
  return "?";
}

std::optional<Mode> mode_from_string(std::string_view s) {
  if (s == "SC") return Mode::kSC;
  if (s == "VC") return Mode::kVC;
  if (s == "FF_ONLY") return Mode::kFFOnly;
  if (s == "EXACT") return Mode::kExact;
  return std::nullopt;
}

const char* to_string(Anchor a) {
  return a == Anchor::kDesired ? "desired" : "measured";
}

std::optional<Anchor> anchor_from_string(std::string_view s) {
  if (s == "desired") return Anchor::kDesired;
  if (s == "measured") return Anchor::kMeasured;
  return std::nullopt;
}

namespace {

bool needs_gains(Mode m) { return m == Mode::kSC || m == Mode::kVC; }

double clamp_axis(double j) {
  return std::isfinite(j) ? std::clamp(j, -1.0, 1.0) : 0.0;
}

}  // namespace

Controller::Controller(ControllerConfig config,
                       const plan::Workspace* workspace, double l0)
    : config_(std::move(config)),
      workspace_(workspace),
      poles_(flat::LinearizationPoles::repeated(config_.exact_pole)),
      mode_(config_.mode) {
  config_.model.validate();
  config_.cmd.validate();
  if (config_.replan_every < 1) {
    throw std::invalid_argument("replan_every must be >= 1");
  }
  if (!config_.gains.is_zero() || needs_gains(mode_)) {
    gains_ = stability::ValidatedGains::validate(config_.gains, config_.model,
                                                 l0);
  }
  last_applied_.force = {0.0, config_.model.equilibrium_f2()};
}

void Controller::set_scripted_reference(ScriptedReference ref) {
  scripted_ = std::move(ref);
}

void Controller::enter_fault(Fault f, std::string message) {
  if (fault_) return;
  fault_ = f;
  fault_message_ = std::move(message);
}

flat::OutputJet Controller::reference_at(double t) const {
  return scripted_ ? scripted_(t) : segment_.eval(t);
}

std::optional<ExtendedReset> Controller::begin_step(std::int64_t step,
                                                    double t, double dt,
                                                    const CraneState& measured,
                                                    Joystick js) {
  std::optional<ExtendedReset> reset;
  if (pending_mode_) {
    const Mode next = *pending_mode_;
    pending_mode_.reset();
    if (next != mode_) {
      if (needs_gains(next) && !gains_) {
        throw CraneError(Fault::kGainReject,
                         std::string("no validated gains for mode ") +
                             to_string(next));
      }
      const bool was_flat = flatness_mode();
      mode_ = next;
      needs_anchor_from_state_ = true;
      if (flatness_mode() && !was_flat) {
        reset = ExtendedReset{last_applied_.force.f2, 0.0};
        has_segment_ = false;
      }
    }
  }
  if (faulted()) return reset;

  const bool sample = step % config_.replan_every == 0;
  if (sample) joystick_ = {clamp_axis(js.j1), clamp_axis(js.j2)};

  if (mode_ == Mode::kVC) {
    begin_vc(t, dt, measured);
    return reset;
  }

  CraneState m = measured;
  if (reset) {
    m.f2 = reset->f2;
    m.f2_dot = reset->f2_dot;
  }
  if (!scripted_ && (sample || !has_segment_)) replan(t, m);
  desired_jet_ = reference_at(t);
  desired_state_ = flat::desired_state(desired_jet_, config_.model.g);
  feedback_ = (mode_ == Mode::kSC)
                  ? flat::limited_feedback(desired_state_, m, gains_->gains())
                  : flat::FeedbackTerms{};
  return reset;
}

void Controller::replan(double t, const CraneState& measured) {
  flat::OutputJet base;
  if (config_.anchor == Anchor::kDesired && has_segment_ &&
      !needs_anchor_from_state_) {
    base = segment_.eval(t);
  } else {
    CraneState applied = measured;
    applied.f2 = last_applied_.force.f2;
    base = flat::output_jet_from_state(applied, last_applied_.force.f1,
                                       last_applied_.f2_ddot, config_.model);
  }
  needs_anchor_from_state_ = false;

  const OutputPoint current = base.point();
  plan::ReferenceCmd cmd = config_.cmd;
  cmd.j1 = joystick_.j1;
  cmd.j2 = joystick_.j2;
  nominal_ = plan::reference_from_joystick(cmd, current);
  corrected_ = workspace_ ? plan::correct_reference(current, nominal_,
                                                    *workspace_, cmd.epsilon)
                          : nominal_;

  const plan::PolySegment candidate =
      plan::plan_segment(base, corrected_, t, cmd.T);
  const plan::SegmentCheck check = plan::check_segment(
      candidate, workspace_, config_.model.g,
      config_.slack_margin_g * config_.model.g, config_.check_samples);
  if (check.ok) {
    segment_ = candidate;
    has_segment_ = true;
    return;
  }
  ++rejected_plans_;
  if (!has_segment_) {
    segment_ = plan::PolySegment::hold(current, t, cmd.T);
    has_segment_ = true;
  }
}

void Controller::begin_vc(double t, double dt, const CraneState& measured) {
  if (scripted_) {
    const flat::OutputJet r = scripted_(t);
    vc_x_ = r.y1[0];
    vc_x_dot_ = r.y1[1];
    vc_l_ = -r.y2[0];
    vc_l_dot_ = -r.y2[1];
  } else {
    if (needs_anchor_from_state_) {
      vc_x_ = measured.x;
      vc_l_ = measured.l;
      needs_anchor_from_state_ = false;
    }
    vc_x_dot_ = config_.cmd.alpha1 * joystick_.j1;
    vc_l_dot_ = -config_.cmd.alpha2 * joystick_.j2;
  }

  const stability::GainSet& k = gains_->gains();
  feedback_.f1 = -k.k1 * (measured.x - vc_x_) - k.k2 *
                 (measured.x_dot - vc_x_dot_);
  feedback_.f2 = config_.model.equilibrium_f2() -
                 k.k5 * (measured.l - vc_l_) -
                 k.k6 * (measured.l_dot - vc_l_dot_);

  desired_jet_ = flat::OutputJet{};
  desired_jet_.y1[0] = vc_x_;
  desired_jet_.y1[1] = vc_x_dot_;
  desired_jet_.y2[0] = -vc_l_;
  desired_jet_.y2[1] = -vc_l_dot_;
  desired_state_ = {vc_x_, vc_x_dot_, vc_l_, vc_l_dot_, 0.0, 0.0};

  if (!scripted_) {
    vc_x_ += vc_x_dot_ * dt;
    vc_l_ += vc_l_dot_ * dt;
  }
}

Actuation Controller::actuation(double t, const CraneState& stage) const {
  Actuation a;
  if (faulted()) {
    a.force = last_applied_.force;
    return a;
  }
  switch (mode_) {
    case Mode::kVC:
      a.force = {feedback_.f1, feedback_.f2};
      break;
    case Mode::kExact:
      a = flat::exact_linearization_inputs(reference_at(t), stage, poles_,
                                           config_.model);
      break;
    case Mode::kSC:
    case Mode::kFFOnly: {
      const flat::OutputJet jet = reference_at(t);
      const flat::DesiredState xd = flat::desired_state(jet, config_.model.g);
      const flat::FeedforwardOut ff =
          flat::feedforward(jet, xd, stage.f2, stage.f2_dot, config_.model);
      a.force = {ff.f1 + feedback_.f1, stage.f2 + feedback_.f2};
      a.f2_ddot = ff.f2_ddot;
      break;
    }
  }
  a.force = config_.limits.apply(a.force);
  return a;
}

}  // namespace crane::ctl
