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

#include "crane/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <ostream>

#include "crane/planner.hpp"

namespace crane {
namespace {

constexpr double kRadToDeg = 180.0 / std::numbers::pi;

void append_number(std::string& out, double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  out += buf;
}

}  // namespace

std::string format_trace_row(const TraceRow& r) {
  std::string out;
  out.reserve(200);
  const double values[] = {r.t,     r.x,  r.x_dot, r.theta, r.theta_dot,
                           r.l,     r.l_dot, r.y1, r.y2,   r.y1_d,
                           r.y2_d,  r.f1, r.f2};
  for (double v : values) {
    append_number(out, v);
    out.push_back(',');
  }
  out.push_back(r.collision ? '1' : '0');
  return out;
}

void write_trace_csv(std::ostream& out, const std::vector<TraceRow>& rows) {
  out << kTraceHeader << '\n';
  for (const TraceRow& r : rows) out << format_trace_row(r) << '\n';
}

Simulation::Simulation(const Scenario& scenario) : scenario_(scenario) {
  reset();
}

void Simulation::reset() {
  const plan::Workspace* ws =
      scenario_.has_workspace ? &scenario_.workspace : nullptr;
  controller_.emplace(scenario_.controller, ws, scenario_.l0);
  if (scenario_.reference == ReferenceKind::kRamp) {
    const RampReference ramp = scenario_.ramp;
    const OutputPoint start = scenario_.start_point();
    controller_->set_scripted_reference([ramp, start](double t) {
      flat::OutputJet j =
          plan::ramp_trajectory(ramp.dy1, ramp.dy2, ramp.Tt, ramp.alpha, t);
      j.y1[0] += start.y1;
      j.y2[0] += start.y2;
      return j;
    });
  }
  sensor_.emplace(scenario_.noise, scenario_.seed);
  state_ = CraneState::at_rest(scenario_.x0, scenario_.l0,
                               scenario_.controller.model);
  step_ = 0;
  next_switch_ = 0;
  halted_ = false;
  finalized_ = false;
  fault_time_.reset();
  trace_.clear();
}

bool Simulation::in_collision() const {
  return scenario_.has_workspace &&
         scenario_.workspace.inside_any_box(output_map(state_));
}

void Simulation::apply_scheduled_switches() {
  const double t = time();
  const auto& sw = scenario_.mode_switches;
  while (next_switch_ < sw.size() && sw[next_switch_].t <= t + 1e-9) {
    controller_->request_mode(sw[next_switch_].mode);
    ++next_switch_;
  }
}

TraceRow Simulation::make_row(const Actuation& applied) const {
  TraceRow r;
  r.t = state_.t;
  r.x = state_.x;
  r.x_dot = state_.x_dot;
  r.theta = state_.theta;
  r.theta_dot = state_.theta_dot;
  r.l = state_.l;
  r.l_dot = state_.l_dot;
  const OutputPoint y = output_map(state_);
  r.y1 = y.y1;
  r.y2 = y.y2;
  const OutputPoint yd = controller_->desired_jet().point();
  r.y1_d = yd.y1;
  r.y2_d = yd.y2;
  r.f1 = applied.force.f1;
  r.f2 = applied.force.f2;
  r.collision = scenario_.has_workspace &&
                scenario_.workspace.inside_any_box(y);
  return r;
}

void Simulation::step(ctl::Joystick js) {
  if (done()) return;
  apply_scheduled_switches();
  const double t = time();
  const double dt = scenario_.dt;
  state_.t = t;
  ctl::Controller& ctrl = *controller_;

  const CraneState measured = measured_state(sensor_->read(state_), state_);
  try {
    if (const auto reset = ctrl.begin_step(step_, t, dt, measured, js)) {
      state_.f2 = reset->f2;
      state_.f2_dot = reset->f2_dot;
    }
  } catch (const CraneError& e) {
    ctrl.enter_fault(e.fault(), e.what());
    if (!fault_time_) fault_time_ = t;
  }

  Actuation applied;
  bool first = true;
  auto law = [&](double tt, const CraneState& st) {
    const Actuation a = ctrl.actuation(tt, st);
    if (first) {
      applied = a;
      first = false;
    }
    return a;
  };

  CraneState next;
  try {
    next = crane::step(state_, law, scenario_.plant, dt);
  } catch (const CraneError& e) {
    ctrl.enter_fault(e.fault(), e.what());
    if (!fault_time_) fault_time_ = t;
    first = true;
    try {
      next = crane::step(state_, law, scenario_.plant, dt);
    } catch (const CraneError&) {
      halted_ = true;
      Actuation frozen;
      frozen.force = ctrl.last_applied().force;
      emit_row(frozen);
      finalized_ = true;
      return;
    }
  }
  ctrl.record_applied(applied);
  emit_row(applied);
  state_ = next;
  ++step_;
  state_.t = time();
}

void Simulation::run_to_end() {
  while (!done()) step(scenario_.joystick_at(time()));
}

void Simulation::emit_row(const Actuation& applied) {
  if (!record_ && !sink_) return;
  const TraceRow row = make_row(applied);
  if (sink_) sink_(row);
  if (record_) trace_.push_back(row);
}

void Simulation::finalize() {
  if (finalized_) return;
  finalized_ = true;
  emit_row(controller_->last_applied());
}

double residual_window_start(const Scenario& s) {
  if (s.metrics.window_start) return *s.metrics.window_start;
  if (s.reference == ReferenceKind::kRamp) {
    // Arrival of the smoothed trajectory: the lag cascade needs about 10/alpha
    // to settle after the nominal path stops.
    return 2.0 * s.ramp.Tt + 10.0 / s.ramp.alpha;
  }
  double release = 0.0;
  bool moved = false;
  for (std::size_t i = 0; i < s.tape.size(); ++i) {
    if (s.tape[i].j1 != 0.0 || s.tape[i].j2 != 0.0) {
      moved = true;
      release = (i + 1 < s.tape.size()) ? s.tape[i + 1].t : s.duration;
    }
  }
  if (!moved) return 0.0;
  const double period = s.controller.replan_every * s.dt;
  release = std::ceil(release / period - 1e-9) * period;
  return release + s.controller.cmd.T;
}

RunMetrics compute_metrics(const Scenario& s,
                           const std::vector<TraceRow>& trace) {
  RunMetrics m;
  m.window_start = residual_window_start(s);
  m.window_end = s.metrics.window_end.value_or(s.duration);
  if (trace.empty()) return m;

  double sq = 0.0;
  for (const TraceRow& r : trace) {
    if (r.t >= m.window_start - 1e-9 && r.t <= m.window_end + 1e-9) {
      m.residual_osc_deg =
          std::max(m.residual_osc_deg, std::abs(r.theta) * kRadToDeg);
    }
    const double e1 = r.y1 - r.y1_d;
    const double e2 = r.y2 - r.y2_d;
    sq += e1 * e1 + e2 * e2;
    if (r.collision && !m.collision) {
      m.collision = true;
      m.first_contact_time = r.t;
    }
    if (s.has_workspace && !s.workspace.inside_bounds({r.y1, r.y2})) {
      m.left_workspace = true;
    }
    m.f1_peak = std::max(m.f1_peak, std::abs(r.f1));
    m.f2_peak = std::max(m.f2_peak, std::abs(r.f2));
  }
  m.tracking_rmse = std::sqrt(sq / static_cast<double>(trace.size()));

  const TraceRow& last = trace.back();
  const OutputPoint target =
      s.metrics.target.value_or(OutputPoint{last.y1_d, last.y2_d});
  m.final_y1 = last.y1;
  m.final_y2 = last.y2;
  m.terminal_error_y1 = std::abs(last.y1 - target.y1);
  m.terminal_error_y2 = std::abs(last.y2 - target.y2);
  m.terminal_theta_deg = last.theta * kRadToDeg;
  m.terminal_theta_dot_deg = last.theta_dot * kRadToDeg;

  std::size_t settled_from = trace.size();
  for (std::size_t i = trace.size(); i-- > 0;) {
    const double d = std::hypot(trace[i].y1 - target.y1,
                                trace[i].y2 - target.y2);
    if (d > s.metrics.completion_tol) break;
    settled_from = i;
  }
  if (settled_from < trace.size()) m.completion_time = trace[settled_from].t;
  return m;
}

RunMetrics Simulation::metrics() const {
  RunMetrics m = compute_metrics(scenario_, trace_);
  const ctl::Controller& c = *controller_;
  m.rejected_plans = c.rejected_plans();
  m.mode = c.mode();
  m.halted = halted_;
  if (c.faulted()) {
    m.faulted = true;
    m.fault = c.fault_message();
    m.fault_time = fault_time_;
    m.terminal_error_y1 = std::numeric_limits<double>::infinity();
    m.terminal_error_y2 = std::numeric_limits<double>::infinity();
  }
  return m;
}

Json metrics_to_json(const RunMetrics& m) {
  auto opt = [](const std::optional<double>& v) -> Json {
    return v ? Json(*v) : Json(nullptr);
  };
  // JSON has no infinity; faulted terminal errors are reported as null.
  auto fin = [](double v) -> Json {
    return std::isfinite(v) ? Json(v) : Json(nullptr);
  };
  Json j;
  j["residual_osc_deg"] = m.residual_osc_deg;
  j["residual_window"] = {m.window_start, m.window_end};
  j["tracking_rmse"] = m.tracking_rmse;
  j["collision"] = m.collision;
  j["first_contact_time"] = opt(m.first_contact_time);
  j["left_workspace"] = m.left_workspace;
  j["completion_time"] = opt(m.completion_time);
  j["f1_peak"] = m.f1_peak;
  j["f2_peak"] = m.f2_peak;
  j["final_y1"] = m.final_y1;
  j["final_y2"] = m.final_y2;
  j["terminal_error_y1"] = fin(m.terminal_error_y1);
  j["terminal_error_y2"] = fin(m.terminal_error_y2);
  j["terminal_theta_deg"] = m.terminal_theta_deg;
  j["terminal_theta_dot_deg"] = m.terminal_theta_dot_deg;
  j["rejected_plans"] = m.rejected_plans;
  j["faulted"] = m.faulted;
  j["halted"] = m.halted;
  j["fault"] = m.fault;
  j["fault_time"] = opt(m.fault_time);
  j["mode"] = ctl::to_string(m.mode);
  j["ok"] = m.ok();
  return j;
}

RunResult run_scenario(const Scenario& scenario, bool keep_trace) {
  Simulation sim(scenario);
  sim.run_to_end();
  sim.finalize();
  RunResult r;
  r.metrics = sim.metrics();
  if (keep_trace) r.trace = sim.trace();
  return r;
}

}  // namespace crane
