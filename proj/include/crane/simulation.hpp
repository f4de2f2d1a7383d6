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

// One plant + controller + sensor loop at the control rate, shared by the
// headless harness and the live teleoperation session.

#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "crane/controller.hpp"
#include "crane/scenario.hpp"
#include "crane/sensor.hpp"

namespace crane {

struct TraceRow {
  double t = 0.0;
  double x = 0.0;
  double x_dot = 0.0;
  double theta = 0.0;
  double theta_dot = 0.0;
  double l = 0.0;
  double l_dot = 0.0;
  double y1 = 0.0;
  double y2 = 0.0;
  double y1_d = 0.0;
  double y2_d = 0.0;
  double f1 = 0.0;
  double f2 = 0.0;
  bool collision = false;
};

inline constexpr const char* kTraceHeader =
    "t,x,x_dot,theta,theta_dot,l,l_dot,y1,y2,y1_d,y2_d,f1,f2,collision";

/// Header line plus one row per sample, 9 significant digits, LF endings.
void write_trace_csv(std::ostream& out, const std::vector<TraceRow>& rows);
std::string format_trace_row(const TraceRow& row);

struct RunMetrics {
  double residual_osc_deg = 0.0;
  double window_start = 0.0;
  double window_end = 0.0;
  double tracking_rmse = 0.0;
  bool collision = false;
  std::optional<double> first_contact_time;
  bool left_workspace = false;
  std::optional<double> completion_time;
  double f1_peak = 0.0;  // max |f1|
  double f2_peak = 0.0;  // max |f2|
  double final_y1 = 0.0;
  double final_y2 = 0.0;
  double terminal_error_y1 = 0.0;  // +inf for faulted runs
  double terminal_error_y2 = 0.0;
  double terminal_theta_deg = 0.0;
  double terminal_theta_dot_deg = 0.0;  // deg/s
  int rejected_plans = 0;
  bool faulted = false;
  bool halted = false;  // plant could not be integrated further
  std::string fault;
  std::optional<double> fault_time;
  ctl::Mode mode = ctl::Mode::kSC;  // at the end of the run

  /// Exit criterion: no fault, and no collision while in SC.
  bool ok() const { return !faulted && !(mode == ctl::Mode::kSC && collision); }
};

class Simulation {
 public:
  /// Throws CraneError(kGainReject) or std::invalid_argument on a config the
  /// controller refuses.
  explicit Simulation(const Scenario& scenario);

  /// One control step with `js` as the operator's current joystick value.
  /// The controller samples it at its own rate.
  void step(ctl::Joystick js);
  /// Steps until the scenario duration using its joystick tape and mode
  /// switches.
  void run_to_end();

  /// Appends the closing trace row (state at the current time).
  void finalize();

  /// Restarts from the scenario's initial state.
  void reset();

  bool done() const {
    return halted_ || (!open_ended_ && step_ >= scenario_.steps());
  }
  bool halted() const { return halted_; }
  double time() const { return static_cast<double>(step_) * scenario_.dt; }
  std::int64_t step_index() const { return step_; }
  const CraneState& state() const { return state_; }
  const Scenario& scenario() const { return scenario_; }
  const ctl::Controller& controller() const { return *controller_; }
  ctl::Controller& controller() { return *controller_; }
  const std::vector<TraceRow>& trace() const { return trace_; }
  const TraceRow* last_row() const {
    return trace_.empty() ? nullptr : &trace_.back();
  }
  bool in_collision() const;
  std::optional<double> fault_time() const { return fault_time_; }

  void set_record_trace(bool on) { record_ = on; }
  /// Ignore the scenario duration; only a halt ends the run.
  void set_open_ended(bool on) { open_ended_ = on; }
  /// Called with every trace row as it is produced, whether or not rows are
  /// kept in memory.
  using RowSink = std::function<void(const TraceRow&)>;
  void set_row_sink(RowSink sink) { sink_ = std::move(sink); }

  RunMetrics metrics() const;

 private:
  TraceRow make_row(const Actuation& applied) const;
  void emit_row(const Actuation& applied);
  void apply_scheduled_switches();

  Scenario scenario_;
  CraneState state_;
  std::optional<ctl::Controller> controller_;
  std::optional<Sensor> sensor_;
  std::int64_t step_ = 0;
  std::size_t next_switch_ = 0;
  bool halted_ = false;
  bool finalized_ = false;
  bool record_ = true;
  bool open_ended_ = false;
  RowSink sink_;
  std::optional<double> fault_time_;
  std::vector<TraceRow> trace_;
};

/// Metrics over a finished trace. `halted`, fault info and rejected-plan
/// counts come from the simulation.
RunMetrics compute_metrics(const Scenario& scenario,
                           const std::vector<TraceRow>& trace);

/// Start of the residual-oscillation window for a scenario.
double residual_window_start(const Scenario& scenario);

/// Metrics as a JSON object; absent optionals become null.
Json metrics_to_json(const RunMetrics& m);

struct RunResult {
  RunMetrics metrics;
  std::vector<TraceRow> trace;
};

/// Full headless run of a scenario.
RunResult run_scenario(const Scenario& scenario, bool keep_trace = true);

}  // namespace crane
