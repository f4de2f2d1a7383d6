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

// The simulation side of a teleoperation session, independent of transport.
// A session owns one Simulation, holds the latest joystick value between
// messages, emits hello/telemetry/error frames through a callback and keeps a
// tape of every applied message stamped with the session time it took effect.
//
// With `lockstep` the clock is driven by message timestamps: a message with
// "t" first advances the simulation to t. Feeding a tape recorded from any
// session back through a lockstep session reproduces its physics exactly.

#pragma once

#include <cstdint>
#include <fstream>
#include <functional>
#include <memory>
#include <string>

#include "crane/scenario.hpp"
#include "crane/simulation.hpp"
#include "crane/teleop/protocol.hpp"

namespace crane::teleop {

inline constexpr int kSegmentSamples = 20;

struct SessionOptions {
  bool lockstep = false;
  double telemetry_hz = 50.0;
  /// Trace CSV for the first run; later runs (after reset or load) go to
  /// <stem>.<run><ext>. Empty disables tracing.
  std::string trace_path;
};

class Session {
 public:
  using Emit = std::function<void(const Json& frame)>;
  /// Resolves a scenario id to its document; throws on unknown ids.
  using Loader = std::function<Json(const std::string& id)>;

  /// Throws ConfigError when the document is not a valid scenario.
  Session(Json scenario_doc, SessionOptions options, Loader loader = {},
          Emit emit = {});
  ~Session();

  Session(const Session&) = delete;
  Session& operator=(const Session&) = delete;

  void set_emit(Emit emit) { emit_ = std::move(emit); }

  /// Applies one operator message. Returns false (after emitting an error
  /// frame) when it was rejected.
  bool handle(const OperatorMsg& msg);

  /// One control step with the held joystick; emits telemetry on the
  /// decimation grid.
  void step();
  /// Steps while the session time is before t.
  void advance_to(double t);
  /// Closes the current run: final trace row, trace file flushed.
  void finish();

  double time() const { return sim_->time(); }
  std::int64_t step_index() const { return sim_->step_index(); }
  int run() const { return run_; }
  bool halted() const { return sim_->halted(); }
  const Simulation& sim() const { return *sim_; }
  const Scenario& scenario() const { return sim_->scenario(); }
  ctl::Joystick joystick() const { return js_; }
  bool lockstep() const { return options_.lockstep; }
  int telemetry_every() const { return telemetry_every_; }
  /// A collision happened while the controller was in SC.
  bool sc_collision() const { return sc_collision_; }

  Json hello() const;
  Json telemetry() const;

  /// {"v", "kind": "tape", "scenario", "lockstep", "messages", "end_t"}
  Json tape() const;

 private:
  void start_run();
  void emit(const Json& frame) const {
    if (emit_) emit_(frame);
  }
  std::string trace_path_for_run() const;

  SessionOptions options_;
  Loader loader_;
  Emit emit_;
  Json initial_doc_;
  Json doc_;
  std::unique_ptr<Simulation> sim_;
  ctl::Joystick js_;
  int run_ = 0;
  int telemetry_every_ = 20;
  bool sc_collision_ = false;
  std::ofstream trace_;
  Json tape_messages_ = Json::array();
};

/// Loads a tape file and plays it through a lockstep session up to its end
/// time. Returns the finished session.
std::unique_ptr<Session> replay(const Json& tape, SessionOptions options,
                                Session::Loader loader = {});

}  // namespace crane::teleop
