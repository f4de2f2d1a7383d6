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

#include "crane/teleop/session.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <iostream>

namespace crane::teleop {
namespace {

Json pair(double a, double b) { return Json::array({a, b}); }
Json pair(OutputPoint p) { return pair(p.y1, p.y2); }

Json workspace_json(const Scenario& s) {
  if (!s.has_workspace) return nullptr;
  const plan::Workspace& ws = s.workspace;
  Json j;
  j["bounds"] = {{"y1", pair(ws.bounds().y1_min, ws.bounds().y1_max)},
                 {"y2", pair(ws.bounds().y2_min, ws.bounds().y2_max)}};
  j["boxes"] = Json::array();
  for (const plan::Box& b : ws.boxes()) {
    j["boxes"].push_back({{"y1", pair(b.y1_min, b.y1_max)},
                          {"y2", pair(b.y2_min, b.y2_max)}});
  }
  j["walls"] = Json::array();
  for (const plan::LineSegment& w : ws.extra_walls()) {
    j["walls"].push_back({{"from", pair(w.a)}, {"to", pair(w.b)}});
  }
  return j;
}

}  // namespace

Session::Session(Json scenario_doc, SessionOptions options, Loader loader,
                 Emit emit)
    : options_(std::move(options)),
      loader_(std::move(loader)),
      emit_(std::move(emit)),
      initial_doc_(scenario_doc),
      doc_(std::move(scenario_doc)) {
  if (!(options_.telemetry_hz > 0.0)) {
    throw std::invalid_argument("telemetry rate must be positive");
  }
  sim_ = std::make_unique<Simulation>(parse_scenario(doc_));
  start_run();
}

Session::~Session() {
  try {
    finish();
  } catch (...) {
  }
}

std::string Session::trace_path_for_run() const {
  if (run_ == 0) return options_.trace_path;
  const std::filesystem::path p(options_.trace_path);
  std::filesystem::path out = p.parent_path() / p.stem();
  out += "." + std::to_string(run_);
  out += p.extension();
  return out.string();
}

void Session::start_run() {
  const Scenario& s = sim_->scenario();
  telemetry_every_ = std::max<int>(
      1, static_cast<int>(std::llround(1.0 / (options_.telemetry_hz * s.dt))));
  js_ = {};
  sc_collision_ = false;
  sim_->set_open_ended(true);
  sim_->set_record_trace(false);
  if (trace_.is_open()) trace_.close();
  if (!options_.trace_path.empty()) {
    trace_.open(trace_path_for_run(), std::ios::binary | std::ios::trunc);
    if (!trace_) {
      std::clog << "[teleop] cannot write trace " << trace_path_for_run()
                << '\n';
    } else {
      trace_ << kTraceHeader << '\n';
    }
  }
  sim_->set_row_sink([this](const TraceRow& row) {
    if (row.collision && sim_->controller().mode() == ctl::Mode::kSC) {
      sc_collision_ = true;
    }
    if (trace_.is_open()) trace_ << format_trace_row(row) << '\n';
  });
  emit(hello());
}

void Session::finish() {
  if (!sim_) return;
  sim_->finalize();
  if (trace_.is_open()) trace_.flush();
}

bool Session::handle(const OperatorMsg& in) {
  if (options_.lockstep && in.t) advance_to(*in.t);

  OperatorMsg msg = in;
  msg.t = time();
  switch (msg.kind) {
    case MsgKind::kJoystick:
      js_ = msg.js;
      break;
    case MsgKind::kMode:
      sim_->controller().request_mode(msg.mode);
      break;
    case MsgKind::kReset:
      finish();
      ++run_;
      sim_->reset();
      start_run();
      break;
    case MsgKind::kLoadScenario: {
      Json doc;
      try {
        if (msg.scenario) {
          doc = *msg.scenario;
        } else if (loader_) {
          doc = loader_(msg.scenario_id);
        } else {
          throw std::runtime_error("no scenario directory");
        }
        auto next = std::make_unique<Simulation>(parse_scenario(doc));
        finish();
        ++run_;
        sim_ = std::move(next);
        doc_ = doc;
      } catch (const std::exception& e) {
        emit(error_frame("load_scenario \"" + msg.scenario_id +
                         "\" failed: " + e.what()));
        return false;
      }
      msg.scenario = doc_;
      start_run();
      break;
    }
    case MsgKind::kTaskComplete: {
      std::clog << "[teleop] task marked complete at t=" << time() << " s\n";
      Json j;
      j["v"] = kProtocolVersion;
      j["kind"] = "task_complete";
      j["run"] = run_;
      j["t"] = time();
      emit(j);
      break;
    }
  }
  tape_messages_.push_back(to_json(msg));
  return true;
}

void Session::step() {
  if (sim_->halted()) return;
  sim_->step(js_);
  if (sim_->step_index() % telemetry_every_ == 0 || sim_->halted()) {
    emit(telemetry());
  }
}

void Session::advance_to(double t) {
  while (!sim_->halted() && time() < t - 1e-9) step();
}

Json Session::hello() const {
  const Scenario& s = sim_->scenario();
  const ctl::ControllerConfig& c = s.controller;
  Json j;
  j["v"] = kProtocolVersion;
  j["kind"] = "hello";
  j["scenario"] = s.name;
  j["run"] = run_;
  j["dt"] = s.dt;
  j["telemetry_hz"] = options_.telemetry_hz;
  j["lockstep"] = options_.lockstep;
  j["mode"] = ctl::to_string(sim_->controller().mode());
  j["controller"] = {{"alpha1", c.cmd.alpha1},
                     {"alpha2", c.cmd.alpha2},
                     {"T", c.cmd.T},
                     {"epsilon", c.cmd.epsilon}};
  j["initial"] = {{"x", s.x0}, {"l", s.l0}};
  j["workspace"] = workspace_json(s);
  return j;
}

Json Session::telemetry() const {
  const CraneState& st = sim_->state();
  const ctl::Controller& c = sim_->controller();
  const OutputPoint y = output_map(st);
  const OutputPoint yd = c.desired_jet().point();
  Json j;
  j["v"] = kProtocolVersion;
  j["kind"] = "telemetry";
  j["run"] = run_;
  j["t"] = time();
  j["state"] = {{"x", st.x},         {"x_dot", st.x_dot}, {"theta", st.theta},
                {"theta_dot", st.theta_dot}, {"l", st.l},  {"l_dot", st.l_dot},
                {"f2", st.f2},       {"f2_dot", st.f2_dot}};
  j["output"] = {{"y1", y.y1}, {"y2", y.y2}};
  j["desired"] = {{"y1_d", yd.y1},
                  {"y2_d", yd.y2},
                  {"theta_d", c.desired_state().theta}};
  j["forces"] = {{"f1", c.last_applied().force.f1},
                 {"f2", c.last_applied().force.f2}};
  j["joystick"] = {{"j1", js_.j1}, {"j2", js_.j2}};
  j["reference"] = {{"nominal", pair(c.nominal_reference())},
                    {"corrected", pair(c.corrected_reference())}};
  if (c.has_segment()) {
    const plan::PolySegment& seg = c.segment();
    Json samples = Json::array();
    for (int i = 0; i < kSegmentSamples; ++i) {
      const double t = seg.t_start + seg.duration() * i / (kSegmentSamples - 1);
      samples.push_back(pair(seg.eval(t).point()));
    }
    j["segment"] = {{"t_start", seg.t_start},
                    {"t_end", seg.t_end},
                    {"start", samples.front()},
                    {"end", samples.back()},
                    {"samples", std::move(samples)}};
  } else {
    j["segment"] = nullptr;
  }
  const Scenario& s = sim_->scenario();
  j["collision"] = s.has_workspace && s.workspace.inside_any_box(y);
  j["mode"] = ctl::to_string(c.mode());
  j["unsafe"] = c.mode() == ctl::Mode::kVC;
  j["rejected_plans"] = c.rejected_plans();
  j["fault"] = c.faulted() ? Json(c.fault_message()) : Json(nullptr);
  return j;
}

Json Session::tape() const {
  Json j;
  j["v"] = kProtocolVersion;
  j["kind"] = "tape";
  j["scenario"] = initial_doc_;
  j["lockstep"] = options_.lockstep;
  j["messages"] = tape_messages_;
  j["end_t"] = time();
  return j;
}

std::unique_ptr<Session> replay(const Json& tape, SessionOptions options,
                                Session::Loader loader) {
  if (!tape.is_object() || tape.value("kind", "") != "tape" ||
      !tape.contains("scenario") || !tape.contains("messages") ||
      !tape["messages"].is_array()) {
    throw ProtocolError("not a session tape");
  }
  options.lockstep = true;
  auto session = std::make_unique<Session>(tape["scenario"], options,
                                           std::move(loader));
  for (const Json& m : tape["messages"]) {
    const OperatorMsg msg = parse_operator_json(m);
    if (!msg.t) throw ProtocolError("tape message without \"t\"");
    session->handle(msg);
  }
  if (tape.contains("end_t")) {
    if (!tape["end_t"].is_number()) throw ProtocolError("bad \"end_t\"");
    session->advance_to(tape["end_t"].get<double>());
  }
  session->finish();
  return session;
}

}  // namespace crane::teleop
