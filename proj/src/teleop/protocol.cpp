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

#include "crane/teleop/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>

namespace crane::teleop {
namespace {

double number(const Json& doc, const char* key) {
  const auto it = doc.find(key);
  if (it == doc.end()) throw ProtocolError(std::string("missing \"") + key + '"');
  if (!it->is_number()) {
    throw ProtocolError(std::string("\"") + key + "\" must be a number");
  }
  const double v = it->get<double>();
  if (!std::isfinite(v)) {
    throw ProtocolError(std::string("\"") + key + "\" must be finite");
  }
  return v;
}

std::string text(const Json& doc, const char* key) {
  const auto it = doc.find(key);
  if (it == doc.end()) throw ProtocolError(std::string("missing \"") + key + '"');
  if (!it->is_string()) {
    throw ProtocolError(std::string("\"") + key + "\" must be a string");
  }
  return it->get<std::string>();
}

void only_keys(const Json& doc, std::initializer_list<std::string_view> allowed) {
  for (const auto& [key, value] : doc.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw ProtocolError("unknown key \"" + key + '"');
    }
  }
}

double clamp_axis(double v, bool& clamped) {
  if (v > 1.0 || v < -1.0) {
    clamped = true;
    return std::clamp(v, -1.0, 1.0);
  }
  return v;
}

}  // namespace

const char* to_string(MsgKind k) {
  switch (k) {
    case MsgKind::kJoystick: return "joystick";
    case MsgKind::kMode: return "mode";
    case MsgKind::kReset: return "reset";
    case MsgKind::kLoadScenario: return "load_scenario";
    case MsgKind::kTaskComplete: return "mark_task_complete";
  }
  return "?";
}

bool valid_scenario_id(std::string_view id) {
  if (id.empty() || id.size() > 128) return false;
  return std::all_of(id.begin(), id.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
           (c >= '0' && c <= '9') || c == '_' || c == '-';
  });
}

OperatorMsg parse_operator_msg(std::string_view in) {
  const Json doc = Json::parse(in, nullptr, false);
  if (doc.is_discarded()) throw ProtocolError("message is not valid JSON");
  return parse_operator_json(doc);
}

OperatorMsg parse_operator_json(const Json& doc) {
  if (!doc.is_object()) throw ProtocolError("message must be a JSON object");
  const auto v = doc.find("v");
  if (v == doc.end() || !v->is_number_integer() ||
      v->get<int>() != kProtocolVersion) {
    throw ProtocolError("\"v\" must be 1");
  }
  const std::string kind = text(doc, "kind");

  OperatorMsg msg;
  if (doc.contains("t")) {
    msg.t = number(doc, "t");
    if (*msg.t < 0.0) throw ProtocolError("\"t\" must be >= 0");
  }

  if (kind == "joystick") {
    only_keys(doc, {"v", "kind", "t", "j1", "j2"});
    msg.kind = MsgKind::kJoystick;
    const double j1 = number(doc, "j1");
    const double j2 = number(doc, "j2");
    msg.js = {clamp_axis(j1, msg.clamped), clamp_axis(j2, msg.clamped)};
    if (msg.clamped) {
      std::clog << "[teleop] joystick (" << j1 << ", " << j2
                << ") clamped to [-1, 1]\n";
    }
  } else if (kind == "mode") {
    only_keys(doc, {"v", "kind", "t", "mode"});
    msg.kind = MsgKind::kMode;
    const std::string m = text(doc, "mode");
    if (m == "SC") {
      msg.mode = ctl::Mode::kSC;
    } else if (m == "VC") {
      msg.mode = ctl::Mode::kVC;
    } else {
      throw ProtocolError("\"mode\" must be \"SC\" or \"VC\"");
    }
  } else if (kind == "reset") {
    only_keys(doc, {"v", "kind", "t"});
    msg.kind = MsgKind::kReset;
  } else if (kind == "load_scenario") {
    only_keys(doc, {"v", "kind", "t", "id", "scenario"});
    msg.kind = MsgKind::kLoadScenario;
    if (doc.contains("scenario")) {
      if (!doc["scenario"].is_object()) {
        throw ProtocolError("\"scenario\" must be an object");
      }
      msg.scenario = doc["scenario"];
      if (doc.contains("id")) msg.scenario_id = text(doc, "id");
    } else {
      msg.scenario_id = text(doc, "id");
      if (!valid_scenario_id(msg.scenario_id)) {
        throw ProtocolError("\"id\" must use only letters, digits, '_', '-'");
      }
    }
  } else if (kind == "mark_task_complete") {
    only_keys(doc, {"v", "kind", "t"});
    msg.kind = MsgKind::kTaskComplete;
  } else {
    throw ProtocolError("unknown kind \"" + kind + '"');
  }
  return msg;
}

Json to_json(const OperatorMsg& msg) {
  Json j;
  j["v"] = kProtocolVersion;
  j["kind"] = to_string(msg.kind);
  if (msg.t) j["t"] = *msg.t;
  switch (msg.kind) {
    case MsgKind::kJoystick:
      j["j1"] = msg.js.j1;
      j["j2"] = msg.js.j2;
      break;
    case MsgKind::kMode:
      j["mode"] = ctl::to_string(msg.mode);
      break;
    case MsgKind::kLoadScenario:
      if (!msg.scenario_id.empty()) j["id"] = msg.scenario_id;
      if (msg.scenario) j["scenario"] = *msg.scenario;
      break;
    case MsgKind::kReset:
    case MsgKind::kTaskComplete:
      break;
  }
  return j;
}

Json error_frame(std::string_view message) {
  Json j;
  j["v"] = kProtocolVersion;
  j["kind"] = "error";
  j["message"] = std::string(message);
  return j;
}

}  // namespace crane::teleop
