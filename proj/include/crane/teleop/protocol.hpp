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

// Operator/service wire messages. Every message is one JSON object carried
// in one WebSocket text frame:
//
//   {"v": 1, "kind": "joystick", "j1": 0.4, "j2": 0, "t": 1.25}
//
// "t" (session seconds) is optional and only used to clock the simulation in
// lockstep and replay sessions.

#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "crane/controller.hpp"
#include "crane/scenario.hpp"

namespace crane::teleop {

inline constexpr int kProtocolVersion = 1;

enum class MsgKind { kJoystick, kMode, kReset, kLoadScenario, kTaskComplete };
const char* to_string(MsgKind k);

struct OperatorMsg {
  MsgKind kind = MsgKind::kJoystick;
  std::optional<double> t;
  ctl::Joystick js;           // joystick, clamped to [-1, 1]
  bool clamped = false;       // joystick arrived out of range
  ctl::Mode mode = ctl::Mode::kSC;
  std::string scenario_id;    // load_scenario by id
  std::optional<Json> scenario;  // load_scenario with an inline document
};

class ProtocolError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Throws ProtocolError on malformed JSON, a wrong version, an unknown kind
/// or key, or a bad payload.
OperatorMsg parse_operator_msg(std::string_view text);
OperatorMsg parse_operator_json(const Json& doc);

Json to_json(const OperatorMsg& msg);

Json error_frame(std::string_view message);

/// Scenario ids are file stems: letters, digits, '_' and '-'.
bool valid_scenario_id(std::string_view id);

}  // namespace crane::teleop
