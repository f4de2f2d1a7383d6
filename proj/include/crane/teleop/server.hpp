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

// HTTP + WebSocket front end for a teleoperation Session. Static console
// files are served from --ui-dir; the operator connection is the WebSocket
// at /ws. One I/O thread runs all sockets; one control thread owns the
// session and steps it against a monotonic clock (or message timestamps in
// lockstep mode). Inbound messages cross over a queue that coalesces
// consecutive joystick updates; outbound frames are serialized once and
// fanned out to every connection.

#pragma once

#include <iosfwd>
#include <memory>
#include <string>

namespace crane::teleop {

struct ServerOptions {
  std::string scenario_file;
  std::string host = "127.0.0.1";
  unsigned short port = 8080;  // 0 picks a free port
  std::string ui_dir;
  std::string scenario_dir;  // where load_scenario ids are looked up
  std::string record_file;   // tape written on shutdown
  std::string trace_file;
  bool lockstep = false;
  double telemetry_hz = 50.0;
  int max_burst_steps = 10;  // catch-up limit per wake-up
};

class Server {
 public:
  /// Loads and validates the scenario; throws ConfigError.
  explicit Server(ServerOptions options);
  ~Server();

  /// Binds and starts the I/O and control threads. Returns the bound port.
  unsigned short start();
  /// Stops both threads and writes the record file. Idempotent.
  void stop();
  /// Blocks until SIGINT/SIGTERM, then stops.
  void wait_for_signal();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// `sim serve`: runs until interrupted. Returns the process exit code.
int serve(const ServerOptions& options);

/// `sim serve --replay`: plays a tape headless, prints a summary and returns
/// 0 iff the run had no fault and no collision in SC.
int replay_tape(const ServerOptions& options, const std::string& tape_file,
                std::ostream& out);

}  // namespace crane::teleop
