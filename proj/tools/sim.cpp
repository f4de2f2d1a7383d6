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

// sim run | sweep | check-gains | serve

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "crane/scenario.hpp"
#include "crane/simulation.hpp"
#include "crane/stability.hpp"
#include "crane/sweep.hpp"
#include "crane/teleop/server.hpp"

namespace fs = std::filesystem;

namespace {

int cmd_run(const std::string& scenario_file, const std::string& out_dir,
            bool quiet) {
  const crane::Scenario s = crane::load_scenario(scenario_file);
  const crane::RunResult r = crane::run_scenario(s, !out_dir.empty());
  const crane::Json metrics = crane::metrics_to_json(r.metrics);
  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    std::ofstream trace(fs::path(out_dir) / "trace.csv", std::ios::binary);
    crane::write_trace_csv(trace, r.trace);
    std::ofstream m(fs::path(out_dir) / "metrics.json", std::ios::binary);
    m << metrics.dump(2) << '\n';
  }
  if (!quiet) std::cout << metrics.dump(2) << '\n';
  return r.metrics.ok() ? 0 : 1;
}

int cmd_sweep(const std::string& scenario_file, const std::string& grid_file,
              const std::string& out_file, bool serial) {
  const crane::Json base = crane::load_json(scenario_file);
  const auto axes = crane::sweep::parse_grid(crane::load_json(grid_file));
  crane::sweep::validate_paths(base, axes);
  const auto cells = serial ? crane::sweep::run_cells_serial(base, axes)
                            : crane::sweep::run_cells_parallel(base, axes);
  if (out_file.empty()) {
    crane::sweep::write_csv(std::cout, axes, cells);
  } else {
    std::ofstream out(out_file, std::ios::binary);
    crane::sweep::write_csv(out, axes, cells);
  }
  bool ok = true;
  for (const auto& c : cells) {
    if (!c.metrics || !c.metrics->ok()) ok = false;
  }
  return ok ? 0 : 1;
}

int cmd_check_gains(const std::string& scenario_file) {
  const crane::Scenario s = crane::load_scenario(scenario_file);
  const auto& k = s.controller.gains;
  const auto r = crane::stability::check_gains(k, s.controller.model, s.l0);
  static const char* names[] = {"k1",   "k2*l0-k4", "c1",
                                "c2/g", "k5",       "k6"};
  std::printf("gains  k1=%.9g k2=%.9g k3=%.9g k4=%.9g k5=%.9g k6=%.9g (SI)\n",
              k.k1, k.k2, k.k3, k.k4, k.k5, k.k6);
  std::printf("l0     %.9g m\n", s.l0);
  for (int i = 0; i < crane::stability::kConditionCount; ++i) {
    std::printf("  %-9s %+.9g  %s\n", names[i], r.condition_values[i],
                r.condition_values[i] > 0 ? "ok" : "FAIL");
  }
  std::printf("max Re(eig)  A1 %.9g  A2 %.9g\n", r.a1_max_real,
              r.a2_max_real);
  std::printf("%s\n", r.satisfied ? "satisfied" : "NOT satisfied");
  return r.satisfied ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Variable-length gantry crane simulator"};
  app.require_subcommand(1);

  std::string scenario;
  std::string out;
  bool quiet = false;
  auto* run = app.add_subcommand("run", "Run one scenario headless");
  run->add_option("scenario", scenario, "Scenario file")->required();
  run->add_option("--out", out, "Directory for trace.csv and metrics.json");
  run->add_flag("--quiet", quiet, "Do not print metrics");

  std::string grid;
  bool serial = false;
  auto* sweep = app.add_subcommand("sweep", "Run a parameter grid");
  sweep->add_option("scenario", scenario, "Base scenario file")->required();
  sweep->add_option("grid", grid, "Grid file")->required();
  sweep->add_option("--out", out, "CSV output file (default stdout)");
  sweep->add_flag("--serial", serial, "Run cells on one thread");

  auto* check = app.add_subcommand("check-gains", "Closed-loop gain report");
  check->add_option("scenario", scenario, "Scenario file")->required();

  crane::teleop::ServerOptions sopt;
  auto* serve = app.add_subcommand("serve", "Live teleoperation session");
  serve->add_option("scenario", scenario, "Scenario file")->required();
  serve->add_option("--port", sopt.port, "TCP port")->default_val(8080);
  serve->add_option("--host", sopt.host, "Bind address")
      ->default_val("127.0.0.1");
  serve->add_option("--ui-dir", sopt.ui_dir, "Static files for the console");
  serve->add_option("--scenario-dir", sopt.scenario_dir,
                    "Directory searched by load_scenario messages");
  serve->add_option("--record", sopt.record_file, "Write the session tape");
  serve->add_option("--trace", sopt.trace_file, "Write the session trace CSV");
  std::string replay;
  serve->add_option("--replay", replay,
                    "Re-run a recorded tape headless and exit");
  serve->add_flag("--lockstep", sopt.lockstep,
                  "Step physics only on client message timestamps");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(scenario, out, quiet);
    if (*sweep) return cmd_sweep(scenario, grid, out, serial);
    if (*check) return cmd_check_gains(scenario);
    if (*serve) {
      sopt.scenario_file = scenario;
      if (sopt.scenario_dir.empty()) {
        sopt.scenario_dir = fs::path(scenario).parent_path().string();
      }
      if (!replay.empty()) {
        return crane::teleop::replay_tape(sopt, replay, std::cout);
      }
      return crane::teleop::serve(sopt);
    }
  } catch (const crane::ConfigError& e) {
    std::cerr << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
