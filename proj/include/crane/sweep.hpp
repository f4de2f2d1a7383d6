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

// Cross-product parameter sweeps over a base scenario document. A grid is a
// JSON object mapping dotted scenario paths to lists of values, e.g.
//
//   { "controller.alpha1": ["0.06 m/s", "0.12 m/s"],
//     "controller.gains": ["zero", "robustness"] }
//
// The axis "@patch" takes objects merged into the whole document instead, so
// one axis can change several fields together. A grid file may also wrap the
// axes as { "axes": {...} } next to "license" and "description".
//
// Cells are independent runs; the parallel runner distributes them over
// OpenMP threads and must return exactly what the serial runner returns.

#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "crane/scenario.hpp"
#include "crane/simulation.hpp"

namespace crane::sweep {

inline constexpr const char* kPatchAxis = "@patch";

struct GridAxis {
  std::string path;
  std::vector<Json> values;
};

/// Throws ConfigError on a malformed grid.
std::vector<GridAxis> parse_grid(const Json& grid);

/// Sets a dotted path (numeric parts index arrays), creating objects on the
/// way. Throws ConfigError when the path runs through a non-container.
void set_path(Json& doc, const std::string& dotted, const Json& value);

/// Every combination, first axis varying slowest. An empty grid yields one
/// empty combination.
std::vector<std::vector<Json>> expand(const std::vector<GridAxis>& axes);

/// Rejects axes whose path names no field of the scenario schema.
void validate_paths(const Json& base, const std::vector<GridAxis>& axes);

struct CellResult {
  std::vector<Json> values;
  std::optional<RunMetrics> metrics;
  std::string error;  // set when the cell could not run
};

CellResult run_cell(const Json& base, const std::vector<GridAxis>& axes,
                    const std::vector<Json>& values);

std::vector<CellResult> run_cells_serial(const Json& base,
                                         const std::vector<GridAxis>& axes);
std::vector<CellResult> run_cells_parallel(const Json& base,
                                           const std::vector<GridAxis>& axes);

void write_csv(std::ostream& out, const std::vector<GridAxis>& axes,
               const std::vector<CellResult>& cells);

}  // namespace crane::sweep
