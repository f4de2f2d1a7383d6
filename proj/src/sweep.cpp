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

#include "crane/sweep.hpp"

#include <cstdio>
#include <exception>
#include <ostream>
#include <sstream>

namespace crane::sweep {
namespace {

std::vector<std::string> split(const std::string& dotted) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : dotted) {
    if (c == '.') {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  parts.push_back(cur);
  return parts;
}

bool is_index(const std::string& s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (c < '0' || c > '9') return false;
  }
  return true;
}

// Quoted when needed; line breaks become "; " so each cell stays one row.
std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (std::size_t i = 0; i < s.size(); ++i) {
    const char c = s[i];
    if (c == '\n') {
      out += "; ";
      while (i + 1 < s.size() && s[i + 1] == ' ') ++i;
      continue;
    }
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string value_text(const Json& v) {
  return v.is_string() ? v.get<std::string>() : v.dump();
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

std::string opt_num(const std::optional<double>& v) {
  return v ? num(*v) : std::string();
}

}  // namespace

std::vector<GridAxis> parse_grid(const Json& doc) {
  if (!doc.is_object()) throw ConfigError({"grid: expected an object"});
  std::vector<GridAxis> axes;
  std::vector<std::string> issues;
  const bool wrapped = doc.contains("axes");
  if (wrapped) {
    for (auto it = doc.begin(); it != doc.end(); ++it) {
      if (it.key() != "axes" && it.key() != "license" &&
          it.key() != "description") {
        issues.push_back("grid." + it.key() + ": unknown key");
      }
    }
  }
  const Json& grid = wrapped ? doc["axes"] : doc;
  if (!grid.is_object()) throw ConfigError({"grid.axes: expected an object"});
  for (auto it = grid.begin(); it != grid.end(); ++it) {
    if (!it.value().is_array() || it.value().empty()) {
      issues.push_back("grid." + it.key() + ": expected a non-empty list");
      continue;
    }
    GridAxis a;
    a.path = it.key();
    for (const auto& v : it.value()) a.values.push_back(v);
    axes.push_back(std::move(a));
  }
  if (!issues.empty()) throw ConfigError(std::move(issues));
  return axes;
}

void set_path(Json& doc, const std::string& dotted, const Json& value) {
  if (dotted == kPatchAxis) {
    if (!value.is_object()) {
      throw ConfigError({dotted + ": patch values must be objects"});
    }
    doc.merge_patch(value);
    return;
  }
  Json* node = &doc;
  const auto parts = split(dotted);
  for (std::size_t i = 0; i < parts.size(); ++i) {
    const std::string& p = parts[i];
    if (p.empty()) throw ConfigError({dotted + ": empty path component"});
    const bool leaf = i + 1 == parts.size();
    if (node->is_array() && is_index(p)) {
      const std::size_t idx = std::stoul(p);
      if (idx >= node->size()) {
        throw ConfigError({dotted + ": index " + p + " out of range"});
      }
      node = &(*node)[idx];
    } else if (node->is_object() || node->is_null()) {
      if (node->is_null()) *node = Json::object();
      node = &(*node)[p];
    } else {
      throw ConfigError({dotted + ": '" + p + "' is not inside an object"});
    }
    if (leaf) *node = value;
  }
}

std::vector<std::vector<Json>> expand(const std::vector<GridAxis>& axes) {
  std::vector<std::vector<Json>> out{{}};
  for (const GridAxis& a : axes) {
    std::vector<std::vector<Json>> next;
    next.reserve(out.size() * a.values.size());
    for (const auto& prefix : out) {
      for (const Json& v : a.values) {
        auto row = prefix;
        row.push_back(v);
        next.push_back(std::move(row));
      }
    }
    out = std::move(next);
  }
  return out;
}

void validate_paths(const Json& base, const std::vector<GridAxis>& axes) {
  std::vector<std::string> issues;
  for (const GridAxis& a : axes) {
    if (a.path == kPatchAxis) continue;  // checked per cell
    Json doc = base;
    set_path(doc, a.path, a.values.front());
    try {
      parse_scenario(doc);
    } catch (const ConfigError& e) {
      for (const std::string& issue : e.issues()) {
        // An unknown key on the axis path or any of its prefixes.
        const auto pos = issue.find(": unknown key");
        if (pos == std::string::npos) continue;
        const std::string key = issue.substr(0, pos);
        if (a.path == key || a.path.rfind(key + ".", 0) == 0) {
          issues.push_back("grid." + a.path + ": not a scenario field");
          break;
        }
      }
    }
  }
  if (!issues.empty()) throw ConfigError(std::move(issues));
}

CellResult run_cell(const Json& base, const std::vector<GridAxis>& axes,
                    const std::vector<Json>& values) {
  CellResult r;
  r.values = values;
  try {
    Json doc = base;
    for (std::size_t i = 0; i < axes.size(); ++i) {
      set_path(doc, axes[i].path, values[i]);
    }
    const Scenario s = parse_scenario(doc);
    r.metrics = run_scenario(s, /*keep_trace=*/false).metrics;
  } catch (const std::exception& e) {
    r.error = e.what();
  }
  return r;
}

std::vector<CellResult> run_cells_serial(const Json& base,
                                         const std::vector<GridAxis>& axes) {
  const auto combos = expand(axes);
  std::vector<CellResult> out;
  out.reserve(combos.size());
  for (const auto& c : combos) out.push_back(run_cell(base, axes, c));
  return out;
}

std::vector<CellResult> run_cells_parallel(const Json& base,
                                           const std::vector<GridAxis>& axes) {
  const auto combos = expand(axes);
  std::vector<CellResult> out(combos.size());
  const auto n = static_cast<std::ptrdiff_t>(combos.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    out[k] = run_cell(base, axes, combos[k]);
  }
  return out;
}

void write_csv(std::ostream& out, const std::vector<GridAxis>& axes,
               const std::vector<CellResult>& cells) {
  for (const GridAxis& a : axes) out << csv_field(a.path) << ',';
  out << "residual_osc_deg,tracking_rmse,collision,first_contact_time,"
         "completion_time,f1_peak,f2_peak,final_y1,final_y2,"
         "terminal_error_y1,terminal_error_y2,terminal_theta_deg,"
         "rejected_plans,faulted,error\n";
  for (const CellResult& c : cells) {
    for (const Json& v : c.values) out << csv_field(value_text(v)) << ',';
    if (c.metrics) {
      const RunMetrics& m = *c.metrics;
      out << num(m.residual_osc_deg) << ',' << num(m.tracking_rmse) << ','
          << (m.collision ? 1 : 0) << ',' << opt_num(m.first_contact_time)
          << ',' << opt_num(m.completion_time) << ',' << num(m.f1_peak) << ','
          << num(m.f2_peak) << ',' << num(m.final_y1) << ','
          << num(m.final_y2) << ',' << num(m.terminal_error_y1) << ','
          << num(m.terminal_error_y2) << ',' << num(m.terminal_theta_deg)
          << ',' << m.rejected_plans << ',' << (m.faulted ? 1 : 0) << ','
          << csv_field(m.fault) << '\n';
    } else {
      out << ",,,,,,,,,,,,,," << csv_field(c.error) << '\n';
    }
  }
}

}  // namespace crane::sweep
