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

#include <algorithm>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

namespace crane::sweep {
namespace {

Json short_base() {
  Json doc = load_json(std::string(CRANE_SCENARIO_DIR) +
                       "/fig7_obstacle_approach.json");
  doc["duration"] = "3 s";
  return doc;
}

std::string csv_of(const std::vector<GridAxis>& axes,
                   const std::vector<CellResult>& cells) {
  std::ostringstream out;
  write_csv(out, axes, cells);
  return out.str();
}

TEST(Grid, ParseBareAndWrapped) {
  const auto bare = parse_grid(Json::parse(R"({"controller.alpha1": [0.06, 0.12]})"));
  ASSERT_EQ(bare.size(), 1u);
  EXPECT_EQ(bare[0].path, "controller.alpha1");
  EXPECT_EQ(bare[0].values.size(), 2u);
  const auto wrapped = parse_grid(Json::parse(
      R"({"license": "Apache-2.0", "description": "x",
          "axes": {"a.b": [1], "c": [2, 3]}})"));
  ASSERT_EQ(wrapped.size(), 2u);
  EXPECT_EQ(wrapped[1].path, "c");
  EXPECT_THROW(parse_grid(Json::parse(R"({"a": []})")), ConfigError);
  EXPECT_THROW(parse_grid(Json::parse(R"({"a": 3})")), ConfigError);
  EXPECT_THROW(parse_grid(Json::parse(R"([1, 2])")), ConfigError);
}

TEST(Grid, ExpandOrder) {
  const auto axes = parse_grid(Json::parse(R"({"a": [1, 2], "b": ["x", "y", "z"]})"));
  const auto cells = expand(axes);
  ASSERT_EQ(cells.size(), 6u);
  EXPECT_EQ(cells[0], (std::vector<Json>{1, "x"}));
  EXPECT_EQ(cells[1], (std::vector<Json>{1, "y"}));
  EXPECT_EQ(cells[3], (std::vector<Json>{2, "x"}));
  EXPECT_EQ(cells[5], (std::vector<Json>{2, "z"}));
}

TEST(Grid, EmptyGridIsOneBaseRun) {
  const std::vector<GridAxis> none;
  EXPECT_EQ(expand(none).size(), 1u);
  const Json base = short_base();
  const auto cells = run_cells_serial(base, none);
  ASSERT_EQ(cells.size(), 1u);
  ASSERT_TRUE(cells[0].metrics.has_value());
  const RunMetrics direct =
      run_scenario(parse_scenario(base), false).metrics;
  EXPECT_EQ(cells[0].metrics->final_y1, direct.final_y1);
  EXPECT_EQ(cells[0].metrics->residual_osc_deg, direct.residual_osc_deg);
}

TEST(SetPath, CreatesAndIndexes) {
  Json doc = Json::parse(R"({"a": {"list": [10, 20]}})");
  set_path(doc, "a.list.1", 5);
  set_path(doc, "a.new.deep", "v");
  set_path(doc, "top", true);
  EXPECT_EQ(doc["a"]["list"][1], 5);
  EXPECT_EQ(doc["a"]["new"]["deep"], "v");
  EXPECT_EQ(doc["top"], true);
  EXPECT_THROW(set_path(doc, "top.x", 1), ConfigError);
  EXPECT_THROW(set_path(doc, "a.list.9", 1), ConfigError);
}

TEST(SetPath, PatchMerges) {
  Json doc = short_base();
  set_path(doc, kPatchAxis,
           Json::parse(R"({"controller": {"mode": "FF_ONLY", "gains": "zero"}})"));
  EXPECT_EQ(doc["controller"]["mode"], "FF_ONLY");
  EXPECT_EQ(doc["controller"]["gains"], "zero");
  EXPECT_EQ(doc["controller"]["epsilon"], "8 cm");
}

TEST(Validate, UnknownPathRejected) {
  const Json base = short_base();
  EXPECT_NO_THROW(validate_paths(
      base, parse_grid(Json::parse(R"({"controller.alpha1": [0.1]})"))));
  EXPECT_NO_THROW(validate_paths(
      base, parse_grid(Json::parse(R"({"controller.model.M_scale": [0.9]})"))));
  EXPECT_THROW(validate_paths(
                   base, parse_grid(Json::parse(R"({"controller.alpah1": [0.1]})"))),
               ConfigError);
  EXPECT_THROW(validate_paths(base, parse_grid(Json::parse(R"({"gravity": [1]})"))),
               ConfigError);
}

TEST(Run, BadCellRecordedAndSweepContinues) {
  const auto axes = parse_grid(
      Json::parse(R"({"controller.alpha1": [0.06, "fast", 0.18]})"));
  const auto cells = run_cells_serial(short_base(), axes);
  ASSERT_EQ(cells.size(), 3u);
  EXPECT_TRUE(cells[0].metrics.has_value());
  EXPECT_FALSE(cells[1].metrics.has_value());
  EXPECT_NE(cells[1].error.find("controller.alpha1"), std::string::npos);
  EXPECT_TRUE(cells[2].metrics.has_value());
  EXPECT_GT(cells[2].metrics->final_y1, cells[0].metrics->final_y1);
  const std::string csv = csv_of(axes, cells);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 4);
  EXPECT_EQ(csv.rfind("controller.alpha1,residual_osc_deg", 0), 0u);
}

TEST(Run, ParallelEqualsSerial) {
  const auto axes = parse_grid(Json::parse(
      R"({"controller.alpha1": ["0.06 m/s", "0.12 m/s", "0.18 m/s"],
          "@patch": [{"controller": {"mode": "SC"}},
                     {"controller": {"mode": "VC"}}]})"));
  const Json base = short_base();
  const auto serial = run_cells_serial(base, axes);
  const auto parallel = run_cells_parallel(base, axes);
  ASSERT_EQ(serial.size(), 6u);
  EXPECT_EQ(csv_of(axes, serial), csv_of(axes, parallel));
}

TEST(Run, RobustnessGridShape) {
  const Json base = load_json(std::string(CRANE_SCENARIO_DIR) +
                              "/robustness_base.json");
  const auto axes = parse_grid(load_json(
      std::string(CRANE_SCENARIO_DIR) + "/grids/robustness_M_grid.json"));
  validate_paths(base, axes);
  const auto cells = run_cells_parallel(base, axes);
  ASSERT_EQ(cells.size(), 6u);
  for (std::size_t i = 0; i < cells.size(); i += 2) {
    ASSERT_TRUE(cells[i].metrics && cells[i + 1].metrics);
    // Feedback never worse than feedforward alone.
    EXPECT_LE(cells[i + 1].metrics->terminal_error_y1,
              cells[i].metrics->terminal_error_y1 + 1e-12);
  }
}

}  // namespace
}  // namespace crane::sweep
