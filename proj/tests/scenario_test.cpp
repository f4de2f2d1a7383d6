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

#include "crane/scenario.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include <gtest/gtest.h>

#include "crane/units.hpp"

namespace crane {
namespace {

using units::Dim;

Json fig7() {
  return load_json(std::string(CRANE_SCENARIO_DIR) +
                   "/fig7_obstacle_approach.json");
}

// Issues of a document expected to fail.
std::vector<std::string> issues_of(const Json& doc) {
  try {
    parse_scenario(doc);
  } catch (const ConfigError& e) {
    return e.issues();
  }
  ADD_FAILURE() << "document parsed";
  return {};
}

bool mentions(const std::vector<std::string>& issues, const std::string& s) {
  for (const auto& i : issues) {
    if (i.find(s) != std::string::npos) return true;
  }
  return false;
}

TEST(Units, Conversions) {
  EXPECT_DOUBLE_EQ(units::parse("0.8 N/mm", Dim::kStiffness), 800.0);
  EXPECT_DOUBLE_EQ(units::parse("0.01 N/mm", Dim::kStiffness), 10.0);
  EXPECT_DOUBLE_EQ(units::parse("0.8 N s/mm", Dim::kDamping), 800.0);
  EXPECT_DOUBLE_EQ(units::parse("0.8 N*s/mm", Dim::kDamping), 800.0);
  EXPECT_DOUBLE_EQ(units::parse("0.8 N\xC2\xB7s/mm", Dim::kDamping), 800.0);
  EXPECT_DOUBLE_EQ(units::parse("8 cm", Dim::kLength), 0.08);
  EXPECT_DOUBLE_EQ(units::parse("8cm", Dim::kLength), 0.08);
  EXPECT_DOUBLE_EQ(units::parse("720 mm", Dim::kLength), 0.72);
  EXPECT_DOUBLE_EQ(units::parse("225 g", Dim::kMass), 0.225);
  EXPECT_DOUBLE_EQ(units::parse("1 ms", Dim::kTime), 1e-3);
  EXPECT_DOUBLE_EQ(units::parse("90 deg", Dim::kAngle), std::numbers::pi / 2);
  EXPECT_DOUBLE_EQ(units::parse("50 Hz", Dim::kFrequency), 50.0);
  EXPECT_DOUBLE_EQ(units::parse("12 cm/s", Dim::kVelocity), 0.12);
  EXPECT_DOUBLE_EQ(units::parse("0.5", Dim::kLength), 0.5);
}

TEST(Units, Rejections) {
  EXPECT_THROW(units::parse("8 kg", Dim::kLength), std::invalid_argument);
  EXPECT_THROW(units::parse("cm", Dim::kLength), std::invalid_argument);
  EXPECT_THROW(units::parse("", Dim::kLength), std::invalid_argument);
  EXPECT_THROW(units::parse("1 N/mm", Dim::kDamping), std::invalid_argument);
}

TEST(Parse, Fig7InSI) {
  const Scenario s = parse_scenario(fig7());
  EXPECT_EQ(s.name, "fig7_obstacle_approach");
  EXPECT_DOUBLE_EQ(s.duration, 14.0);
  EXPECT_DOUBLE_EQ(s.dt, 1e-3);
  EXPECT_EQ(s.steps(), 14000);
  EXPECT_DOUBLE_EQ(s.controller.gains.k1, 800.0);
  EXPECT_DOUBLE_EQ(s.controller.gains.k3, -0.05);
  EXPECT_DOUBLE_EQ(s.controller.gains.k6, 200.0);
  EXPECT_DOUBLE_EQ(s.controller.cmd.epsilon, 0.08);
  EXPECT_DOUBLE_EQ(s.controller.cmd.alpha1, 0.12);
  EXPECT_EQ(s.controller.replan_every, 20);
  EXPECT_EQ(s.controller.mode, ctl::Mode::kSC);
  ASSERT_TRUE(s.has_workspace);
  ASSERT_EQ(s.workspace.boxes().size(), 1u);
  EXPECT_DOUBLE_EQ(s.workspace.boxes()[0].y1_min, 0.75);
  EXPECT_DOUBLE_EQ(s.workspace.bounds().y1_max, 0.88);
  EXPECT_EQ(s.reference, ReferenceKind::kJoystick);
  ASSERT_EQ(s.tape.size(), 2u);
  EXPECT_DOUBLE_EQ(s.controller.model.M, 0.815);
}

TEST(Parse, EveryShippedScenarioLoads) {
  for (const char* f :
       {"fig7_obstacle_approach.json", "ramp_fast_compensated.json",
        "ramp_fast_uncompensated.json", "ramp_slow_uncompensated.json",
        "robustness_base.json", "inspection_task.json"}) {
    EXPECT_NO_THROW(load_scenario(std::string(CRANE_SCENARIO_DIR) + "/" + f))
        << f;
  }
}

TEST(Parse, RampDefaultsDurationToFourTt) {
  const Scenario s = load_scenario(std::string(CRANE_SCENARIO_DIR) +
                                   "/ramp_slow_uncompensated.json");
  EXPECT_EQ(s.reference, ReferenceKind::kRamp);
  EXPECT_DOUBLE_EQ(s.ramp.Tt, 40.0);
  EXPECT_DOUBLE_EQ(s.duration, 160.0);
  EXPECT_EQ(s.controller.mode, ctl::Mode::kVC);
}

TEST(Parse, ReportsEveryIssueWithPath) {
  Json doc = fig7();
  doc["controller"]["epsilon"] = "8 kg";
  doc["controller"]["gains"]["k9"] = 1;
  doc["plant"]["M"] = -1;
  doc["dt"] = 0;
  doc["bogus"] = true;
  const auto issues = issues_of(doc);
  EXPECT_TRUE(mentions(issues, "controller.epsilon: unit 'kg'"));
  EXPECT_TRUE(mentions(issues, "controller.gains.k9: unknown key"));
  EXPECT_TRUE(mentions(issues, "plant:"));
  EXPECT_TRUE(mentions(issues, "dt: must be positive"));
  EXPECT_TRUE(mentions(issues, "bogus: unknown key"));
  EXPECT_GE(issues.size(), 5u);
}

TEST(Parse, StartMustBeFree) {
  Json doc = fig7();
  doc["initial"]["x"] = "0.8 m";
  EXPECT_TRUE(mentions(issues_of(doc), "initial: payload start"));
  doc["initial"]["x"] = "-0.1 m";
  EXPECT_TRUE(mentions(issues_of(doc), "initial: payload start"));
}

TEST(Parse, GainsChecked) {
  Json doc = fig7();
  doc["controller"]["gains"]["k1"] = "-0.8 N/mm";
  EXPECT_TRUE(mentions(issues_of(doc), "controller.gains: fail"));
  doc["controller"]["gains"] = "robustness";
  EXPECT_NO_THROW(parse_scenario(doc));
  doc["controller"]["gains"] = "fast";
  EXPECT_TRUE(mentions(issues_of(doc), "unknown gain preset"));
  doc["controller"]["gains"] = "zero";
  EXPECT_TRUE(mentions(issues_of(doc), "controller.gains: fail"));
  doc["controller"]["mode"] = "FF_ONLY";
  EXPECT_NO_THROW(parse_scenario(doc));
}

TEST(Parse, TapeValidation) {
  Json doc = fig7();
  doc["reference"]["tape"] = {{0, 1, 0}, {2, 1.5, 0}, {1, 0, 0}, {3, 0}};
  const auto issues = issues_of(doc);
  EXPECT_TRUE(mentions(issues, "reference.tape[1]: joystick axes"));
  EXPECT_TRUE(mentions(issues, "reference.tape[2]: times must be"));
  EXPECT_TRUE(mentions(issues, "reference.tape[3]: expected [t, j1, j2]"));

  doc["reference"]["tape"] = Json::array(
      {{{"t", "0 s"}, {"j1", 1}}, {{"t", "500 ms"}, {"j2", -1}}});
  const Scenario s = parse_scenario(doc);
  ASSERT_EQ(s.tape.size(), 2u);
  EXPECT_DOUBLE_EQ(s.tape[1].t, 0.5);
  EXPECT_EQ(s.joystick_at(0.2).j1, 1.0);
  EXPECT_EQ(s.joystick_at(0.6).j2, -1.0);
  EXPECT_EQ(s.joystick_at(0.6).j1, 0.0);
}

TEST(Parse, JoystickHeldBetweenSamples) {
  const Scenario s = parse_scenario(fig7());
  EXPECT_EQ(s.joystick_at(-1.0).j1, 0.0);
  EXPECT_EQ(s.joystick_at(0.0).j1, 1.0);
  EXPECT_EQ(s.joystick_at(9.999).j1, 1.0);
  EXPECT_EQ(s.joystick_at(10.0).j1, 0.0);
}

TEST(Parse, ReplanRateMustDivideControlRate) {
  Json doc = fig7();
  doc["controller"]["replan_rate"] = "100 Hz";
  EXPECT_EQ(parse_scenario(doc).controller.replan_every, 10);
  doc["controller"]["replan_rate"] = "30 Hz";
  EXPECT_TRUE(mentions(issues_of(doc), "controller.replan_rate"));
}

TEST(Parse, ModelScaleAndSwitches) {
  Json doc = fig7();
  doc["controller"]["model"] = {{"M_scale", 1.1}};
  doc["mode_switches"] = Json::array({{{"t", "5 s"}, {"mode", "VC"}},
                                      {{"t", "2 s"}, {"mode", "EXACT"}}});
  const Scenario s = parse_scenario(doc);
  EXPECT_NEAR(s.controller.model.M, 0.815 * 1.1, 1e-15);
  EXPECT_DOUBLE_EQ(s.plant.M, 0.815);
  ASSERT_EQ(s.mode_switches.size(), 2u);
  EXPECT_EQ(s.mode_switches[0].mode, ctl::Mode::kExact);
  doc["mode_switches"][0]["mode"] = "FAST";
  EXPECT_TRUE(mentions(issues_of(doc), "mode_switches[0].mode"));
}

TEST(Parse, WorkspaceErrors) {
  Json doc = fig7();
  doc["workspace"]["boxes"][0]["y1"] = {"0.9 m", "0.7 m"};
  EXPECT_TRUE(mentions(issues_of(doc), "workspace.boxes[0].y1: min must"));
  doc = fig7();
  doc["workspace"]["walls"] = Json::array({{{"from", {0.4, -0.3}}}});
  EXPECT_TRUE(mentions(issues_of(doc), "workspace.walls[0].to: required"));
  doc["workspace"]["walls"][0]["to"] = {0.4, -0.5};
  EXPECT_EQ(parse_scenario(doc).workspace.extra_walls().size(), 1u);
}

TEST(Parse, FileErrors) {
  EXPECT_THROW(load_scenario("/nonexistent/scenario.json"), ConfigError);
}

}  // namespace
}  // namespace crane
