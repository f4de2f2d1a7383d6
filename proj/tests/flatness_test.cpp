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

#include "crane/flatness.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "crane/errors.hpp"
#include "crane/stability.hpp"
#include "support/open_loop.hpp"
#include "support/trajectories.hpp"

namespace crane::flat {
namespace {

const PhysParams kParams;
constexpr double kDeg = std::numbers::pi / 180.0;

CraneState rest(double x, double l) {
  return CraneState::at_rest(x, l, kParams);
}

TEST(OutputJet, RestState) {
  const OutputJet j = output_jet_from_state(rest(0.4, 0.72), 0.0, 0.0, kParams);
  EXPECT_EQ(j.y1[0], 0.4);
  EXPECT_EQ(j.y2[0], -0.72);
  for (int i = 1; i <= kJetOrder; ++i) {
    EXPECT_NEAR(j.y1[i], 0.0, 1e-15) << i;
    EXPECT_NEAR(j.y2[i], 0.0, 1e-15) << i;
  }
}

TEST(OutputJet, AccelerationFromCableForce) {
  CraneState s = rest(0.0, 0.72);
  s.theta = 0.1;
  const OutputJet j = output_jet_through_jerk(s, kParams);
  EXPECT_NEAR(j.y1[2], -kParams.g * std::sin(0.1), 1e-12);
  EXPECT_NEAR(j.y2[2], -kParams.g + kParams.g * std::cos(0.1), 1e-12);
  EXPECT_NEAR(j.y2[2], -0.049009, 1e-6);
  const OutputJet j0 = output_jet_through_jerk(rest(0.0, 0.72), kParams);
  EXPECT_NEAR(j0.y1[2], 0.0, 1e-15);
  EXPECT_NEAR(j0.y2[2], 0.0, 1e-15);
}

TEST(OutputJet, SlackCableRejected) {
  CraneState s = rest(0.0, 0.72);
  s.f2 = 0.5;
  try {
    output_jet_through_jerk(s, kParams);
    FAIL();
  } catch (const CraneError& e) {
    EXPECT_EQ(e.fault(), Fault::kCableSlack);
  }
}

// Central differences of the simulated outputs against the closed-form jet.
TEST(OutputJet, MatchesFiniteDifferencesAlongForcedRun) {
  auto f1 = [](double t) { return 0.3 * std::sin(2.0 * t); };
  auto f2dd = [](double t) { return 0.4 * std::cos(1.5 * t); };
  auto law = [&](double t, const CraneState& st) {
    return Actuation{{f1(t), st.f2}, f2dd(t)};
  };
  const double h = 1e-3;
  CraneState st = rest(0.0, 0.72);
  std::vector<OutputJet> jets;
  for (int i = 0; i < 3000; ++i) {
    jets.push_back(output_jet_from_state(st, f1(st.t), f2dd(st.t), kParams));
    st = step(st, law, kParams, h);
  }
  double worst[kJetOrder] = {};
  for (std::size_t i = 1; i + 1 < jets.size(); ++i) {
    for (int k = 0; k < kJetOrder; ++k) {
      const double d1 = (jets[i + 1].y1[k] - jets[i - 1].y1[k]) / (2 * h);
      const double d2 = (jets[i + 1].y2[k] - jets[i - 1].y2[k]) / (2 * h);
      worst[k] = std::max(worst[k], std::abs(d1 - jets[i].y1[k + 1]));
      worst[k] = std::max(worst[k], std::abs(d2 - jets[i].y2[k + 1]));
    }
  }
  for (int k = 0; k < kJetOrder; ++k) EXPECT_LT(worst[k], 1e-4) << "order " << k;
}

TEST(DesiredState, StaticJet) {
  OutputJet j;
  j.y1[0] = 0.5;
  j.y2[0] = -0.72;
  const DesiredState d = desired_state(j, kParams.g);
  EXPECT_EQ(d.x, 0.5);
  EXPECT_EQ(d.l, 0.72);
  EXPECT_EQ(d.theta, 0.0);
  EXPECT_EQ(d.x_dot, 0.0);
  EXPECT_EQ(d.l_dot, 0.0);
  EXPECT_EQ(d.theta_dot, 0.0);
}

TEST(DesiredState, HorizontalAcceleration) {
  OutputJet j;
  j.y1[0] = 0.5;
  j.y1[2] = 1.0;
  j.y2[0] = -0.72;
  const DesiredState d = desired_state(j, 9.81);
  EXPECT_NEAR(d.theta, std::atan(-1.0 / 9.81), 1e-12);
  EXPECT_NEAR(d.x, 0.5 + 0.72 / 9.81, 1e-12);
  EXPECT_NEAR(d.l, std::hypot(0.72 / 9.81, 0.72), 1e-12);
  EXPECT_NEAR(d.theta, -0.101586, 1e-6);
  EXPECT_NEAR(d.x, 0.573394, 1e-6);
  EXPECT_NEAR(d.l, 0.723731, 1e-6);
}

TEST(DesiredState, Errors) {
  OutputJet j;
  j.y2[0] = -0.72;
  j.y2[2] = -9.81;
  try {
    desired_state(j, 9.81);
    FAIL();
  } catch (const CraneError& e) {
    EXPECT_EQ(e.fault(), Fault::kCableSlack);
  }
  j.y2[2] = 0.0;
  j.y2[0] = 0.0;
  try {
    desired_state(j, 9.81);
    FAIL();
  } catch (const CraneError& e) {
    EXPECT_EQ(e.fault(), Fault::kDegenerateLength);
  }
}

OutputJet random_jet(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  OutputJet j;
  j.y1[0] = 0.5 + 0.3 * u(rng);
  j.y2[0] = -0.6 + 0.2 * u(rng);
  for (int i = 1; i <= kJetOrder; ++i) {
    j.y1[i] = u(rng);
    j.y2[i] = u(rng);
  }
  return j;
}

TEST(DesiredState, OutputRoundTrip) {
  std::mt19937_64 rng(2);
  for (int i = 0; i < 1000; ++i) {
    const OutputJet j = random_jet(rng);
    const DesiredState d = desired_state(j, 9.81);
    CraneState s;
    s.x = d.x;
    s.theta = d.theta;
    s.l = d.l;
    const OutputPoint y = output_map(s);
    EXPECT_NEAR(y.y1, j.y1[0], 1e-12);
    EXPECT_NEAR(y.y2, j.y2[0], 1e-12);
  }
}

TEST(DesiredState, NoSwingWithoutHorizontalAccelerationAndJerk) {
  std::mt19937_64 rng(4);
  for (int i = 0; i < 200; ++i) {
    OutputJet j = random_jet(rng);
    j.y1[2] = 0.0;
    j.y1[3] = 0.0;
    const DesiredState d = desired_state(j, 9.81);
    EXPECT_EQ(d.theta, 0.0);
    EXPECT_EQ(d.theta_dot, 0.0);
  }
}

TEST(Feedforward, EquilibriumIsHangingWeight) {
  const OutputJet j = OutputJet::at_rest({0.3, -0.72});
  const DesiredState d = desired_state(j, kParams.g);
  const FeedforwardOut ff =
      feedforward(j, d, kParams.equilibrium_f2(), 0.0, kParams);
  EXPECT_NEAR(ff.f1, 0.0, 1e-15);
  EXPECT_NEAR(ff.f2_ddot, 0.0, 1e-15);
  EXPECT_NEAR(kParams.equilibrium_f2(), -2.20725, 1e-12);
}

// Raises BetaSingular whenever l = 0, |theta| >= pi/2 or f2 >= 0; outside
// the 1e-6 division guard band it never raises otherwise.
TEST(Feedforward, BetaSingularExactlyOnInvertibilityLoss) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  int singular = 0;
  int regular = 0;
  for (int i = 0; i < 5000; ++i) {
    const double l = (i % 10 == 0) ? 0.0 : 0.1 + std::abs(u(rng));
    const double theta = 2.0 * u(rng);
    const double f2 = (i % 7 == 0) ? 0.0 : 4.0 * u(rng);
    const double c = std::cos(theta);
    const bool lost = l == 0.0 || std::abs(theta) >= std::numbers::pi / 2 ||
                      f2 >= 0.0;
    bool threw = false;
    try {
      linearizing_inputs(l, theta, u(rng), u(rng), f2, u(rng), u(rng), u(rng),
                         kParams);
    } catch (const CraneError& e) {
      EXPECT_EQ(e.fault(), Fault::kBetaSingular);
      threw = true;
    }
    if (lost) {
      EXPECT_TRUE(threw) << l << ' ' << theta << ' ' << f2;
      ++singular;
    } else if (std::abs(f2 * c) >= 1e-6) {
      EXPECT_FALSE(threw) << l << ' ' << theta << ' ' << f2;
      ++regular;
    }
  }
  EXPECT_GT(singular, 1000);
  EXPECT_GT(regular, 1000);
}

TEST(Feedforward, ExactLinearizationIdentity) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    CraneState s;
    s.x = u(rng);
    s.x_dot = u(rng);
    s.theta = 1.2 * u(rng);
    s.theta_dot = u(rng);
    s.l = 0.4 + 0.5 * std::abs(u(rng));
    s.l_dot = 0.3 * u(rng);
    s.f2 = -2.2 + 1.5 * u(rng);
    s.f2_dot = u(rng);
    const double v1 = 5.0 * u(rng);
    const double v2 = 5.0 * u(rng);
    const FeedforwardOut in = linearizing_inputs(
        s.l, s.theta, s.theta_dot, s.l_dot, s.f2, s.f2_dot, v1, v2, kParams);
    const OutputJet j = output_jet_from_state(s, in.f1, in.f2_ddot, kParams);
    EXPECT_NEAR(j.y1[4], v1, 1e-10 * std::max(1.0, std::abs(v1)));
    EXPECT_NEAR(j.y2[4], v2, 1e-10 * std::max(1.0, std::abs(v2)));
  }
}

template <class Ref>
testing::OpenLoop open_loop(const Ref& ref, double duration) {
  return testing::open_loop(ref, duration, kParams);
}

TEST(Feedforward, OpenLoopTracksRandomTrajectories) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto chain = testing::random_chain(seed, 16.0);
    const testing::OpenLoop r =
        open_loop([&](double t) { return chain.at(t); }, 16.0);
    EXPECT_LT(r.max_error, 1e-4) << "seed " << seed;
  }
}

TEST(Feedforward, LiftingPullsHarderThanWeight) {
  const plan::PolySegment up = plan::plan_segment(
      OutputJet::at_rest({0.2, -0.72}), {0.2, -0.52}, 0.0, 2.0);
  const testing::OpenLoop r = open_loop([&](double t) { return up.eval(t); }, 3.0);
  EXPECT_LT(r.min_f2, kParams.equilibrium_f2() - 0.01);
  // Peak pull coincides with peak upward acceleration, mid-segment.
  EXPECT_GT(r.t_min_f2, 0.2);
  EXPECT_LT(r.t_min_f2, 1.0);
  EXPECT_LT(r.max_error, 1e-6);
}

TEST(ControlInputs, ZeroErrorIsPureFeedforward) {
  const auto chain = testing::random_chain(3, 6.0);
  const auto gains = stability::ValidatedGains::validate(
      stability::experiment_gains(), kParams, 0.72);
  for (double t : {0.5, 1.7, 3.2}) {
    const OutputJet j = chain.at(t);
    const DesiredState d = desired_state(j, kParams.g);
    CraneState m;
    m.x = d.x;
    m.x_dot = d.x_dot;
    m.theta = d.theta;
    m.theta_dot = d.theta_dot;
    m.l = d.l;
    m.l_dot = d.l_dot;
    m.f2 = -2.3;
    m.f2_dot = 0.1;
    const Actuation a = control_inputs(j, d, m, gains, kParams);
    const FeedforwardOut ff = feedforward(j, d, m.f2, m.f2_dot, kParams);
    EXPECT_EQ(a.force.f1, ff.f1);
    EXPECT_EQ(a.f2_ddot, ff.f2_ddot);
    EXPECT_EQ(a.force.f2, m.f2);
  }
}

TEST(ControlInputs, CartOffsetFeedback) {
  const auto gains = stability::ValidatedGains::validate(
      stability::experiment_gains(), kParams, 0.72);
  const OutputJet j = OutputJet::at_rest({0.0, -0.72});
  const DesiredState d = desired_state(j, kParams.g);
  CraneState m = rest(0.01, 0.72);
  const Actuation a = control_inputs(j, d, m, gains, kParams);
  EXPECT_NEAR(a.force.f1, -8.0, 1e-12);
  EXPECT_NEAR(a.force.f2, kParams.equilibrium_f2(), 1e-12);
}

// Time after which |theta| stays below 1 degree, starting from a 5 degree
// swing about a fixed reference.
double settle_below_one_degree(double k3) {
  stability::GainSet g = stability::robustness_gains();
  g.k3 = k3;
  const auto gains = stability::ValidatedGains::validate(g, kParams, 0.72);
  const OutputPoint yr{0.3, -0.72};
  const OutputJet j = OutputJet::at_rest(yr);
  const DesiredState d = desired_state(j, kParams.g);
  CraneState st = rest(0.3, 0.72);
  st.theta = 5.0 * kDeg;
  double last_above = 0.0;
  for (int i = 0; i < 60000; ++i) {
    // Feedback sampled per step, feedforward per stage.
    const FeedbackTerms fb = limited_feedback(d, st, gains.gains());
    auto law = [&](double, const CraneState& stage) {
      const FeedforwardOut ff =
          feedforward(j, d, stage.f2, stage.f2_dot, kParams);
      return Actuation{{ff.f1 + fb.f1, stage.f2 + fb.f2}, ff.f2_ddot};
    };
    st = step(st, law, kParams, 1e-3);
    if (std::abs(st.theta) > kDeg) last_above = st.t;
  }
  return last_above;
}

TEST(ControlInputs, SwingGainDampsFaster) {
  const double with_k3 = settle_below_one_degree(-0.05);
  const double without = settle_below_one_degree(0.0);
  EXPECT_LT(with_k3, without);
  EXPECT_LT(without, 59.0);
}

TEST(LinearizationPoles, RepeatedPoleCoefficients) {
  const LinearizationPoles p = LinearizationPoles::repeated(2.0);
  EXPECT_EQ(p.a1, (std::array<double, 4>{16.0, 32.0, 24.0, 8.0}));
  EXPECT_EQ(p.a2, p.a1);
}

}  // namespace
}  // namespace crane::flat
