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

// Random snap-continuous reference trajectories for tests: a chain of
// ninth-order segments, each planned from the jet of the previous one at a
// random instant inside it, so the chain is continuous through the fourth
// derivative.

#pragma once

#include <random>
#include <vector>

#include "crane/flatness.hpp"
#include "crane/planner.hpp"

namespace crane::testing {

struct SegmentChain {
  std::vector<plan::PolySegment> segments;

  flat::OutputJet at(double t) const {
    std::size_t i = 0;
    while (i + 1 < segments.size() && segments[i + 1].t_start <= t) ++i;
    return segments[i].eval(t);
  }
};

/// Targets inside y1 in [0.05, 0.85], y2 in [-0.75, -0.35]; every segment is
/// checked against a 0.5 g slack margin.
inline SegmentChain random_chain(std::uint64_t seed, double horizon,
                                 OutputPoint start = {0.1, -0.72}) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> y1(0.05, 0.85);
  std::uniform_real_distribution<double> y2(-0.75, -0.35);
  std::uniform_real_distribution<double> dur(2.5, 5.0);
  std::uniform_real_distribution<double> frac(0.4, 1.0);
  SegmentChain chain;
  flat::OutputJet jet = flat::OutputJet::at_rest(start);
  double t = 0.0;
  while (t < horizon) {
    plan::PolySegment seg;
    for (int attempt = 0;; ++attempt) {
      seg = plan::plan_segment(jet, {y1(rng), y2(rng)}, t, dur(rng));
      if (plan::check_segment(seg, nullptr, 9.81, 0.5 * 9.81).ok) break;
      if (attempt > 100) throw std::runtime_error("no feasible segment");
    }
    chain.segments.push_back(seg);
    const double next = t + frac(rng) * seg.duration();
    jet = seg.eval(next);
    t = next;
  }
  return chain;
}

}  // namespace crane::testing
