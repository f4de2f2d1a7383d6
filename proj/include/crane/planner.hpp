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

// Output-space trajectory sources: the smoothed ramp, ninth-order
// rest-terminating segments, joystick references and their collision
// correction against a static workspace.

#pragma once

#include <array>
#include <optional>
#include <vector>

#include "crane/flatness.hpp"
#include "crane/model.hpp"

namespace crane::plan {

inline constexpr int kPolyCoeffs = 10;
using PolyCoeffs = std::array<double, kPolyCoeffs>;

/// Derivatives 0..4 of sum c_k s^k at s, converted to physical time with
/// s = (t - t_start) / duration.
std::array<double, flat::kJetOrder + 1> eval_poly(const PolyCoeffs& c,
                                                  double duration, double s);

/// One replanned piece of the desired output trajectory. Coefficients are in
/// normalized time s in [0, 1]. Before t_start the start jet is returned;
/// from t_end on the target is held with all derivatives zero.
struct PolySegment {
  PolyCoeffs c1{};
  PolyCoeffs c2{};
  double t_start = 0.0;
  double t_end = 0.0;

  double duration() const { return t_end - t_start; }
  flat::OutputJet eval(double t) const;
  OutputPoint target() const;

  /// A segment that holds `p` at rest from t on.
  static PolySegment hold(OutputPoint p, double t, double duration);
};

/// Per-output solve of the two-point boundary problem with value and
/// derivatives 0..4 imposed at both ends (zero derivatives at the end).
/// Throws kIllConditioned if the solve residual exceeds 1e-8, kNonFinite on a
/// non-finite jet, std::invalid_argument if duration <= 0.
PolySegment plan_segment(const flat::OutputJet& initial, OutputPoint target,
                         double t_now, double duration);

/// Largest boundary-condition violation of a segment against its start jet
/// and target (physical units).
double boundary_residual(const PolySegment& seg,
                         const flat::OutputJet& initial, OutputPoint target);

struct Box {
  double y1_min = 0.0;
  double y1_max = 0.0;
  double y2_min = 0.0;
  double y2_max = 0.0;

  bool contains_strict(OutputPoint p) const {
    return p.y1 > y1_min && p.y1 < y1_max && p.y2 > y2_min && p.y2 < y2_max;
  }
  bool contains_closed(OutputPoint p) const {
    return p.y1 >= y1_min && p.y1 <= y1_max && p.y2 >= y2_min &&
           p.y2 <= y2_max;
  }
};

struct LineSegment {
  OutputPoint a;
  OutputPoint b;
};

/// Confined space in output coordinates. Obstacle boxes are extended down to
/// the floor (bounds.y2_min) on insertion.
class Workspace {
 public:
  Workspace() = default;
  explicit Workspace(Box bounds) : bounds_(bounds) {}

  void add_box(Box b);
  void add_wall(LineSegment w) { extra_walls_.push_back(w); }

  const Box& bounds() const { return bounds_; }
  const std::vector<Box>& boxes() const { return boxes_; }
  const std::vector<LineSegment>& extra_walls() const { return extra_walls_; }

  /// Every line segment the reference ray is checked against: the four bound
  /// edges, extra walls and the edges of every box.
  std::vector<LineSegment> all_segments() const;

  bool inside_bounds(OutputPoint p) const { return bounds_.contains_closed(p); }
  /// Bounds grown by `tol` on every side.
  bool inside_bounds(OutputPoint p, double tol) const {
    return p.y1 >= bounds_.y1_min - tol && p.y1 <= bounds_.y1_max + tol &&
           p.y2 >= bounds_.y2_min - tol && p.y2 <= bounds_.y2_max + tol;
  }
  bool inside_any_box(OutputPoint p) const;
  bool is_free(OutputPoint p) const {
    return inside_bounds(p) && !inside_any_box(p);
  }

  /// Throws std::invalid_argument; `path` prefixes the message.
  void validate(const char* path = "workspace") const;

 private:
  Box bounds_{-1e9, 1e9, -1e9, 1e9};
  std::vector<Box> boxes_;
  std::vector<LineSegment> extra_walls_;
};

struct ReferenceCmd {
  double j1 = 0.0;
  double j2 = 0.0;
  double alpha1 = 0.12;  // m/s at full deflection
  double alpha2 = 0.04;
  double T = 1.5;         // horizon (s)
  double epsilon = 0.08;  // standoff (m)

  /// Throws std::invalid_argument on non-positive T or negative epsilon.
  void validate() const;
};

/// current + (alpha1 j1, alpha2 j2) T, with j clamped to [-1, 1].
OutputPoint reference_from_joystick(const ReferenceCmd& cmd,
                                    OutputPoint current);

struct Correction {
  OutputPoint point;
  bool hit = false;
  OutputPoint hit_point;  // closest intersection, valid when hit
};

/// Pulls the nominal reference back to epsilon before the first obstacle or
/// wall crossed on the way from `current`. Intersections at the start point
/// are ignored when the ray leaves into free space. If the pulled-back point
/// is not free, `current` is returned.
Correction correct_reference_detailed(OutputPoint current, OutputPoint nominal,
                                      const Workspace& ws, double epsilon);
OutputPoint correct_reference(OutputPoint current, OutputPoint nominal,
                              const Workspace& ws, double epsilon);

/// Why a planned segment was rejected, if it was.
struct SegmentCheck {
  bool ok = true;
  bool slack = false;      // y2'' <= -g + margin somewhere
  bool collision = false;  // some sample leaves free space
  double worst_y2_ddot = 0.0;
};

/// Scans `samples` + 1 evenly spaced points of the segment.
SegmentCheck check_segment(const PolySegment& seg, const Workspace* ws,
                           double g, double slack_margin, int samples = 128);

/// Piecewise-linear move (dy1 over [Tt, 2Tt], dy2 up over [Tt, 1.5Tt] and
/// back over [1.5Tt, 2Tt]) passed through four cascaded first-order lags of
/// rate alpha. Returned jet is the offset from the start point.
flat::OutputJet ramp_trajectory(double dy1, double dy2, double Tt,
                                double alpha, double t);

}  // namespace crane::plan
