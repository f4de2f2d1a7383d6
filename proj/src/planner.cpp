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

#include "crane/planner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace crane::plan {
namespace {

constexpr int kOrders = flat::kJetOrder + 1;
constexpr double kSolveTolerance = 1e-8;

// k! / (k - i)!
double falling_factorial(int k, int i) {
  double r = 1.0;
  for (int j = 0; j < i; ++j) r *= static_cast<double>(k - j);
  return r;
}

using EndMatrix = Eigen::Matrix<double, kOrders, kOrders>;

// Rows: derivative order i at s = 1; columns: coefficients c5..c9.
const Eigen::PartialPivLU<EndMatrix>& end_block() {
  static const Eigen::PartialPivLU<EndMatrix> lu = [] {
    EndMatrix m;
    for (int i = 0; i < kOrders; ++i) {
      for (int k = 0; k < kOrders; ++k) {
        m(i, k) = falling_factorial(kOrders + k, i);
      }
    }
    return Eigen::PartialPivLU<EndMatrix>(m);
  }();
  return lu;
}

// The start jet fixes c0..c4 directly; the end conditions leave a 5x5 solve
// for c5..c9.
PolyCoeffs solve_one(const std::array<double, kOrders>& start, double target,
                     double duration) {
  PolyCoeffs out{};
  double tk = 1.0;
  for (int i = 0; i < kOrders; ++i) {
    out[i] = start[i] * tk / falling_factorial(i, i);
    tk *= duration;
  }
  Eigen::Matrix<double, kOrders, 1> rhs;
  for (int i = 0; i < kOrders; ++i) {
    double known = 0.0;
    for (int k = i; k < kOrders; ++k) known += falling_factorial(k, i) * out[k];
    rhs(i) = (i == 0 ? target : 0.0) - known;
  }
  const auto& lu = end_block();
  Eigen::Matrix<double, kOrders, 1> c = lu.solve(rhs);
  c += lu.solve(rhs - lu.reconstructedMatrix() * c);  // one refinement pass
  const double residual =
      (lu.reconstructedMatrix() * c - rhs).cwiseAbs().maxCoeff();
  const double scale = std::max(1.0, rhs.cwiseAbs().maxCoeff());
  if (!c.allFinite() || !(residual <= kSolveTolerance * scale)) {
    throw CraneError(Fault::kIllConditioned,
                     "boundary solve residual " + std::to_string(residual));
  }
  for (int k = 0; k < kOrders; ++k) out[kOrders + k] = c(k);
  return out;
}

bool finite_point(OutputPoint p) {
  return std::isfinite(p.y1) && std::isfinite(p.y2);
}

double cross(double ax, double ay, double bx, double by) {
  return ax * by - ay * bx;
}

// Ray parameter t in [0, 1] where p0 + t d crosses segment w, if any.
std::optional<double> intersect(OutputPoint p0, OutputPoint p1,
                                const LineSegment& w) {
  const double dx = p1.y1 - p0.y1;
  const double dy = p1.y2 - p0.y2;
  const double ex = w.b.y1 - w.a.y1;
  const double ey = w.b.y2 - w.a.y2;
  const double den = cross(dx, dy, ex, ey);
  if (std::abs(den) < 1e-15) return std::nullopt;  // parallel or degenerate
  const double wx = w.a.y1 - p0.y1;
  const double wy = w.a.y2 - p0.y2;
  const double t = cross(wx, wy, ex, ey) / den;
  const double u = cross(wx, wy, dx, dy) / den;
  constexpr double kTol = 1e-12;
  if (t < -kTol || t > 1.0 + kTol || u < -kTol || u > 1.0 + kTol) {
    return std::nullopt;
  }
  return std::clamp(t, 0.0, 1.0);
}

// Value and derivatives 1..4 of the lag-filtered unit ramp started at zero.
std::array<double, kOrders> filtered_unit_ramp(double tau, double a) {
  std::array<double, kOrders> r{};
  if (tau <= 0.0) return r;
  const double x = a * tau;
  const double e = std::exp(-x);
  const double x2 = x * x;
  const double x3 = x2 * x;
  const double x4 = x3 * x;
  // Erlang cumulative distributions of order 4 and 5.
  const double f4 = 1.0 - e * (1.0 + x + x2 / 2.0 + x3 / 6.0);
  const double f5 = f4 - e * x4 / 24.0;
  const double a4 = a * a * a * a;
  r[0] = tau * f4 - 4.0 / a * f5;
  r[1] = f4;
  r[2] = a4 * e * tau * tau * tau / 6.0;
  r[3] = a4 * e * (3.0 * tau * tau - a * tau * tau * tau) / 6.0;
  r[4] = a4 * e *
         (6.0 * tau - 6.0 * a * tau * tau + a * a * tau * tau * tau) / 6.0;
  return r;
}

}  // namespace

std::array<double, kOrders> eval_poly(const PolyCoeffs& c, double duration,
                                      double s) {
  std::array<double, kOrders> out{};
  double inv_t = 1.0;
  for (int i = 0; i < kOrders; ++i) {
    double v = 0.0;
    for (int k = kPolyCoeffs - 1; k >= i; --k) {
      v = v * s + c[k] * falling_factorial(k, i);
    }
    out[i] = v * inv_t;
    inv_t /= duration;
  }
  return out;
}

flat::OutputJet PolySegment::eval(double t) const {
  if (t >= t_end) return flat::OutputJet::at_rest(target());
  const double T = duration();
  const double s = std::max(0.0, (t - t_start) / T);
  flat::OutputJet j;
  j.y1 = eval_poly(c1, T, s);
  j.y2 = eval_poly(c2, T, s);
  return j;
}

OutputPoint PolySegment::target() const {
  double y1 = 0.0;
  double y2 = 0.0;
  for (int k = 0; k < kPolyCoeffs; ++k) {
    y1 += c1[k];
    y2 += c2[k];
  }
  return {y1, y2};
}

PolySegment PolySegment::hold(OutputPoint p, double t, double duration) {
  PolySegment seg;
  seg.c1[0] = p.y1;
  seg.c2[0] = p.y2;
  seg.t_start = t;
  seg.t_end = t + duration;
  return seg;
}

PolySegment plan_segment(const flat::OutputJet& initial, OutputPoint target,
                         double t_now, double duration) {
  if (!(duration > 0.0) || !std::isfinite(duration)) {
    throw std::invalid_argument("plan_segment: duration must be positive");
  }
  if (!initial.is_finite() || !finite_point(target) || !std::isfinite(t_now)) {
    throw CraneError(Fault::kNonFinite, "plan_segment: non-finite input");
  }
  PolySegment seg;
  seg.c1 = solve_one(initial.y1, target.y1, duration);
  seg.c2 = solve_one(initial.y2, target.y2, duration);
  seg.t_start = t_now;
  seg.t_end = t_now + duration;
  return seg;
}

double boundary_residual(const PolySegment& seg,
                         const flat::OutputJet& initial, OutputPoint target) {
  const double T = seg.duration();
  const auto s1 = eval_poly(seg.c1, T, 0.0);
  const auto s2 = eval_poly(seg.c2, T, 0.0);
  const auto e1 = eval_poly(seg.c1, T, 1.0);
  const auto e2 = eval_poly(seg.c2, T, 1.0);
  double r = 0.0;
  for (int i = 0; i < kOrders; ++i) {
    r = std::max(r, std::abs(s1[i] - initial.y1[i]));
    r = std::max(r, std::abs(s2[i] - initial.y2[i]));
    const double end1 = (i == 0) ? target.y1 : 0.0;
    const double end2 = (i == 0) ? target.y2 : 0.0;
    r = std::max(r, std::abs(e1[i] - end1));
    r = std::max(r, std::abs(e2[i] - end2));
  }
  return r;
}

void Workspace::add_box(Box b) {
  b.y2_min = std::min(b.y2_min, bounds_.y2_min);
  boxes_.push_back(b);
}

std::vector<LineSegment> Workspace::all_segments() const {
  std::vector<LineSegment> out;
  auto add_edges = [&out](const Box& b) {
    const OutputPoint ll{b.y1_min, b.y2_min};
    const OutputPoint lr{b.y1_max, b.y2_min};
    const OutputPoint ur{b.y1_max, b.y2_max};
    const OutputPoint ul{b.y1_min, b.y2_max};
    out.push_back({ll, lr});
    out.push_back({lr, ur});
    out.push_back({ur, ul});
    out.push_back({ul, ll});
  };
  add_edges(bounds_);
  out.insert(out.end(), extra_walls_.begin(), extra_walls_.end());
  for (const Box& b : boxes_) add_edges(b);
  return out;
}

bool Workspace::inside_any_box(OutputPoint p) const {
  return std::any_of(boxes_.begin(), boxes_.end(),
                     [p](const Box& b) { return b.contains_strict(p); });
}

void Workspace::validate(const char* path) const {
  const std::string base(path);
  auto check_box = [&base](const Box& b, const std::string& where) {
    if (!std::isfinite(b.y1_min) || !std::isfinite(b.y1_max) ||
        !std::isfinite(b.y2_min) || !std::isfinite(b.y2_max)) {
      throw std::invalid_argument(base + where + ": non-finite extent");
    }
    if (!(b.y1_min < b.y1_max) || !(b.y2_min < b.y2_max)) {
      throw std::invalid_argument(base + where + ": empty extent");
    }
  };
  check_box(bounds_, ".bounds");
  for (std::size_t i = 0; i < boxes_.size(); ++i) {
    const std::string where = ".boxes[" + std::to_string(i) + "]";
    check_box(boxes_[i], where);
    const Box& b = boxes_[i];
    if (b.y1_min < bounds_.y1_min || b.y1_max > bounds_.y1_max ||
        b.y2_max > bounds_.y2_max) {
      throw std::invalid_argument(base + where + ": outside bounds");
    }
  }
  for (std::size_t i = 0; i < extra_walls_.size(); ++i) {
    if (!finite_point(extra_walls_[i].a) || !finite_point(extra_walls_[i].b)) {
      throw std::invalid_argument(base + ".walls[" + std::to_string(i) +
                                  "]: non-finite endpoint");
    }
  }
}

void ReferenceCmd::validate() const {
  if (!(T > 0.0) || !std::isfinite(T)) {
    throw std::invalid_argument("horizon T must be positive");
  }
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) {
    throw std::invalid_argument("epsilon must be non-negative");
  }
  if (!std::isfinite(alpha1) || !std::isfinite(alpha2)) {
    throw std::invalid_argument("joystick gains must be finite");
  }
}

OutputPoint reference_from_joystick(const ReferenceCmd& cmd,
                                    OutputPoint current) {
  const double j1 = std::clamp(std::isfinite(cmd.j1) ? cmd.j1 : 0.0, -1.0, 1.0);
  const double j2 = std::clamp(std::isfinite(cmd.j2) ? cmd.j2 : 0.0, -1.0, 1.0);
  return {current.y1 + cmd.alpha1 * j1 * cmd.T,
          current.y2 + cmd.alpha2 * j2 * cmd.T};
}

Correction correct_reference_detailed(OutputPoint current, OutputPoint nominal,
                                      const Workspace& ws, double epsilon) {
  Correction out;
  out.point = nominal;
  const double dx = nominal.y1 - current.y1;
  const double dy = nominal.y2 - current.y2;
  const double len = std::hypot(dx, dy);
  if (!(len > 0.0)) {
    out.point = current;
    return out;
  }
  const double ux = dx / len;
  const double uy = dy / len;

  // A start point lying on a boundary only counts as a hit when the ray
  // immediately leaves free space.
  constexpr double kProbe = 1e-7;
  constexpr double kStartTol = 1e-10;
  const OutputPoint probe{current.y1 + ux * std::min(kProbe, len),
                          current.y2 + uy * std::min(kProbe, len)};
  const bool leaves_cleanly = ws.is_free(probe);

  double best = std::numeric_limits<double>::infinity();
  for (const LineSegment& w : ws.all_segments()) {
    const auto t = intersect(current, nominal, w);
    if (!t) continue;
    if (*t * len < kStartTol && leaves_cleanly) continue;
    best = std::min(best, *t);
  }
  if (!std::isfinite(best)) return out;

  out.hit = true;
  out.hit_point = {current.y1 + best * dx, current.y2 + best * dy};
  const OutputPoint pulled{out.hit_point.y1 - epsilon * ux,
                           out.hit_point.y2 - epsilon * uy};
  out.point = ws.is_free(pulled) ? pulled : current;
  return out;
}

OutputPoint correct_reference(OutputPoint current, OutputPoint nominal,
                              const Workspace& ws, double epsilon) {
  return correct_reference_detailed(current, nominal, ws, epsilon).point;
}

constexpr double kBoundsSampleTol = 1e-9;

SegmentCheck check_segment(const PolySegment& seg, const Workspace* ws,
                           double g, double slack_margin, int samples) {
  SegmentCheck r;
  r.worst_y2_ddot = std::numeric_limits<double>::infinity();
  const double T = seg.duration();
  const int n = std::max(samples, 1);
  for (int i = 0; i <= n; ++i) {
    const double s = static_cast<double>(i) / n;
    const auto y1 = eval_poly(seg.c1, T, s);
    const auto y2 = eval_poly(seg.c2, T, s);
    r.worst_y2_ddot = std::min(r.worst_y2_ddot, y2[2]);
    if (!(y2[2] > -g + slack_margin)) r.slack = true;
    // Polynomial evaluation next to a bound edge can land a rounding error
    // outside it; boxes get no such allowance.
    const OutputPoint p{y1[0], y2[0]};
    if (ws != nullptr &&
        (!ws->inside_bounds(p, kBoundsSampleTol) || ws->inside_any_box(p))) {
      r.collision = true;
    }
  }
  r.ok = !r.slack && !r.collision;
  return r;
}

flat::OutputJet ramp_trajectory(double dy1, double dy2, double Tt,
                                double alpha, double t) {
  if (!(Tt > 0.0) || !(alpha > 0.0)) {
    throw std::invalid_argument("ramp_trajectory: Tt and alpha must be > 0");
  }
  struct Kink {
    double at;
    double slope1;
    double slope2;
  };
  // Slope changes of the piecewise-linear path; filtering is linear, so the
  // response is the sum of filtered ramps started at each kink.
  const std::array<Kink, 3> kinks{{{Tt, dy1 / Tt, 2.0 * dy2 / Tt},
                                   {1.5 * Tt, 0.0, -4.0 * dy2 / Tt},
                                   {2.0 * Tt, -dy1 / Tt, 2.0 * dy2 / Tt}}};
  flat::OutputJet j;
  for (const Kink& k : kinks) {
    const auto r = filtered_unit_ramp(t - k.at, alpha);
    for (int i = 0; i < kOrders; ++i) {
      j.y1[i] += k.slope1 * r[i];
      j.y2[i] += k.slope2 * r[i];
    }
  }
  return j;
}

}  // namespace crane::plan
