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

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "crane/stability.hpp"
#include "crane/units.hpp"

namespace crane {
namespace {

using units::Dim;
using Issues = std::vector<std::string>;

std::string join_issues(const Issues& issues) {
  std::string out = "invalid scenario:";
  for (const auto& i : issues) out += "\n  " + i;
  return out;
}

// Reads one JSON object, recording which keys were consumed so unknown keys
// can be reported.
class Reader {
 public:
  Reader(const Json* obj, std::string path, Issues& issues)
      : obj_(obj), path_(std::move(path)), issues_(&issues) {
    if (obj_ != nullptr && !obj_->is_object()) {
      fail_here("expected an object");
      obj_ = nullptr;
    }
  }

  const std::string& path() const { return path_; }
  std::string at(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }
  void fail(const std::string& key, const std::string& msg) {
    issues_->push_back(at(key) + ": " + msg);
  }
  void fail_here(const std::string& msg) {
    issues_->push_back((path_.empty() ? "<root>" : path_) + ": " + msg);
  }

  const Json* raw(const std::string& key) {
    if (obj_ == nullptr) return nullptr;
    used_.insert(key);
    const auto it = obj_->find(key);
    return it == obj_->end() ? nullptr : &*it;
  }
  bool has(const std::string& key) const {
    return obj_ != nullptr && obj_->contains(key);
  }

  std::optional<double> opt_quantity(const std::string& key, Dim d) {
    const Json* v = raw(key);
    if (v == nullptr) return std::nullopt;
    return quantity_of(*v, d, at(key));
  }
  double quantity(const std::string& key, Dim d, double def) {
    return opt_quantity(key, d).value_or(def);
  }

  std::optional<double> quantity_of(const Json& v, Dim d,
                                    const std::string& where) {
    if (v.is_number()) {
      const double x = v.get<double>();
      if (!std::isfinite(x)) {
        issues_->push_back(where + ": not finite");
        return std::nullopt;
      }
      return x;
    }
    if (v.is_string()) {
      try {
        return units::parse(v.get<std::string>(), d);
      } catch (const std::invalid_argument& e) {
        issues_->push_back(where + ": " + e.what());
        return std::nullopt;
      }
    }
    issues_->push_back(where + ": expected a number or '<number> <unit>'");
    return std::nullopt;
  }

  // [a, b] with a < b
  std::optional<std::pair<double, double>> range(const std::string& key,
                                                 Dim d) {
    const Json* v = raw(key);
    if (v == nullptr) return std::nullopt;
    if (!v->is_array() || v->size() != 2) {
      fail(key, "expected [min, max]");
      return std::nullopt;
    }
    const auto a = quantity_of((*v)[0], d, at(key) + "[0]");
    const auto b = quantity_of((*v)[1], d, at(key) + "[1]");
    if (!a || !b) return std::nullopt;
    if (!(*a < *b)) {
      fail(key, "min must be below max");
      return std::nullopt;
    }
    return std::make_pair(*a, *b);
  }

  std::optional<OutputPoint> point(const Json& v, const std::string& where) {
    if (!v.is_array() || v.size() != 2) {
      issues_->push_back(where + ": expected [y1, y2]");
      return std::nullopt;
    }
    const auto a = quantity_of(v[0], Dim::kLength, where + "[0]");
    const auto b = quantity_of(v[1], Dim::kLength, where + "[1]");
    if (!a || !b) return std::nullopt;
    return OutputPoint{*a, *b};
  }

  std::string str(const std::string& key, const std::string& def) {
    const Json* v = raw(key);
    if (v == nullptr) return def;
    if (!v->is_string()) {
      fail(key, "expected a string");
      return def;
    }
    return v->get<std::string>();
  }

  bool boolean(const std::string& key, bool def) {
    const Json* v = raw(key);
    if (v == nullptr) return def;
    if (!v->is_boolean()) {
      fail(key, "expected true or false");
      return def;
    }
    return v->get<bool>();
  }

  std::int64_t integer(const std::string& key, std::int64_t def) {
    const Json* v = raw(key);
    if (v == nullptr) return def;
    if (!v->is_number_integer()) {
      fail(key, "expected an integer");
      return def;
    }
    return v->get<std::int64_t>();
  }

  Reader child(const std::string& key) {
    return Reader(raw(key), at(key), *issues_);
  }

  void finish() {
    if (obj_ == nullptr) return;
    for (auto it = obj_->begin(); it != obj_->end(); ++it) {
      if (!used_.count(it.key())) {
        issues_->push_back(at(it.key()) + ": unknown key");
      }
    }
  }

  Issues& issues() { return *issues_; }

 private:
  const Json* obj_;
  std::string path_;
  Issues* issues_;
  std::set<std::string> used_;
};

void read_plant(Reader r, PhysParams& p) {
  p.M = r.quantity("M", Dim::kMass, p.M);
  p.m = r.quantity("m", Dim::kMass, p.m);
  p.g = r.quantity("g", Dim::kAcceleration, p.g);
  p.l_min = r.quantity("l_min", Dim::kLength, p.l_min);
  p.theta_max = r.quantity("theta_max", Dim::kAngle, p.theta_max);
  p.f2_max = r.quantity("f2_max", Dim::kForce, p.f2_max);
  r.finish();
  try {
    p.validate();
  } catch (const std::invalid_argument& e) {
    r.fail_here(e.what());
  }
}

stability::GainSet read_gains(Reader& parent, const std::string& key,
                              stability::GainSet def) {
  const Json* v = parent.raw(key);
  if (v == nullptr) return def;
  if (v->is_string()) {
    const auto name = v->get<std::string>();
    if (name == "experiment") return stability::experiment_gains();
    if (name == "robustness") return stability::robustness_gains();
    if (name == "zero") return {};
    parent.fail(key, "unknown gain preset '" + name +
                         "' (experiment, robustness, zero)");
    return def;
  }
  Reader r(v, parent.at(key), parent.issues());
  stability::GainSet k;
  k.k1 = r.quantity("k1", Dim::kStiffness, 0.0);
  k.k2 = r.quantity("k2", Dim::kDamping, 0.0);
  k.k3 = r.quantity("k3", Dim::kAngularGain, 0.0);
  k.k4 = r.quantity("k4", Dim::kAngularDamping, 0.0);
  k.k5 = r.quantity("k5", Dim::kStiffness, 0.0);
  k.k6 = r.quantity("k6", Dim::kDamping, 0.0);
  r.finish();
  return k;
}

void read_workspace(Reader r, Scenario& s) {
  s.has_workspace = true;
  plan::Box bounds{0.0, 0.88, -0.75, -0.3};
  if (r.has("bounds")) {
    Reader b = r.child("bounds");
    if (const auto y1 = b.range("y1", Dim::kLength)) {
      bounds.y1_min = y1->first;
      bounds.y1_max = y1->second;
    } else if (!b.has("y1")) {
      b.fail("y1", "required");
    }
    if (const auto y2 = b.range("y2", Dim::kLength)) {
      bounds.y2_min = y2->first;
      bounds.y2_max = y2->second;
    } else if (!b.has("y2")) {
      b.fail("y2", "required");
    }
    b.finish();
  }
  s.workspace = plan::Workspace(bounds);

  if (const Json* boxes = r.raw("boxes")) {
    if (!boxes->is_array()) {
      r.fail("boxes", "expected a list");
    } else {
      for (std::size_t i = 0; i < boxes->size(); ++i) {
        Reader b(&(*boxes)[i], r.at("boxes") + "[" + std::to_string(i) + "]",
                 r.issues());
        const auto y1 = b.range("y1", Dim::kLength);
        const auto y2 = b.range("y2", Dim::kLength);
        if (!b.has("y1")) b.fail("y1", "required");
        if (!b.has("y2")) b.fail("y2", "required");
        b.finish();
        if (y1 && y2) {
          s.workspace.add_box({y1->first, y1->second, y2->first, y2->second});
        }
      }
    }
  }
  if (const Json* walls = r.raw("walls")) {
    if (!walls->is_array()) {
      r.fail("walls", "expected a list");
    } else {
      for (std::size_t i = 0; i < walls->size(); ++i) {
        const std::string where =
            r.at("walls") + "[" + std::to_string(i) + "]";
        Reader w(&(*walls)[i], where, r.issues());
        const Json* a = w.raw("from");
        const Json* b = w.raw("to");
        std::optional<OutputPoint> pa, pb;
        if (a == nullptr) w.fail("from", "required");
        else pa = w.point(*a, w.at("from"));
        if (b == nullptr) w.fail("to", "required");
        else pb = w.point(*b, w.at("to"));
        w.finish();
        if (pa && pb) s.workspace.add_wall({*pa, *pb});
      }
    }
  }
  r.finish();
  try {
    s.workspace.validate(r.path().c_str());
  } catch (const std::invalid_argument& e) {
    r.issues().push_back(e.what());
  }
}

void read_controller(Reader r, Scenario& s) {
  ctl::ControllerConfig& c = s.controller;
  const std::string mode = r.str("mode", "SC");
  if (const auto m = ctl::mode_from_string(mode)) {
    c.mode = *m;
  } else {
    r.fail("mode", "unknown mode '" + mode + "' (SC, VC, FF_ONLY, EXACT)");
  }
  c.gains = read_gains(r, "gains", c.gains);
  c.cmd.alpha1 = r.quantity("alpha1", Dim::kVelocity, c.cmd.alpha1);
  c.cmd.alpha2 = r.quantity("alpha2", Dim::kVelocity, c.cmd.alpha2);
  c.cmd.T = r.quantity("T", Dim::kTime, c.cmd.T);
  c.cmd.epsilon = r.quantity("epsilon", Dim::kLength, c.cmd.epsilon);
  const std::string anchor = r.str("anchor", "desired");
  if (const auto a = ctl::anchor_from_string(anchor)) {
    c.anchor = *a;
  } else {
    r.fail("anchor", "expected 'desired' or 'measured'");
  }
  const double rate = r.quantity("replan_rate", Dim::kFrequency, 50.0);
  if (!(rate > 0.0)) {
    r.fail("replan_rate", "must be positive");
  } else {
    const double every = 1.0 / (rate * s.dt);
    c.replan_every = std::max(1, static_cast<int>(std::lround(every)));
    if (std::abs(every - c.replan_every) > 1e-6 * every) {
      r.fail("replan_rate", "must divide the control rate");
    }
  }
  c.slack_margin_g = r.quantity("slack_margin_g", Dim::kDimensionless,
                                c.slack_margin_g);
  c.check_samples = static_cast<int>(r.integer("check_samples",
                                               c.check_samples));
  c.exact_pole = r.quantity("exact_pole", Dim::kRate, c.exact_pole);

  c.model = s.plant;
  if (r.has("model")) {
    Reader m = r.child("model");
    c.model.M = m.quantity("M", Dim::kMass, c.model.M);
    c.model.m = m.quantity("m", Dim::kMass, c.model.m);
    c.model.g = m.quantity("g", Dim::kAcceleration, c.model.g);
    c.model.M *= m.quantity("M_scale", Dim::kDimensionless, 1.0);
    c.model.m *= m.quantity("m_scale", Dim::kDimensionless, 1.0);
    m.finish();
    try {
      c.model.validate();
    } catch (const std::invalid_argument& e) {
      m.fail_here(e.what());
    }
  }
  if (r.has("limits")) {
    Reader l = r.child("limits");
    c.limits.f1_abs_max = l.quantity("f1_abs_max", Dim::kForce,
                                     c.limits.f1_abs_max);
    c.limits.f2_min = l.quantity("f2_min", Dim::kForce, c.limits.f2_min);
    l.finish();
  }
  r.finish();

  try {
    c.cmd.validate();
  } catch (const std::invalid_argument& e) {
    r.fail_here(e.what());
  }
  if (c.check_samples < 1) r.fail("check_samples", "must be >= 1");
  if (!(c.slack_margin_g >= 0.0)) r.fail("slack_margin_g", "must be >= 0");
  const bool gains_needed = c.mode == ctl::Mode::kSC ||
                            c.mode == ctl::Mode::kVC || !c.gains.is_zero();
  if (gains_needed) {
    if (!c.gains.is_finite()) {
      r.fail("gains", "non-finite gain");
    } else if (!stability::check_gains(c.gains, c.model, s.l0).satisfied) {
      r.fail("gains", "fail the closed-loop stability conditions at l0");
    }
  }
}

void read_tape(Reader& r, const Json& tape, Scenario& s) {
  if (!tape.is_array()) {
    r.fail("tape", "expected a list");
    return;
  }
  double last_t = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < tape.size(); ++i) {
    const std::string where = r.at("tape") + "[" + std::to_string(i) + "]";
    const Json& e = tape[i];
    JoystickSample js;
    if (e.is_array()) {
      if (e.size() != 3) {
        r.issues().push_back(where + ": expected [t, j1, j2]");
        continue;
      }
      const auto t = r.quantity_of(e[0], Dim::kTime, where + "[0]");
      const auto j1 = r.quantity_of(e[1], Dim::kDimensionless, where + "[1]");
      const auto j2 = r.quantity_of(e[2], Dim::kDimensionless, where + "[2]");
      if (!t || !j1 || !j2) continue;
      js = {*t, *j1, *j2};
    } else {
      Reader o(&e, where, r.issues());
      const auto t = o.opt_quantity("t", Dim::kTime);
      js.j1 = o.quantity("j1", Dim::kDimensionless, 0.0);
      js.j2 = o.quantity("j2", Dim::kDimensionless, 0.0);
      o.finish();
      if (!t) {
        r.issues().push_back(where + ".t: required");
        continue;
      }
      js.t = *t;
    }
    if (std::abs(js.j1) > 1.0 || std::abs(js.j2) > 1.0) {
      r.issues().push_back(where + ": joystick axes must lie in [-1, 1]");
    }
    if (js.t < last_t) {
      r.issues().push_back(where + ": times must be non-decreasing");
    }
    last_t = js.t;
    s.tape.push_back(js);
  }
}

void read_reference(Reader r, Scenario& s) {
  const std::string type = r.str("type", "joystick");
  if (type == "joystick") {
    s.reference = ReferenceKind::kJoystick;
    if (const Json* tape = r.raw("tape")) read_tape(r, *tape, s);
  } else if (type == "ramp") {
    s.reference = ReferenceKind::kRamp;
    s.ramp.dy1 = r.quantity("dy1", Dim::kLength, s.ramp.dy1);
    s.ramp.dy2 = r.quantity("dy2", Dim::kLength, s.ramp.dy2);
    s.ramp.Tt = r.quantity("Tt", Dim::kTime, s.ramp.Tt);
    s.ramp.alpha = r.quantity("alpha", Dim::kRate, s.ramp.alpha);
    if (!(s.ramp.Tt > 0.0)) r.fail("Tt", "must be positive");
    if (!(s.ramp.alpha > 0.0)) r.fail("alpha", "must be positive");
  } else {
    r.fail("type", "expected 'joystick' or 'ramp'");
  }
  r.finish();
}

void read_mode_switches(Reader& root, Scenario& s) {
  const Json* v = root.raw("mode_switches");
  if (v == nullptr) return;
  if (!v->is_array()) {
    root.fail("mode_switches", "expected a list");
    return;
  }
  for (std::size_t i = 0; i < v->size(); ++i) {
    const std::string where =
        root.at("mode_switches") + "[" + std::to_string(i) + "]";
    Reader o(&(*v)[i], where, root.issues());
    ModeSwitch ms;
    const auto t = o.opt_quantity("t", Dim::kTime);
    const std::string mode = o.str("mode", "");
    o.finish();
    const auto m = ctl::mode_from_string(mode);
    if (!t) o.fail("t", "required");
    if (!m) o.fail("mode", "unknown mode '" + mode + "'");
    if (t && m) s.mode_switches.push_back({*t, *m});
  }
  std::stable_sort(s.mode_switches.begin(), s.mode_switches.end(),
                   [](const ModeSwitch& a, const ModeSwitch& b) {
                     return a.t < b.t;
                   });
}

void read_noise(Reader r, NoiseConfig& n) {
  n.enabled = r.boolean("enabled", n.enabled);
  n.sigma_x = r.quantity("sigma_x", Dim::kLength, n.sigma_x);
  n.sigma_y1 = r.quantity("sigma_y1", Dim::kLength, n.sigma_y1);
  n.sigma_y2 = r.quantity("sigma_y2", Dim::kLength, n.sigma_y2);
  n.sigma_l = r.quantity("sigma_l", Dim::kLength, n.sigma_l);
  n.sigma_theta = r.quantity("sigma_theta", Dim::kAngle, n.sigma_theta);
  r.finish();
  for (double v : {n.sigma_x, n.sigma_y1, n.sigma_y2, n.sigma_l,
                   n.sigma_theta}) {
    if (!(v >= 0.0)) {
      r.fail_here("noise levels must be non-negative");
      break;
    }
  }
}

void read_metrics(Reader r, MetricsConfig& m) {
  if (const auto w = r.range("residual_window", Dim::kTime)) {
    m.window_start = w->first;
    m.window_end = w->second;
  }
  m.completion_tol = r.quantity("completion_tol", Dim::kLength,
                                m.completion_tol);
  if (const Json* t = r.raw("target")) {
    if (const auto p = r.point(*t, r.at("target"))) m.target = *p;
  }
  r.finish();
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> issues)
    : std::runtime_error(join_issues(issues)), issues_(std::move(issues)) {}

std::int64_t Scenario::steps() const {
  return static_cast<std::int64_t>(std::llround(duration / dt));
}

ctl::Joystick Scenario::joystick_at(double t) const {
  ctl::Joystick js;
  // Tolerate accumulated rounding in sample times.
  for (const JoystickSample& s : tape) {
    if (s.t > t + 1e-9) break;
    js = {s.j1, s.j2};
  }
  return js;
}

Scenario parse_scenario(const Json& doc) {
  Issues issues;
  Scenario s;
  Reader root(&doc, "", issues);
  s.name = root.str("name", s.name);
  root.raw("description");
  root.raw("license");
  s.dt = root.quantity("dt", Dim::kTime, s.dt);
  if (!(s.dt > 0.0)) root.fail("dt", "must be positive");
  const std::int64_t seed = root.integer("seed", 1);
  if (seed < 0) root.fail("seed", "must be non-negative");
  s.seed = static_cast<std::uint64_t>(std::max<std::int64_t>(seed, 0));

  read_plant(root.child("plant"), s.plant);
  {
    Reader init = root.child("initial");
    s.x0 = init.quantity("x", Dim::kLength, s.x0);
    s.l0 = init.quantity("l", Dim::kLength, s.l0);
    init.finish();
    if (!(s.l0 >= s.plant.l_min)) init.fail("l", "below l_min");
  }
  if (root.has("workspace")) read_workspace(root.child("workspace"), s);
  read_reference(root.child("reference"), s);
  read_controller(root.child("controller"), s);
  read_mode_switches(root, s);
  read_noise(root.child("noise"), s.noise);
  read_metrics(root.child("metrics"), s.metrics);

  const std::optional<double> duration =
      root.opt_quantity("duration", Dim::kTime);
  if (duration) {
    s.duration = *duration;
  } else if (s.reference == ReferenceKind::kRamp) {
    s.duration = 4.0 * s.ramp.Tt;
  } else {
    root.fail("duration", "required for joystick references");
  }
  if (!(s.duration > 0.0)) root.fail("duration", "must be positive");
  root.finish();

  if (s.has_workspace && !s.workspace.is_free(s.start_point())) {
    issues.push_back("initial: payload start lies outside free space");
  }
  if (!issues.empty()) throw ConfigError(std::move(issues));
  return s;
}

Json load_json(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError({file.string() + ": cannot open"});
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError({file.string() + ": " + e.what()});
  }
}

Scenario load_scenario(const std::filesystem::path& file) {
  return parse_scenario(load_json(file));
}

}  // namespace crane
