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

#include "crane/stability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace crane::stability {

bool GainSet::is_finite() const {
  return std::isfinite(k1) && std::isfinite(k2) && std::isfinite(k3) &&
         std::isfinite(k4) && std::isfinite(k5) && std::isfinite(k6);
}

GainSet experiment_gains() { return {800.0, 800.0, -0.05, 0.0, 200.0, 200.0}; }

GainSet robustness_gains() { return {10.0, 10.0, -0.01, 0.0, 10.0, 10.0}; }

double StabilityReport::boundary_distance() const {
  double d = std::numeric_limits<double>::infinity();
  for (double v : condition_values) {
    d = std::min(d, std::isnan(v) ? 0.0 : std::abs(v));
  }
  return d;
}

std::array<double, 5> characteristic_a1(const GainSet& k, const PhysParams& p,
                                        double l0) {
  return {p.M * l0, k.k2 * l0 - k.k4, k.k1 * l0 - k.k3 + (p.M + p.m) * p.g,
          k.k2 * p.g, k.k1 * p.g};
}

Eigen::Matrix4d closed_loop_a1(const GainSet& k, const PhysParams& p,
                               double l0) {
  const double M = p.M;
  const double ml = M * l0;
  Eigen::Matrix4d a;
  // clang-format off
  a << 0.0,         1.0,         0.0,                           0.0,
       -k.k1 / M,   -k.k2 / M,   (p.m * p.g - k.k3) / M,        -k.k4 / M,
       0.0,         0.0,         0.0,                           1.0,
       k.k1 / ml,   k.k2 / ml,   (k.k3 - (M + p.m) * p.g) / ml, k.k4 / ml;
  // clang-format on
  return a;
}

Eigen::Matrix2d closed_loop_a2(const GainSet& k, const PhysParams& p) {
  Eigen::Matrix2d a;
  a << 0.0, 1.0, -k.k5 / p.m, -k.k6 / p.m;
  return a;
}

double max_real_eigenvalue(const Eigen::MatrixXd& a) {
  Eigen::EigenSolver<Eigen::MatrixXd> solver(a, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  return solver.eigenvalues().real().maxCoeff();
}

StabilityReport check_gains(const GainSet& k, const PhysParams& p, double l0,
                            double margin) {
  StabilityReport r;
  const double M = p.M;
  const double mg = p.m * p.g;
  const double cubic = k.k2 * l0 - k.k4;

  // Quotients are evaluated as printed; a zero denominator yields inf/nan and
  // the comparison below rejects it.
  const double c1 = -k.k4 * M * p.g / cubic + k.k1 * l0 - k.k3 + mg;
  const double c2_num =
      -k.k2 * k.k4 * M * p.g + cubic * (k.k1 * k.k4 - k.k2 * k.k3 + k.k2 * mg);
  const double c2_den = -k.k4 * M * p.g + cubic * (k.k1 * l0 - k.k3 + mg);
  const double c2 = c2_num / c2_den;

  r.condition_values = {k.k1, cubic, c1, c2, k.k5, k.k6};
  r.satisfied = true;
  for (double v : r.condition_values) {
    if (!(v > margin)) r.satisfied = false;
  }

  r.a1_max_real = max_real_eigenvalue(closed_loop_a1(k, p, l0));
  r.a2_max_real = max_real_eigenvalue(closed_loop_a2(k, p));
  r.eigen_max_real = std::max(r.a1_max_real, r.a2_max_real);
  return r;
}

CartSwingGains place_poles_a1(const std::array<double, 4>& c,
                              const PhysParams& p, double l0) {
  const double ml = p.M * l0;
  const bool finite_input = std::all_of(c.begin(), c.end(),
                                        [](double v) { return std::isfinite(v); });
  if (!finite_input || !(l0 > 0.0) || !(p.g > 0.0) || !(ml > 0.0)) {
    throw CraneError(Fault::kUnsolvable,
                     "pole placement needs finite coefficients, l0 > 0, g > 0");
  }
  CartSwingGains k;
  k.k1 = ml * c[3] / p.g;
  k.k2 = ml * c[2] / p.g;
  k.k4 = k.k2 * l0 - ml * c[0];
  k.k3 = k.k1 * l0 + (p.M + p.m) * p.g - ml * c[1];
  return k;
}

std::array<double, 4> monic_from_roots(
    const std::array<std::complex<double>, 4>& roots) {
  // Expand prod (s - r_i) with complex arithmetic, then drop the imaginary
  // residue left by conjugate pairs.
  std::array<std::complex<double>, 5> poly{1.0, 0.0, 0.0, 0.0, 0.0};
  int degree = 0;
  for (const auto& r : roots) {
    for (int i = degree + 1; i >= 1; --i) {
      poly[i] -= r * poly[i - 1];
    }
    ++degree;
  }
  return {poly[1].real(), poly[2].real(), poly[3].real(), poly[4].real()};
}

ValidatedGains ValidatedGains::validate(const GainSet& gains,
                                        const PhysParams& params, double l0) {
  if (!gains.is_finite()) {
    throw CraneError(Fault::kGainReject, "non-finite gain");
  }
  const StabilityReport r = check_gains(gains, params, l0);
  if (!r.satisfied) {
    std::ostringstream os;
    os << "gains fail closed-loop conditions at l0=" << l0 << " (values:";
    for (double v : r.condition_values) os << ' ' << v;
    os << ')';
    throw CraneError(Fault::kGainReject, os.str());
  }
  return ValidatedGains(gains, l0);
}

std::vector<StabilityReport> check_gains_batch_serial(
    std::span<const GainSet> gains, const PhysParams& params, double l0) {
  std::vector<StabilityReport> out(gains.size());
  for (std::size_t i = 0; i < gains.size(); ++i) {
    out[i] = check_gains(gains[i], params, l0);
  }
  return out;
}

std::vector<StabilityReport> check_gains_batch_parallel(
    std::span<const GainSet> gains, const PhysParams& params, double l0) {
  std::vector<StabilityReport> out(gains.size());
  const auto n = static_cast<std::ptrdiff_t>(gains.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    out[static_cast<std::size_t>(i)] =
        check_gains(gains[static_cast<std::size_t>(i)], params, l0);
  }
  return out;
}

}  // namespace crane::stability
