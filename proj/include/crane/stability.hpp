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

// Closed-loop validation of the limited state-feedback gains
//
//   F_fb = -[k1 k2 k3 k4  0  0] X
//          -[ 0  0  0  0 k5 k6] X
//
// about the rest equilibrium with length l0. Linearization splits into a
// cart/swing block A1 (4x4) and a length block A2 (2x2); A1 is checked with
// the Routh array of its characteristic polynomial, A2 by coefficient signs.
// Eigenvalues of both blocks are computed alongside as an independent check.

#pragma once

#include <array>
#include <complex>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "crane/model.hpp"

namespace crane::stability {

/// Feedback gains in SI units: k1 N/m, k2 N s/m, k3 N/rad, k4 N s/rad,
/// k5 N/m, k6 N s/m.
struct GainSet {
  double k1 = 0.0;
  double k2 = 0.0;
  double k3 = 0.0;
  double k4 = 0.0;
  double k5 = 0.0;
  double k6 = 0.0;

  bool is_zero() const {
    return k1 == 0 && k2 == 0 && k3 == 0 && k4 == 0 && k5 == 0 && k6 == 0;
  }
  bool is_finite() const;
};

/// Gains tuned on the hardware (0.8 N/mm cart, 0.2 N/mm length, -0.05 N/rad).
GainSet experiment_gains();
/// Gains used for the model-error robustness study (0.01 N/mm family).
GainSet robustness_gains();

enum class Condition {
  kK1 = 0,             // k1
  kCubicCoeff = 1,     // k2 l0 - k4
  kRouthC1 = 2,        // c1
  kRouthC2 = 3,        // c2 / g, evaluated as the printed quotient
  kK5 = 4,             // k5
  kK6 = 5              // k6
};
inline constexpr int kConditionCount = 6;

struct StabilityReport {
  bool satisfied = false;
  std::array<double, kConditionCount> condition_values{};
  double eigen_max_real = 0.0;  // over both blocks
  double a1_max_real = 0.0;
  double a2_max_real = 0.0;

  /// Smallest |condition value|; distance of the sample to the boundary.
  double boundary_distance() const;
};

/// Coefficients of  M l0 s^4 + (k2 l0 - k4) s^3 + (k1 l0 - k3 + (M+m) g) s^2
///                  + k2 g s + k1 g, highest power first.
std::array<double, 5> characteristic_a1(const GainSet& gains,
                                        const PhysParams& params, double l0);

Eigen::Matrix4d closed_loop_a1(const GainSet& gains, const PhysParams& params,
                               double l0);
Eigen::Matrix2d closed_loop_a2(const GainSet& gains, const PhysParams& params);

/// Largest real part among the eigenvalues of a square matrix.
double max_real_eigenvalue(const Eigen::MatrixXd& a);

/// `margin` raises every threshold from 0 to margin; boundary samples fail.
StabilityReport check_gains(const GainSet& gains, const PhysParams& params,
                            double l0, double margin = 0.0);

/// Cart/swing gains placing the A1 poles at the roots of the monic
/// polynomial  s^4 + c[0] s^3 + c[1] s^2 + c[2] s + c[3].
struct CartSwingGains {
  double k1 = 0.0;
  double k2 = 0.0;
  double k3 = 0.0;
  double k4 = 0.0;

  GainSet with_length_gains(double k5, double k6) const {
    return {k1, k2, k3, k4, k5, k6};
  }
};

CartSwingGains place_poles_a1(const std::array<double, 4>& monic_coeffs,
                              const PhysParams& params, double l0);

/// Monic coefficients (c3, c2, c1, c0) of prod (s - root). Roots must come in
/// conjugate pairs; only their real-coefficient product is returned.
std::array<double, 4> monic_from_roots(
    const std::array<std::complex<double>, 4>& roots);

/// Gains that passed check_gains for a given rest length. The only way to
/// obtain one is `validate`, which throws CraneError(kGainReject) otherwise.
class ValidatedGains {
 public:
  static ValidatedGains validate(const GainSet& gains, const PhysParams& params,
                                 double l0);
  const GainSet& gains() const { return gains_; }
  double l0() const { return l0_; }

 private:
  ValidatedGains(GainSet g, double l0) : gains_(g), l0_(l0) {}
  GainSet gains_;
  double l0_;
};

/// Batch kernels over many gain sets. The serial version is the reference;
/// the OpenMP version must produce identical reports.
std::vector<StabilityReport> check_gains_batch_serial(
    std::span<const GainSet> gains, const PhysParams& params, double l0);
std::vector<StabilityReport> check_gains_batch_parallel(
    std::span<const GainSet> gains, const PhysParams& params, double l0);

}  // namespace crane::stability
