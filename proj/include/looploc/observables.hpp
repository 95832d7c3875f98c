// Copyright 2026 The looploc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Fluorescence intensity ratio R = I(3->2) / I(2->1) of the diamond scheme.

#include <cmath>
#include <cstddef>
#include <vector>

#include "looploc/dynamics.hpp"
#include "looploc/errors.hpp"

namespace looploc {

/// Populations of |2> below this make the ratio undefined.
inline constexpr double kMinDenominatorPopulation = 1e-14;

/// Ratio from a density matrix: (2*gamma32*rho33) / (2*gamma21*rho22).
template <typename Scalar>
Scalar ratio_numeric(const DensityMatrix<Scalar>& rho, const DecayModel<Scalar>& decay) {
  const auto p = populations(rho);
  if (!(p[1] > Scalar(kMinDenominatorPopulation))) {
    throw VanishingDenominator("population of |2> is below threshold; ratio undefined");
  }
  return (decay.gamma32() * p[2]) / (decay.gamma21() * p[1]);
}

/// Closed-form steady-state ratio for equal decay rates and equal Rabi
/// frequencies x*gamma:
///
///   N = 2x^2 cos^2(phi/2) [-(3+2x^2)^2 + 4x^4 cos(phi)]
///   D = -18 - 51x^2 - 28x^4 - 2x^6 + x^2(9+4x^2) cos(phi) + 2x^6 cos(2phi)
///
/// cos^2(phi/2) is evaluated as (1 + cos(phi))/2 so that R(pi) is exactly 0.
template <typename Scalar>
Scalar ratio_analytic(Scalar x, Scalar phi) {
  using std::cos;
  const Scalar x2 = x * x;
  const Scalar x4 = x2 * x2;
  const Scalar x6 = x4 * x2;
  const Scalar c1 = cos(phi);
  const Scalar c2 = cos(Scalar(2) * phi);
  const Scalar half_cos_sq = (Scalar(1) + c1) / Scalar(2);
  const Scalar a = Scalar(3) + Scalar(2) * x2;
  const Scalar numerator = Scalar(2) * x2 * half_cos_sq * (-(a * a) + Scalar(4) * x4 * c1);
  const Scalar denominator = Scalar(-18) - Scalar(51) * x2 - Scalar(28) * x4 - Scalar(2) * x6 +
                             x2 * (Scalar(9) + Scalar(4) * x2) * c1 + Scalar(2) * x6 * c2;
  return numerator / denominator;
}

/// Finite-difference step used by `slope`.
inline constexpr double kSlopeStep = 1e-6;

/// dR/dphi of the closed form by central difference.
double slope(double x, double phi);

/// Value of the closed form at phi = 0, its global maximum.
double ratio_maximum(double x);

/// Phases in [0, 2*pi) where the closed form has a local extremum, sorted.
/// Always contains 0 and pi (forced by evenness).
std::vector<double> ratio_extrema(double x);

struct DriveQuality {
  double min_abs_slope;
  double max_abs_slope;

  /// Geometric compromise between the two extrema; larger is better.
  double score() const { return min_abs_slope * max_abs_slope; }
};

/// Default half-width (rad) excluded around the forced zeros of dR/dphi.
inline constexpr double kDefaultSlopeExclusion = 0.2;

/// Extrema of |dR/dphi| over [0, 2*pi) on a uniform grid, excluding a
/// window of +-`exclusion` rad around 0, pi and 2*pi. The window edges are
/// always sampled, so the result does not depend on grid alignment.
DriveQuality drive_quality(double x, std::size_t grid_points,
                           double exclusion = kDefaultSlopeExclusion);

struct RatioCurve {
  std::vector<double> phi_grid;
  std::vector<double> values;
  std::vector<double> slopes;
};

/// Uniform sampling of R and dR/dphi over [0, 2*pi], endpoints included.
RatioCurve ratio_curve(double x, std::size_t points);

}  // namespace looploc
