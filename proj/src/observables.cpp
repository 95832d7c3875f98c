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

#include "looploc/observables.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "looploc/geometry.hpp"

namespace looploc {

namespace {

constexpr std::size_t kExtremaGrid = 4096;

void require_positive_drive(double x) {
  if (!(x > 0.0) || !std::isfinite(x)) {
    throw std::invalid_argument("drive strength x must be positive");
  }
}

// Locate a sign change of the slope on [a, b] by bisection.
double refine_extremum(double x, double a, double b) {
  double sa = slope(x, a);
  for (int it = 0; it < 200 && b - a > 1e-13; ++it) {
    const double m = 0.5 * (a + b);
    const double sm = slope(x, m);
    if ((sm > 0.0) == (sa > 0.0)) {
      a = m;
      sa = sm;
    } else {
      b = m;
    }
  }
  return 0.5 * (a + b);
}

}  // namespace

double slope(double x, double phi) {
  require_positive_drive(x);
  const double h = kSlopeStep;
  return (ratio_analytic(x, phi + h) - ratio_analytic(x, phi - h)) / (2.0 * h);
}

double ratio_maximum(double x) {
  require_positive_drive(x);
  double best = 0.0;
  for (double e : ratio_extrema(x)) best = std::max(best, ratio_analytic(x, e));
  return best;
}

std::vector<double> ratio_extrema(double x) {
  require_positive_drive(x);
  constexpr double pi = std::numbers::pi;
  std::vector<double> out{0.0, pi};
  // Scan the open half-period (0, pi); evenness mirrors the rest.
  const double margin = 1e-4;
  const double step = (pi - 2.0 * margin) / static_cast<double>(kExtremaGrid);
  double prev_phi = margin;
  double prev = slope(x, prev_phi);
  for (std::size_t k = 1; k <= kExtremaGrid; ++k) {
    const double phi = margin + step * static_cast<double>(k);
    const double s = slope(x, phi);
    if (prev != 0.0 && s != 0.0 && (s > 0.0) != (prev > 0.0)) {
      const double e = refine_extremum(x, prev_phi, phi);
      out.push_back(e);
      out.push_back(kTwoPi - e);
    }
    prev_phi = phi;
    prev = s;
  }
  std::sort(out.begin(), out.end());
  return out;
}

DriveQuality drive_quality(double x, std::size_t grid_points, double exclusion) {
  require_positive_drive(x);
  if (grid_points < 256) throw std::invalid_argument("drive_quality needs at least 256 grid points");
  constexpr double pi = std::numbers::pi;
  if (!(exclusion > 0.0) || exclusion >= pi / 2.0) {
    throw std::invalid_argument("exclusion half-width must lie in (0, pi/2)");
  }
  const double forced_zeros[] = {0.0, pi, kTwoPi};
  const auto excluded = [&](double phi) {
    return std::any_of(std::begin(forced_zeros), std::end(forced_zeros),
                       [&](double z) { return std::abs(phi - z) < exclusion; });
  };

  DriveQuality q{std::numeric_limits<double>::infinity(), 0.0};
  const auto visit = [&](double phi) {
    const double s = std::abs(slope(x, phi));
    q.min_abs_slope = std::min(q.min_abs_slope, s);
    q.max_abs_slope = std::max(q.max_abs_slope, s);
  };
  for (std::size_t k = 0; k < grid_points; ++k) {
    const double phi = kTwoPi * (static_cast<double>(k) / static_cast<double>(grid_points));
    if (!excluded(phi)) visit(phi);
  }
  for (double edge : {exclusion, pi - exclusion, pi + exclusion, kTwoPi - exclusion}) visit(edge);
  return q;
}

RatioCurve ratio_curve(double x, std::size_t points) {
  require_positive_drive(x);
  if (points < 2) throw std::invalid_argument("ratio curve needs at least 2 points");
  RatioCurve curve;
  curve.phi_grid.reserve(points);
  curve.values.reserve(points);
  curve.slopes.reserve(points);
  const double last = static_cast<double>(points - 1);
  for (std::size_t k = 0; k < points; ++k) {
    const double phi = kTwoPi * (static_cast<double>(k) / last);
    curve.phi_grid.push_back(phi);
    curve.values.push_back(ratio_analytic(x, phi));
    curve.slopes.push_back(slope(x, phi));
  }
  return curve;
}

}  // namespace looploc
