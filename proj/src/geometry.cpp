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

#include "looploc/geometry.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

#include "looploc/errors.hpp"

namespace looploc {

LoopLayout::LoopLayout(std::vector<FieldGeometry> transitions, double relative_phase,
                       double wavelength)
    : transitions_(std::move(transitions)), wavelength_(wavelength) {
  if (transitions_.size() < 4 || transitions_.size() % 2 != 0) {
    throw std::invalid_argument("loop layout needs an even number (>= 4) of transitions, got " +
                                std::to_string(transitions_.size()));
  }
  for (std::size_t i = 0; i < transitions_.size(); ++i) {
    const auto& t = transitions_[i];
    if (!(t.wavenumber > 0.0) || !std::isfinite(t.wavenumber)) {
      throw std::invalid_argument("transition " + std::to_string(i + 1) +
                                  ": wavenumber must be positive");
    }
    if (t.propagation_sign != 1 && t.propagation_sign != -1) {
      throw std::invalid_argument("transition " + std::to_string(i + 1) +
                                  ": propagation sign must be -1 or +1");
    }
    if (!std::isfinite(t.detuning)) {
      throw std::invalid_argument("transition " + std::to_string(i + 1) +
                                  ": detuning must be finite");
    }
  }
  if (!std::isfinite(relative_phase)) {
    throw std::invalid_argument("relative phase must be finite");
  }
  if (!(wavelength > 0.0) || !std::isfinite(wavelength)) {
    throw std::invalid_argument("wavelength must be positive");
  }
  relative_phase_ = reduce_phase(relative_phase);
}

LoopLayout LoopLayout::with_relative_phase(double phi0) const {
  return LoopLayout(transitions_, phi0, wavelength_);
}

double reduce_phase(double phi) {
  double r = phi - kTwoPi * std::floor(phi / kTwoPi);
  // floor can leave r == 2*pi through rounding when phi is a tiny negative.
  if (r >= kTwoPi) r -= kTwoPi;
  if (r < 0.0) r = 0.0;
  return r;
}

double multiphoton_detuning(const LoopLayout& layout) {
  double sum = 0.0;
  for (const auto& t : layout.transitions()) sum += t.detuning;
  return sum;
}

double wavevector_mismatch(const LoopLayout& layout) {
  const auto& legs = layout.transitions();
  const std::size_t n = layout.loop_order();
  double k = 0.0;
  for (std::size_t i = 0; i < legs.size(); ++i) {
    const double term = legs[i].propagation_sign * legs[i].wavenumber;
    k += (i < n) ? term : -term;
  }
  return k;
}

double magnification(const LoopLayout& layout) {
  // Wavenumbers are already in units of 2*pi/lambda.
  return wavevector_mismatch(layout);
}

double loop_phase(const LoopLayout& layout, double z, bool reduced) {
  const double delta = multiphoton_detuning(layout);
  if (std::abs(delta) > kStaticPhaseTolerance) {
    throw NonStaticPhase("multiphoton detuning " + std::to_string(delta) +
                         " is nonzero; the loop phase is time dependent");
  }
  const double phi = kTwoPi * magnification(layout) * z + layout.relative_phase();
  return reduced ? reduce_phase(phi) : phi;
}

LoopLayout diamond_layout(int eps34, int eps41, double phi0, double k21, double k32,
                          double k34, double k41) {
  return LoopLayout({{k21, 1, 0.0},
                     {k32, 1, 0.0},
                     {k34, eps34, 0.0},
                     {k41, eps41, 0.0}},
                    phi0);
}

LoopLayout diamond_layout_for_magnification(double xi, double phi0) {
  if (xi == 0.0) return diamond_layout(+1, +1, phi0);
  if (xi == 2.0) return diamond_layout(-1, +1, phi0);
  if (xi == 4.0) return diamond_layout(-1, -1, phi0);
  if (xi > 0.0 && xi < 2.0) {
    const double k = 1.0 - xi / 2.0;
    return diamond_layout(+1, +1, phi0, 1.0, 1.0, k, k);
  }
  if (xi > 2.0) {
    const double k = xi / 2.0 - 1.0;
    return diamond_layout(-1, -1, phi0, 1.0, 1.0, k, k);
  }
  if (xi > -2.0) {
    const double k = 1.0 + xi / 2.0;
    return diamond_layout(+1, +1, phi0, k, k, 1.0, 1.0);
  }
  throw std::invalid_argument("diamond layout cannot realize magnification " +
                              std::to_string(xi) + " (need xi > -2)");
}

std::vector<MagnificationWitness> admissible_magnifications(std::size_t loop_order) {
  if (loop_order < 2) {
    throw std::invalid_argument("loop order N must be at least 2");
  }
  std::vector<MagnificationWitness> out;
  out.reserve(loop_order + 1);
  // Ascending legs along +z; flipping j descending legs adds 2 per flip.
  for (std::size_t flips = 0; flips <= loop_order; ++flips) {
    std::vector<int> signs(2 * loop_order, 1);
    for (std::size_t j = 0; j < flips; ++j) signs[loop_order + j] = -1;
    out.push_back({2.0 * static_cast<double>(flips), std::move(signs)});
  }
  return out;
}

}  // namespace looploc
