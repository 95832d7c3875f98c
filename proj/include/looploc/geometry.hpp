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

// Field geometry of a closed interaction loop and the algebra of the loop
// phase. Units: positions in wavelengths, wavenumbers in 2*pi/lambda,
// detunings in units of the decay rate.

#include <cstddef>
#include <numbers>
#include <vector>

namespace looploc {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Tolerance on the multiphoton detuning below which the loop phase is static.
inline constexpr double kStaticPhaseTolerance = 1e-12;

struct FieldGeometry {
  double wavenumber = 1.0;
  int propagation_sign = 1;
  double detuning = 0.0;
};

/// Driving-field layout around a loop of 2N states.
///
/// Transition i couples |i> and |i+1>, with |2N+1> identified with |1>.
/// Construction validates the invariants and reduces the relative phase
/// to [0, 2*pi).
class LoopLayout {
 public:
  LoopLayout(std::vector<FieldGeometry> transitions, double relative_phase,
             double wavelength = 1.0);

  const std::vector<FieldGeometry>& transitions() const noexcept { return transitions_; }
  double relative_phase() const noexcept { return relative_phase_; }
  double wavelength() const noexcept { return wavelength_; }
  std::size_t loop_order() const noexcept { return transitions_.size() / 2; }

  /// Copy with a different relative phase.
  LoopLayout with_relative_phase(double phi0) const;

 private:
  std::vector<FieldGeometry> transitions_;
  double relative_phase_;
  double wavelength_;
};

/// Reduce an angle to the representative in [0, 2*pi).
double reduce_phase(double phi);

double multiphoton_detuning(const LoopLayout& layout);

/// Signed z-projection of the loop wave-vector sum, in units of 2*pi/lambda.
///
/// Legs 1..N enter with +eps*k, legs N+1..2N with -eps*k. For the diamond
/// this gives k21 + k32 - eps34*k34 - eps41*k41.
double wavevector_mismatch(const LoopLayout& layout);

/// Number of 2*pi windings of the loop phase per wavelength of displacement.
double magnification(const LoopLayout& layout);

/// Loop phase 2*pi*xi*z + phi0 at position z (in wavelengths).
///
/// Throws NonStaticPhase when the multiphoton detuning is nonzero.
double loop_phase(const LoopLayout& layout, double z, bool reduced = false);

/// Resonant diamond layout (N = 2); legs 1 and 2 propagate along +z.
LoopLayout diamond_layout(int eps34, int eps41, double phi0 = 0.0,
                          double k21 = 1.0, double k32 = 1.0, double k34 = 1.0,
                          double k41 = 1.0);

/// Diamond layout realizing an arbitrary real magnification.
///
/// xi in {0, 2, 4} uses equal wavenumbers and propagation signs only.
/// Other values adjust the wavenumbers of the two descending legs (or the
/// ascending legs for negative xi). Requires xi > -2.
LoopLayout diamond_layout_for_magnification(double xi, double phi0 = 0.0);

struct MagnificationWitness {
  double xi;
  std::vector<int> signs;  // one propagation sign per leg
};

/// Magnifications {0, 2, ..., 2N} reachable with equal wavenumbers, each
/// with one sign assignment that realizes it.
std::vector<MagnificationWitness> admissible_magnifications(std::size_t loop_order);

}  // namespace looploc
