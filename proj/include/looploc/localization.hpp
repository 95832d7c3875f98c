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

// Inversion of measured fluorescence ratios into candidate positions,
// error-band propagation, relative-phase optimization and the coarse-to-fine
// magnification protocol.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "looploc/geometry.hpp"

namespace looploc {

struct Measurement {
  double ratio = 0.0;
  double relative_error = 0.0;

  Measurement() = default;
  Measurement(double ratio_, double relative_error_);
};

/// Half-open position window [lo, hi) in wavelengths.
struct Window {
  double lo = 0.0;
  double hi = 1.0;

  bool contains(double z) const { return z >= lo && z < hi; }
  double length() const { return hi - lo; }
};

enum IntervalFlag : std::uint32_t {
  kNoFlags = 0,
  kBandEscapesBranch = 1u << 0,  // band crosses an extremum; widened to the segment end
  kOutsidePrior = 1u << 1,       // selected without containment in the prior interval
  kClippedToWindow = 1u << 2,    // interval truncated to the query window
};

struct PositionInterval {
  double z_lo = 0.0;
  double z_hat = 0.0;
  double z_hi = 0.0;
  int branch = 0;  // winding index m
  double phi_solution = 0.0;
  std::uint32_t flags = kNoFlags;

  /// (z_hi - z_lo) / |z_hat|.
  double relative_uncertainty() const;
  double width() const { return z_hi - z_lo; }
};

struct CandidateSet {
  std::vector<PositionInterval> candidates;  // ascending z_hat
  LoopLayout layout_snapshot;
  double drive_x;
};

/// All phases in [0, 2*pi) where the closed-form ratio equals `ratio`.
///
/// Sign changes of the residual on a 4096-point grid are refined by
/// bisection to 1e-10 rad; tangent roots at extrema are detected by their
/// residual and returned once. Throws NoSolution when `ratio` lies outside
/// [0, max R] by more than 1e-9.
std::vector<double> invert_ratio(double ratio, double x);

/// Candidate positions in `window` with error intervals from the
/// measurement's relative error band (zero band gives point intervals).
///
/// Throws ZeroMagnification for xi = 0 and NoSolution when the ratio is
/// inconsistent with the curve.
CandidateSet candidates(const Measurement& meas, const LoopLayout& layout, double x,
                        const Window& window);

/// As `candidates`, but requires a strictly positive relative error.
CandidateSet propagate_error(const Measurement& meas, const LoopLayout& layout, double x,
                             const Window& window);

struct NoiseModel {
  double relative_sigma = 0.0;
  std::uint64_t seed = 0;
};

/// Standard normal draw from a seeded mt19937_64 (Box-Muller). Identical
/// across platforms for a given seed.
double seeded_standard_normal(std::uint64_t seed);

/// Synthetic measurement of the closed-form ratio at `z_true`.
///
/// With noise, the ratio is multiplied by (1 + sigma*u), u ~ N(0, 1).
/// The reported relative error is `band` when given, else sigma.
Measurement simulate_measurement(double z_true, const LoopLayout& layout, double x,
                                 const std::optional<NoiseModel>& noise = std::nullopt,
                                 std::optional<double> band = std::nullopt);

/// Relative phase maximizing |dR/dphi| at the operating point of `z_est`.
double optimize_phase(double z_est, const LoopLayout& layout, double x);

/// Candidate whose z_hat lies in [prior.z_lo, prior.z_hi]; nearest to the
/// prior center (flagged kOutsidePrior) when none does. Throws
/// AmbiguousBranch when several lie inside.
PositionInterval select_branch(const CandidateSet& cands, const PositionInterval& prior);

struct ProtocolStage {
  LoopLayout layout;
  double x;
};

struct StageResult {
  double xi;
  double phi0;
  double x;
  Measurement measurement;
  std::size_t candidate_count;
  PositionInterval interval;
};

struct ProtocolResult {
  std::vector<StageResult> stages;
  PositionInterval final_interval;
  double final_relative_uncertainty;
};

/// Produces the measurement seen by protocol stage `index`.
using MeasurementSource =
    std::function<Measurement(std::size_t index, const LoopLayout& layout, double x)>;

/// Coarse-to-fine localization.
///
/// The first stage (0 < xi <= 1) must leave exactly one candidate in
/// `window`; each later stage (strictly larger xi) picks its branch against
/// the previous interval. Throws AmbiguousBranch carrying the stage index.
ProtocolResult coarse_to_fine(const MeasurementSource& source,
                              const std::vector<ProtocolStage>& stages, const Window& window);

}  // namespace looploc
