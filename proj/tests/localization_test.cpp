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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "looploc/errors.hpp"
#include "looploc/localization.hpp"
#include "looploc/observables.hpp"

using namespace looploc;

namespace {

constexpr double kPi = std::numbers::pi;

// Brute-force inversion: local minima of |R - target| on a dense grid.
std::vector<double> brute_force_roots(double target, double x) {
  constexpr int n = 1000000;
  std::vector<double> res(n);
  for (int k = 0; k < n; ++k) res[k] = std::abs(ratio_analytic(x, 2 * kPi * k / n) - target);
  std::vector<double> roots;
  for (int k = 0; k < n; ++k) {
    const double prev = res[(k + n - 1) % n];
    const double next = res[(k + 1) % n];
    if (res[k] <= prev && res[k] < next && res[k] < 1e-3) roots.push_back(2 * kPi * k / n);
  }
  return roots;
}

std::vector<double> z_hats(const CandidateSet& cs) {
  std::vector<double> out;
  for (const auto& c : cs.candidates) out.push_back(c.z_hat);
  return out;
}

const PositionInterval& containing(const CandidateSet& cs, double z) {
  for (const auto& c : cs.candidates) {
    if (c.z_lo <= z && z <= c.z_hi) return c;
  }
  throw std::runtime_error("no candidate interval contains z");
}

Measurement noiseless(double z, const LoopLayout& l, double band = 0.0) {
  return simulate_measurement(z, l, 5.0, std::nullopt, band);
}

}  // namespace

TEST(Measurement, Validates) {
  EXPECT_THROW(Measurement(-0.1, 0.0), std::invalid_argument);
  EXPECT_THROW(Measurement(0.5, 0.5), std::invalid_argument);
  EXPECT_THROW(Measurement(0.5, -0.01), std::invalid_argument);
  EXPECT_NO_THROW(Measurement(0.0, 0.0));
}

TEST(InvertRatio, MatchesBruteForce) {
  for (double target : {0.05, 0.3, 0.812, 0.95}) {
    const auto roots = invert_ratio(target, 5.0);
    const auto oracle = brute_force_roots(target, 5.0);
    ASSERT_EQ(roots.size(), oracle.size()) << target;
    for (std::size_t i = 0; i < roots.size(); ++i) {
      EXPECT_NEAR(roots[i], oracle[i], 1e-5) << target;
      EXPECT_NEAR(ratio_analytic(5.0, roots[i]), target, 1e-9);
    }
  }
}

TEST(InvertRatio, WorkedPoint) {
  const auto roots = invert_ratio(ratio_analytic(5.0, 0.6 * kPi), 5.0);
  ASSERT_EQ(roots.size(), 2u);
  EXPECT_NEAR(roots[0], 0.6 * kPi, 1e-8);
  EXPECT_NEAR(roots[1], 1.4 * kPi, 1e-8);
  const auto approx = invert_ratio(0.812, 5.0);
  ASSERT_EQ(approx.size(), 2u);
  EXPECT_NEAR(approx[0], 0.6 * kPi, 1e-2);
  EXPECT_NEAR(approx[1], 1.4 * kPi, 1e-2);
}

TEST(InvertRatio, TangentRoots) {
  const auto dark = invert_ratio(0.0, 5.0);
  ASSERT_EQ(dark.size(), 1u);
  EXPECT_NEAR(dark[0], kPi, 1e-6);
  const auto top = invert_ratio(25.0 / 26.0, 5.0);
  ASSERT_EQ(top.size(), 1u);
  EXPECT_EQ(top[0], 0.0);
}

TEST(InvertRatio, OutOfRange) {
  EXPECT_THROW(invert_ratio(1.5, 5.0), NoSolution);
  EXPECT_THROW(invert_ratio(-0.1, 5.0), NoSolution);
  EXPECT_THROW(invert_ratio(0.5, 0.0), std::invalid_argument);
}

TEST(Candidates, QuarterWavelengthPattern) {
  const LoopLayout l = diamond_layout(-1, +1);
  const auto cs = candidates(noiseless(0.15, l), l, 5.0, {0.0, 1.0});
  const auto z = z_hats(cs);
  ASSERT_EQ(z.size(), 4u);
  const std::vector<double> expected{0.15, 0.35, 0.65, 0.85};
  for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(z[i], expected[i], 1e-9);
}

TEST(Candidates, DoubledMagnificationDoublesCount) {
  const LoopLayout l = diamond_layout(-1, -1);
  const auto cs = candidates(noiseless(0.15, l), l, 5.0, {0.0, 1.0});
  EXPECT_EQ(cs.candidates.size(), 8u);
  const auto z = z_hats(cs);
  EXPECT_TRUE(std::any_of(z.begin(), z.end(), [](double v) { return std::abs(v - 0.15) < 1e-9; }));
}

TEST(Candidates, PhaseOffsetShiftsPattern) {
  const LoopLayout l = diamond_layout(-1, +1, kPi / 4);
  const auto cs = candidates(Measurement(ratio_analytic(5.0, 0.85 * kPi), 0.0), l, 5.0, {0.0, 1.0});
  const auto z = z_hats(cs);
  ASSERT_EQ(z.size(), 4u);
  const std::vector<double> expected{0.15, 0.225, 0.65, 0.725};
  for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(z[i], expected[i], 1e-9);
}

TEST(Candidates, ZeroMagnification) {
  const LoopLayout l = diamond_layout(+1, +1);
  EXPECT_THROW(candidates(Measurement(0.5, 0.0), l, 5.0, {0.0, 1.0}), ZeroMagnification);
}

TEST(Candidates, InconsistentRatio) {
  const LoopLayout l = diamond_layout(-1, +1);
  EXPECT_THROW(candidates(Measurement(0.99, 0.0), l, 5.0, {0.0, 1.0}), NoSolution);
}

TEST(Candidates, WindowValidation) {
  const LoopLayout l = diamond_layout(-1, +1);
  EXPECT_THROW(candidates(Measurement(0.5, 0.0), l, 5.0, {1.0, 1.0}), std::invalid_argument);
  EXPECT_THROW(candidates(Measurement(0.5, 0.0), l, 5.0, {0.0, 11.0}), std::invalid_argument);
}

TEST(Candidates, ZeroBandGivesPointIntervals) {
  const LoopLayout l = diamond_layout(-1, +1);
  for (const auto& c : candidates(noiseless(0.15, l), l, 5.0, {0.0, 1.0}).candidates) {
    EXPECT_EQ(c.z_lo, c.z_hat);
    EXPECT_EQ(c.z_hi, c.z_hat);
  }
}

TEST(Candidates, TangentBandStraddlesExtremum) {
  // z = 0.5 puts xi = 2 at the maximum; the band opens on both sides.
  const LoopLayout l = diamond_layout(-1, +1);
  const auto cs = candidates(Measurement(ratio_maximum(5.0), 0.05), l, 5.0, {0.0, 1.0});
  // Phi = 0 is reached at z = 0 (clipped by the window) and at z = 0.5.
  ASSERT_EQ(cs.candidates.size(), 2u);
  EXPECT_TRUE(cs.candidates.front().flags & kClippedToWindow);
  const auto& c = cs.candidates.back();
  EXPECT_NEAR(c.z_hat, 0.5, 1e-12);
  EXPECT_LT(c.z_lo, 0.5);
  EXPECT_GT(c.z_hi, 0.5);
  EXPECT_NEAR(0.5 - c.z_lo, c.z_hi - 0.5, 1e-6);
  EXPECT_TRUE(c.flags & kBandEscapesBranch);
}

TEST(Candidates, BandEscapingBranchIsFlagged) {
  const LoopLayout l = diamond_layout(-1, +1);
  const auto cs = candidates(Measurement(0.95, 0.05), l, 5.0, {0.0, 1.0});
  ASSERT_FALSE(cs.candidates.empty());
  for (const auto& c : cs.candidates) EXPECT_TRUE(c.flags & kBandEscapesBranch);
}

TEST(Candidates, ClippedAtWindowEdge) {
  const LoopLayout l = diamond_layout(-1, +1);
  const auto cs = candidates(noiseless(0.101, l, 0.05), l, 5.0, {0.1, 1.1});
  const auto& c = containing(cs, 0.101);
  EXPECT_EQ(c.z_lo, 0.1);
  EXPECT_TRUE(c.flags & kClippedToWindow);
}

TEST(PropagateError, RequiresPositiveBand) {
  const LoopLayout l = diamond_layout(-1, +1);
  EXPECT_THROW(propagate_error(Measurement(0.5, 0.0), l, 5.0, {0.0, 1.0}), std::invalid_argument);
}

TEST(PropagateError, UncertaintyTriple) {
  const auto rel = [](const LoopLayout& l) {
    return containing(propagate_error(noiseless(0.15, l, 0.05), l, 5.0, {0.0, 1.0}), 0.15)
        .relative_uncertainty();
  };
  const double u2 = rel(diamond_layout(-1, +1));
  const double u4 = rel(diamond_layout(-1, -1));
  const double u2s = rel(diamond_layout(-1, +1, kPi / 4));
  EXPECT_GT(u2, 0.20 / 1.5);
  EXPECT_LT(u2, 0.20 * 1.5);
  EXPECT_GT(u4, 0.02 / 1.5);
  EXPECT_LT(u4, 0.02 * 1.5);
  EXPECT_GT(u2s, 0.025 / 1.5);
  EXPECT_LT(u2s, 0.025 * 1.5);
  EXPECT_GT(u2 / u4, 5.0);
  EXPECT_LT(u2 / u4, 20.0);
}

TEST(PropagateError, ShrinksWithBand) {
  const LoopLayout l = diamond_layout(-1, +1, kPi / 4);
  double prev = 1e9;
  for (double band : {0.1, 0.05, 0.02, 0.01, 0.001}) {
    const double w = containing(propagate_error(noiseless(0.15, l, band), l, 5.0, {0.0, 1.0}), 0.15)
                         .width();
    EXPECT_LT(w, prev);
    prev = w;
  }
}

TEST(PropagateError, WidthScalesInverselyWithMagnification) {
  const double band = 0.01;
  double w_ref = 0.0;
  for (double xi : {1.0, 2.0, 3.0, 4.0}) {
    // Pick z so that every layout sits at the same operating phase 0.75 pi.
    const LoopLayout l = diamond_layout_for_magnification(xi);
    const double z = 0.375 / xi;
    const auto cs = propagate_error(noiseless(z, l, band), l, 5.0, {0.0, 1.0});
    const double w = containing(cs, z).width();
    if (xi == 1.0) w_ref = w;
    EXPECT_NEAR(w * xi, w_ref, 1e-9 * w_ref) << xi;
  }
}

TEST(SimulateMeasurement, NoiselessValues) {
  EXPECT_NEAR(noiseless(0.15, diamond_layout(-1, +1)).ratio, 0.81, 0.01);
  EXPECT_NEAR(noiseless(0.15, diamond_layout(-1, +1, kPi / 4)).ratio, 0.40, 0.05);
  EXPECT_EQ(noiseless(0.15, diamond_layout(-1, +1)).relative_error, 0.0);
  EXPECT_EQ(noiseless(0.15, diamond_layout(-1, +1), 0.05).relative_error, 0.05);
}

TEST(SimulateMeasurement, SeededNoiseIsReproducible) {
  const LoopLayout l = diamond_layout(-1, +1);
  const NoiseModel noise{0.01, 42};
  const Measurement a = simulate_measurement(0.15, l, 5.0, noise);
  const Measurement b = simulate_measurement(0.15, l, 5.0, noise);
  EXPECT_EQ(a.ratio, b.ratio);
  EXPECT_EQ(a.relative_error, 0.01);
  const Measurement c = simulate_measurement(0.15, l, 5.0, NoiseModel{0.01, 43});
  EXPECT_NE(a.ratio, c.ratio);
}

TEST(SimulateMeasurement, NormalDrawsHaveUnitMoments) {
  double sum = 0.0;
  double sq = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const double u = seeded_standard_normal(static_cast<std::uint64_t>(i));
    sum += u;
    sq += u * u;
  }
  EXPECT_NEAR(sum / n, 0.0, 0.03);
  EXPECT_NEAR(sq / n, 1.0, 0.05);
}

TEST(OptimizePhase, BeatsFixedChoices) {
  const LoopLayout l = diamond_layout(-1, +1);
  const double star = optimize_phase(0.15, l, 5.0);
  const double base = kTwoPi * 2.0 * 0.15;
  const double best = std::abs(slope(5.0, base + star));
  EXPECT_GE(best, std::abs(slope(5.0, base + kPi / 4)));
  EXPECT_GE(best, std::abs(slope(5.0, base)));
  EXPECT_GE(star, 0.0);
  EXPECT_LT(star, kTwoPi);
  // Dense oracle scan of the objective.
  double oracle = 0.0;
  for (int k = 0; k < 100000; ++k) {
    oracle = std::max(oracle, std::abs(slope(5.0, kTwoPi * k / 100000.0)));
  }
  EXPECT_NEAR(best, oracle, 1e-6);
}

TEST(OptimizePhase, PeriodicInEstimate) {
  const LoopLayout l = diamond_layout(-1, +1);
  const double a = optimize_phase(0.15, l, 5.0);
  const double b = optimize_phase(0.15 + 0.5, l, 5.0);
  EXPECT_NEAR(std::abs(slope(5.0, kTwoPi * 2 * 0.15 + a)),
              std::abs(slope(5.0, kTwoPi * 2 * 0.65 + b)), 1e-9);
  EXPECT_NEAR(reduce_phase(a - b + 1e-7), 1e-7, 1e-6);
}

TEST(OptimizePhase, ZeroMagnification) {
  EXPECT_THROW(optimize_phase(0.15, diamond_layout(+1, +1), 5.0), ZeroMagnification);
}

TEST(SelectBranch, PicksContainedCandidate) {
  const LoopLayout l = diamond_layout(-1, +1);
  const auto cs = candidates(noiseless(0.15, l), l, 5.0, {0.0, 1.0});
  PositionInterval prior;
  prior.z_lo = 0.1;
  prior.z_hat = 0.16;
  prior.z_hi = 0.2;
  const auto c = select_branch(cs, prior);
  EXPECT_NEAR(c.z_hat, 0.15, 1e-9);
  EXPECT_EQ(c.flags & kOutsidePrior, 0u);
}

TEST(SelectBranch, FallsBackToNearest) {
  const LoopLayout l = diamond_layout(-1, +1);
  const auto cs = candidates(noiseless(0.15, l), l, 5.0, {0.0, 1.0});
  PositionInterval prior;
  prior.z_lo = 0.5;
  prior.z_hat = 0.55;
  prior.z_hi = 0.6;
  const auto c = select_branch(cs, prior);
  EXPECT_NEAR(c.z_hat, 0.65, 1e-9);
  EXPECT_TRUE(c.flags & kOutsidePrior);
}

TEST(SelectBranch, AmbiguousWhenPriorCoversSeveral) {
  const LoopLayout l = diamond_layout(-1, +1);
  const auto cs = candidates(noiseless(0.15, l), l, 5.0, {0.0, 1.0});
  PositionInterval prior;
  prior.z_lo = 0.1;
  prior.z_hat = 0.25;
  prior.z_hi = 0.4;
  EXPECT_THROW(select_branch(cs, prior), AmbiguousBranch);
}

namespace {

std::vector<ProtocolStage> standard_stages() {
  return {{diamond_layout_for_magnification(0.25, kPi / 2), 5.0},
          {diamond_layout_for_magnification(2.0), 5.0},
          {diamond_layout_for_magnification(4.0), 5.0}};
}

MeasurementSource banded_source(double z_true, double band) {
  return [=](std::size_t, const LoopLayout& l, double x) {
    return simulate_measurement(z_true, l, x, std::nullopt, band);
  };
}

}  // namespace

TEST(CoarseToFine, ResolvesPosition) {
  const auto r = coarse_to_fine(banded_source(0.15, 0.05), standard_stages(), {0.0, 1.0});
  ASSERT_EQ(r.stages.size(), 3u);
  EXPECT_EQ(r.stages[0].candidate_count, 1u);
  EXPECT_LE(r.final_relative_uncertainty, 0.04);
  EXPECT_LE(r.final_interval.z_lo, 0.15);
  EXPECT_GE(r.final_interval.z_hi, 0.15);
  for (std::size_t i = 1; i < r.stages.size(); ++i) {
    EXPECT_LT(r.stages[i].interval.width(), r.stages[i - 1].interval.width());
  }
}

TEST(CoarseToFine, NoiselessRecoversTruth) {
  const auto r = coarse_to_fine(banded_source(0.15, 0.0), standard_stages(), {0.0, 1.0});
  EXPECT_NEAR(r.final_interval.z_hat, 0.15, 1e-6);
}

TEST(CoarseToFine, RandomPositionsNoiseless) {
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> zd(0.02, 0.98);
  for (int i = 0; i < 50; ++i) {
    const double z = zd(gen);
    const auto r = coarse_to_fine(banded_source(z, 0.0), standard_stages(), {0.0, 1.0});
    EXPECT_NEAR(r.final_interval.z_hat, z, 1e-6) << z;
  }
}

TEST(CoarseToFine, SkippingMiddleStageIsAmbiguous) {
  std::vector<ProtocolStage> stages{{diamond_layout_for_magnification(0.25, kPi / 2), 5.0},
                                    {diamond_layout_for_magnification(4.0), 5.0}};
  try {
    coarse_to_fine(banded_source(0.15, 0.05), stages, {0.0, 1.0});
    FAIL() << "expected AmbiguousBranch";
  } catch (const AmbiguousBranch& e) {
    EXPECT_EQ(e.stage(), 1u);
  }
}

TEST(CoarseToFine, NarrowBandAllowsSkippingMiddleStage) {
  std::vector<ProtocolStage> stages{{diamond_layout_for_magnification(0.25, kPi / 2), 5.0},
                                    {diamond_layout_for_magnification(4.0), 5.0}};
  const auto r = coarse_to_fine(banded_source(0.15, 0.01), stages, {0.0, 1.0});
  EXPECT_LE(r.final_interval.z_lo, 0.15);
  EXPECT_GE(r.final_interval.z_hi, 0.15);
}

TEST(CoarseToFine, ValidatesStageOrder) {
  std::vector<ProtocolStage> bad_first{{diamond_layout_for_magnification(2.0), 5.0}};
  EXPECT_THROW(coarse_to_fine(banded_source(0.15, 0.05), bad_first, {0.0, 1.0}),
               std::invalid_argument);
  std::vector<ProtocolStage> not_increasing{{diamond_layout_for_magnification(0.25), 5.0},
                                            {diamond_layout_for_magnification(2.0), 5.0},
                                            {diamond_layout_for_magnification(2.0), 5.0}};
  EXPECT_THROW(coarse_to_fine(banded_source(0.15, 0.05), not_increasing, {0.0, 1.0}),
               std::invalid_argument);
}

TEST(RoundTrip, RandomNoiselessSamples) {
  std::mt19937_64 gen(2026);
  std::uniform_real_distribution<double> zd(0.0, 1.0);
  std::uniform_real_distribution<double> pd(0.0, kTwoPi);
  std::bernoulli_distribution pick(0.5);
  for (int i = 0; i < 100; ++i) {
    const double xi = pick(gen) ? 2.0 : 4.0;
    const LoopLayout l = diamond_layout_for_magnification(xi, pd(gen));
    const double z = zd(gen);
    const auto cs = candidates(noiseless(z, l), l, 5.0, {0.0, 1.0});
    double nearest = 1e9;
    for (double c : z_hats(cs)) nearest = std::min(nearest, std::abs(c - z));
    EXPECT_LE(nearest, 1e-6);
    const double r = ratio_analytic(5.0, loop_phase(l, z));
    if (r > 1e-3 && r < ratio_maximum(5.0) - 1e-3) EXPECT_EQ(cs.candidates.size(), 2 * xi);
  }
}

TEST(Symmetry, PhaseOffsetCovariance) {
  // Shifting phi0 by d moves every candidate by -d / (2 pi xi), modulo the window.
  std::mt19937_64 gen(17);
  std::uniform_real_distribution<double> rd(0.02, 0.95);
  std::uniform_real_distribution<double> pd(0.0, kTwoPi);
  for (int i = 0; i < 1000; ++i) {
    const double xi = (i % 2) ? 2.0 : 4.0;
    const double phi0 = pd(gen);
    const double d = pd(gen);
    const Measurement meas(rd(gen), 0.0);
    const Window w{0.0, 1.0};
    const auto a = z_hats(candidates(meas, diamond_layout_for_magnification(xi, phi0), 5.0, w));
    const auto b = z_hats(candidates(meas, diamond_layout_for_magnification(xi, phi0 + d), 5.0, w));
    ASSERT_EQ(a.size(), b.size());
    const double period = 1.0 / xi;
    for (double za : a) {
      const double target = za - d / (kTwoPi * xi);
      double best = 1e9;
      for (double zb : b) {
        const double diff = std::remainder(zb - target, period);
        best = std::min(best, std::abs(diff));
      }
      EXPECT_LE(best, 1e-9);
    }
  }
}
