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

#include "looploc/localization.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>

#include "looploc/errors.hpp"
#include "looploc/observables.hpp"

namespace looploc {

namespace {

constexpr std::size_t kRootGrid = 4096;
constexpr double kRootTolerance = 1e-10;
constexpr double kRatioTolerance = 1e-9;
constexpr double kTangentMatch = 1e-7;
constexpr double kPriorSlack = 1e-9;
constexpr std::size_t kPhaseGrid = 1024;

double circular_distance(double a, double b) {
  const double d = std::abs(reduce_phase(a) - reduce_phase(b));
  return std::min(d, kTwoPi - d);
}

template <typename F>
double bisect(F&& f, double a, double b, double fa) {
  while (b - a > kRootTolerance) {
    const double m = 0.5 * (a + b);
    const double fm = f(m);
    if (fm == 0.0) return m;
    if ((fm > 0.0) == (fa > 0.0)) {
      a = m;
      fa = fm;
    } else {
      b = m;
    }
  }
  return 0.5 * (a + b);
}

// Radius within which sign-change roots belong to a tangent root at e.
double tangent_radius(double x, double e) {
  const double h = 1e-4;
  const double curvature =
      std::abs(ratio_analytic(x, e + h) - 2.0 * ratio_analytic(x, e) + ratio_analytic(x, e - h)) /
      (h * h);
  const double r = 2.0 * std::sqrt(2.0 * kRatioTolerance / std::max(curvature, 1e-12));
  return std::min(r, 1e-2);
}

// Phase p on the monotone segment [a, b] with R(p) = target. Clamps to the
// segment end when the target is out of the segment's range.
double solve_on_segment(double x, double a, double b, double target, bool& escaped) {
  const double ra = ratio_analytic(x, a);
  const double rb = ratio_analytic(x, b);
  const double lo = std::min(ra, rb);
  const double hi = std::max(ra, rb);
  if (target > hi) {
    escaped = true;
    return ra >= rb ? a : b;
  }
  if (target < lo) {
    escaped = true;
    return ra <= rb ? a : b;
  }
  const auto f = [&](double p) { return ratio_analytic(x, p) - target; };
  const double fa = ra - target;
  if (fa == 0.0) return a;
  if (rb - target == 0.0) return b;
  return bisect(f, a, b, fa);
}

struct PhaseInterval {
  double lo;
  double hi;
  bool escaped;
};

// Monotone-segment image of the ratio band around the solution phi_star.
PhaseInterval phase_band(double x, double phi_star, double r_lo, double r_hi,
                         const std::vector<double>& extrema) {
  // Extend the extrema periodically so every phase in [0, 2pi) has a
  // bracketing segment.
  std::vector<double> ext;
  ext.reserve(extrema.size() + 2);
  ext.push_back(extrema.back() - kTwoPi);
  ext.insert(ext.end(), extrema.begin(), extrema.end());
  ext.push_back(extrema.front() + kTwoPi);

  bool escaped = false;
  for (std::size_t i = 1; i + 1 < ext.size(); ++i) {
    if (circular_distance(ext[i], phi_star) < kTangentMatch) {
      // Tangent root: the branch straddles the extremum.
      const double e = ext[i] + std::round((phi_star - ext[i]) / kTwoPi) * kTwoPi;
      const double shift = e - ext[i];
      const double left_a = ext[i - 1] + shift;
      const double right_b = ext[i + 1] + shift;
      const double l1 = solve_on_segment(x, left_a, e, r_lo, escaped);
      const double l2 = solve_on_segment(x, left_a, e, r_hi, escaped);
      const double h1 = solve_on_segment(x, e, right_b, r_lo, escaped);
      const double h2 = solve_on_segment(x, e, right_b, r_hi, escaped);
      return {std::min(l1, l2), std::max(h1, h2), escaped};
    }
  }
  for (std::size_t i = 0; i + 1 < ext.size(); ++i) {
    if (phi_star >= ext[i] && phi_star <= ext[i + 1]) {
      const double p1 = solve_on_segment(x, ext[i], ext[i + 1], r_lo, escaped);
      const double p2 = solve_on_segment(x, ext[i], ext[i + 1], r_hi, escaped);
      return {std::min(p1, p2), std::max(p1, p2), escaped};
    }
  }
  throw std::logic_error("phase outside every monotone segment");
}

void require_drive(double x) {
  if (!(x > 0.0) || !std::isfinite(x)) throw std::invalid_argument("drive strength x must be positive");
}

void require_window(const Window& w) {
  if (!std::isfinite(w.lo) || !std::isfinite(w.hi) || !(w.hi > w.lo)) {
    throw std::invalid_argument("window must satisfy lo < hi");
  }
  if (w.length() > 10.0 + 1e-12) throw std::invalid_argument("window longer than 10 wavelengths");
}

double require_magnification(const LoopLayout& layout) {
  const double xi = magnification(layout);
  if (std::abs(xi) < 1e-12) {
    throw ZeroMagnification("magnification is zero; the loop phase does not depend on position");
  }
  return xi;
}

}  // namespace

Measurement::Measurement(double ratio_, double relative_error_)
    : ratio(ratio_), relative_error(relative_error_) {
  if (!(ratio >= 0.0) || !std::isfinite(ratio)) throw std::invalid_argument("ratio must be >= 0");
  if (!(relative_error >= 0.0 && relative_error < 0.5)) {
    throw std::invalid_argument("relative error must lie in [0, 0.5)");
  }
}

double PositionInterval::relative_uncertainty() const {
  if (z_hat == 0.0) return std::numeric_limits<double>::infinity();
  return (z_hi - z_lo) / std::abs(z_hat);
}

std::vector<double> invert_ratio(double ratio, double x) {
  require_drive(x);
  if (!std::isfinite(ratio)) throw std::invalid_argument("ratio must be finite");
  const double r_max = ratio_maximum(x);
  if (ratio > r_max + kRatioTolerance || ratio < -kRatioTolerance) {
    throw NoSolution("ratio " + std::to_string(ratio) + " lies outside [0, " +
                     std::to_string(r_max) + "]");
  }
  const auto f = [&](double p) { return ratio_analytic(x, p) - ratio; };

  std::vector<double> roots;
  const double step = kTwoPi / static_cast<double>(kRootGrid);
  double prev_phi = 0.0;
  double prev = f(0.0);
  for (std::size_t k = 1; k <= kRootGrid; ++k) {
    const double phi = (k == kRootGrid) ? kTwoPi : step * static_cast<double>(k);
    const double cur = f(phi);
    if (prev == 0.0) {
      roots.push_back(prev_phi);
    } else if (cur != 0.0 && (cur > 0.0) != (prev > 0.0)) {
      roots.push_back(bisect(f, prev_phi, phi, prev));
    }
    prev_phi = phi;
    prev = cur;
  }

  for (double e : ratio_extrema(x)) {
    if (std::abs(f(e)) > kRatioTolerance) continue;
    const double radius = std::max(tangent_radius(x, e), kTangentMatch);
    std::erase_if(roots, [&](double r) { return circular_distance(r, e) <= radius; });
    roots.push_back(e);
  }

  for (double& r : roots) r = reduce_phase(r);
  std::sort(roots.begin(), roots.end());
  std::vector<double> unique;
  for (double r : roots) {
    if (unique.empty() || circular_distance(r, unique.back()) > kTangentMatch) unique.push_back(r);
  }
  if (unique.size() > 1 && circular_distance(unique.front(), unique.back()) <= kTangentMatch) {
    unique.pop_back();
  }
  return unique;
}

CandidateSet candidates(const Measurement& meas, const LoopLayout& layout, double x,
                        const Window& window) {
  require_drive(x);
  require_window(window);
  const double xi = require_magnification(layout);
  loop_phase(layout, 0.0);  // static-phase precondition
  const double phi0 = layout.relative_phase();

  const std::vector<double> phases = invert_ratio(meas.ratio, x);
  const std::vector<double> extrema = ratio_extrema(x);
  const double r_lo = meas.ratio * (1.0 - meas.relative_error);
  const double r_hi = meas.ratio * (1.0 + meas.relative_error);
  const double scale = kTwoPi * xi;

  CandidateSet out{{}, layout, x};
  for (double phi_star : phases) {
    PhaseInterval band{phi_star, phi_star, false};
    if (meas.relative_error > 0.0) band = phase_band(x, phi_star, r_lo, r_hi, extrema);

    const double m_a = (scale * window.lo - phi_star + phi0) / kTwoPi;
    const double m_b = (scale * window.hi - phi_star + phi0) / kTwoPi;
    const long m_first = static_cast<long>(std::floor(std::min(m_a, m_b))) - 1;
    const long m_last = static_cast<long>(std::ceil(std::max(m_a, m_b))) + 1;
    for (long m = m_first; m <= m_last; ++m) {
      const double offset = -phi0 + kTwoPi * static_cast<double>(m);
      const double z_hat = (phi_star + offset) / scale;
      if (!window.contains(z_hat)) continue;
      const double za = (band.lo + offset) / scale;
      const double zb = (band.hi + offset) / scale;
      PositionInterval iv;
      iv.z_hat = z_hat;
      iv.z_lo = std::min({za, zb, z_hat});
      iv.z_hi = std::max({za, zb, z_hat});
      iv.branch = static_cast<int>(m);
      iv.phi_solution = phi_star;
      if (band.escaped) iv.flags |= kBandEscapesBranch;
      if (iv.z_lo < window.lo) {
        iv.z_lo = window.lo;
        iv.flags |= kClippedToWindow;
      }
      if (iv.z_hi > window.hi) {
        iv.z_hi = window.hi;
        iv.flags |= kClippedToWindow;
      }
      out.candidates.push_back(iv);
    }
  }
  std::sort(out.candidates.begin(), out.candidates.end(),
            [](const PositionInterval& a, const PositionInterval& b) { return a.z_hat < b.z_hat; });
  return out;
}

CandidateSet propagate_error(const Measurement& meas, const LoopLayout& layout, double x,
                             const Window& window) {
  if (!(meas.relative_error > 0.0)) {
    throw std::invalid_argument("error propagation needs a positive relative error");
  }
  return candidates(meas, layout, x, window);
}

double seeded_standard_normal(std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  const auto unit = [&gen] {
    // (k + 0.5) * 2^-53 lies strictly inside (0, 1).
    return (static_cast<double>(gen() >> 11) + 0.5) * 0x1p-53;
  };
  const double u1 = unit();
  const double u2 = unit();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
}

Measurement simulate_measurement(double z_true, const LoopLayout& layout, double x,
                                 const std::optional<NoiseModel>& noise,
                                 std::optional<double> band) {
  require_drive(x);
  double r = ratio_analytic(x, loop_phase(layout, z_true));
  double rel = 0.0;
  if (noise) {
    if (!(noise->relative_sigma >= 0.0)) throw std::invalid_argument("noise sigma must be >= 0");
    r *= 1.0 + noise->relative_sigma * seeded_standard_normal(noise->seed);
    rel = noise->relative_sigma;
  }
  if (band) rel = *band;
  return Measurement(std::max(r, 0.0), rel);
}

double optimize_phase(double z_est, const LoopLayout& layout, double x) {
  require_drive(x);
  const double xi = require_magnification(layout);
  loop_phase(layout, 0.0);
  const double base = reduce_phase(kTwoPi * xi * z_est);
  const auto objective = [&](double phi0) { return std::abs(slope(x, base + phi0)); };

  const double step = kTwoPi / static_cast<double>(kPhaseGrid);
  std::size_t best = 0;
  double best_value = -1.0;
  for (std::size_t k = 0; k < kPhaseGrid; ++k) {
    const double v = objective(step * static_cast<double>(k));
    if (v > best_value) {
      best_value = v;
      best = k;
    }
  }

  // Golden-section refinement on the neighbouring grid cells.
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = step * (static_cast<double>(best) - 1.0);
  double b = step * (static_cast<double>(best) + 1.0);
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = objective(c);
  double fd = objective(d);
  while (b - a > 1e-8) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = objective(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = objective(d);
    }
  }
  const double phi0_opt = 0.5 * (a + b);

  // |dR/dphi| is even about pi; report the operating phase in [0, pi].
  const double operating = reduce_phase(base + phi0_opt);
  if (operating > std::numbers::pi) return reduce_phase(kTwoPi - operating - base);
  return reduce_phase(phi0_opt);
}

PositionInterval select_branch(const CandidateSet& cands, const PositionInterval& prior) {
  if (cands.candidates.empty()) throw std::invalid_argument("candidate set is empty");
  std::vector<const PositionInterval*> inside;
  for (const auto& c : cands.candidates) {
    if (c.z_hat >= prior.z_lo - kPriorSlack && c.z_hat <= prior.z_hi + kPriorSlack) {
      inside.push_back(&c);
    }
  }
  if (inside.size() > 1) {
    throw AmbiguousBranch(std::to_string(inside.size()) + " candidates inside prior interval [" +
                          std::to_string(prior.z_lo) + ", " + std::to_string(prior.z_hi) + "]");
  }
  if (inside.size() == 1) return *inside.front();

  const auto nearest = std::min_element(
      cands.candidates.begin(), cands.candidates.end(),
      [&](const PositionInterval& a, const PositionInterval& b) {
        return std::abs(a.z_hat - prior.z_hat) < std::abs(b.z_hat - prior.z_hat);
      });
  PositionInterval out = *nearest;
  out.flags |= kOutsidePrior;
  return out;
}

ProtocolResult coarse_to_fine(const MeasurementSource& source,
                              const std::vector<ProtocolStage>& stages, const Window& window) {
  if (stages.empty()) throw std::invalid_argument("protocol needs at least one stage");
  const double xi0 = magnification(stages.front().layout);
  if (!(xi0 > 0.0 && xi0 <= 1.0)) {
    throw std::invalid_argument("first protocol stage must have 0 < xi <= 1");
  }
  for (std::size_t i = 1; i < stages.size(); ++i) {
    if (!(magnification(stages[i].layout) > magnification(stages[i - 1].layout))) {
      throw std::invalid_argument("protocol stages must have strictly increasing xi (stage " +
                                  std::to_string(i) + ")");
    }
  }

  ProtocolResult result{{}, {}, 0.0};
  for (std::size_t i = 0; i < stages.size(); ++i) {
    const auto& stage = stages[i];
    const Measurement meas = source(i, stage.layout, stage.x);
    const CandidateSet cs = candidates(meas, stage.layout, stage.x, window);
    PositionInterval chosen;
    if (i == 0) {
      if (cs.candidates.empty()) throw NoSolution("coarse stage has no candidate in the window");
      if (cs.candidates.size() > 1) {
        throw AmbiguousBranch("coarse stage leaves " + std::to_string(cs.candidates.size()) +
                                  " candidates in the window",
                              0);
      }
      chosen = cs.candidates.front();
    } else {
      try {
        chosen = select_branch(cs, result.stages.back().interval);
      } catch (const AmbiguousBranch& e) {
        throw AmbiguousBranch(e.what(), i);
      }
    }
    result.stages.push_back({magnification(stage.layout), stage.layout.relative_phase(), stage.x,
                             meas, cs.candidates.size(), chosen});
  }
  result.final_interval = result.stages.back().interval;
  result.final_relative_uncertainty = result.final_interval.relative_uncertainty();
  return result;
}

}  // namespace looploc
