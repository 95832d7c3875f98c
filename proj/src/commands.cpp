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

#include "looploc/commands.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "looploc/dynamics.hpp"
#include "looploc/errors.hpp"
#include "looploc/localization.hpp"
#include "looploc/observables.hpp"
#include "looploc/serialize.hpp"

namespace looploc {

using nlohmann::ordered_json;

namespace {

Measurement measurement_from(const ScenarioConfig& cfg) {
  const auto& m = cfg.measurement;
  if (m.ratio) return Measurement(*m.ratio, m.relative_error.value_or(0.0));
  if (m.z_true) {
    std::optional<NoiseModel> noise;
    if (m.noise_sigma > 0.0) noise = NoiseModel{m.noise_sigma, m.seed};
    return simulate_measurement(*m.z_true, cfg.layout, cfg.drive_x(), noise, m.relative_error);
  }
  throw ConfigError("config.measurement: a ratio or z_true is required");
}

}  // namespace

void validate(const ScenarioConfig& cfg) {
  const auto& m = cfg.measurement;
  if (m.ratio && m.z_true) {
    throw ConfigError("config.measurement: give either ratio or z_true, not both");
  }
  if (m.ratio && !(*m.ratio >= 0.0)) throw ConfigError("config.measurement.ratio: must be >= 0");
  if (m.relative_error && !(*m.relative_error >= 0.0 && *m.relative_error < 0.5)) {
    throw ConfigError("config.measurement.relative_error: must lie in [0, 0.5)");
  }
  if (!(m.noise_sigma >= 0.0 && m.noise_sigma < 0.5)) {
    throw ConfigError("config.measurement.noise_sigma: must lie in [0, 0.5)");
  }
  if (!(cfg.window.hi > cfg.window.lo) || cfg.window.length() > 10.0) {
    throw ConfigError("config.window: need lo < hi and a length of at most 10 wavelengths");
  }
  for (std::size_t i = 0; i < cfg.stages.size(); ++i) {
    const double xi = magnification(cfg.stages[i].layout);
    if (i == 0 && !(xi > 0.0 && xi <= 1.0)) {
      throw ConfigError("config.stages[0]: coarse stage needs 0 < xi <= 1");
    }
    if (i > 0 && !(xi > magnification(cfg.stages[i - 1].layout))) {
      throw ConfigError("config.stages[" + std::to_string(i) +
                        "]: magnifications must strictly increase");
    }
    if (cfg.stages[i].x && !(*cfg.stages[i].x > 0.0)) {
      throw ConfigError("config.stages[" + std::to_string(i) + "].x: must be positive");
    }
  }
}

std::string cmd_ratio_curve(const ScenarioConfig& cfg) {
  validate(cfg);
  if (cfg.points < 2) throw ConfigError("config.points: need at least 2");
  return ratio_curve_csv(ratio_curve(cfg.drive_x(), cfg.points));
}

std::string cmd_position_curve(const ScenarioConfig& cfg) {
  validate(cfg);
  const double x = cfg.drive_x();
  if (std::abs(magnification(cfg.layout)) < 1e-12) {
    throw ZeroMagnification("position curve undefined for xi = 0");
  }
  const double r_max = ratio_maximum(x);
  std::string out = "# schema_version=1\nR,branch,z_lambda\n";
  const double last = static_cast<double>(kPositionCurveSamples - 1);
  for (std::size_t k = 0; k < kPositionCurveSamples; ++k) {
    const double r = r_max * (static_cast<double>(k) / last);
    const CandidateSet cs = candidates(Measurement(r, 0.0), cfg.layout, x, cfg.window);
    for (const auto& c : cs.candidates) {
      // Branch id: winding m and which member of the (phi, 2pi - phi) pair.
      const int side = c.phi_solution > std::numbers::pi ? 1 : 0;
      out += format_double(r);
      out += ',';
      out += std::to_string(2 * c.branch + side);
      out += ',';
      out += format_double(c.z_hat);
      out += '\n';
    }
  }
  return out;
}

std::string cmd_invert(const ScenarioConfig& cfg) {
  validate(cfg);
  const Measurement meas = measurement_from(cfg);
  return dump_json(to_json(candidates(meas, cfg.layout, cfg.drive_x(), cfg.window)));
}

std::string cmd_protocol(const ScenarioConfig& cfg) {
  validate(cfg);
  if (cfg.stages.empty()) throw ConfigError("config.stages: protocol needs at least one stage");
  const auto& m = cfg.measurement;
  if (!m.z_true) throw ConfigError("config.measurement.z_true: protocol needs a z_true source");

  std::vector<ProtocolStage> stages;
  for (const auto& s : cfg.stages) stages.push_back({s.layout, s.x ? *s.x : cfg.drive_x()});

  const double z_true = *m.z_true;
  const MeasurementSource source = [&](std::size_t index, const LoopLayout& layout, double x) {
    std::optional<NoiseModel> noise;
    if (m.noise_sigma > 0.0) noise = NoiseModel{m.noise_sigma, m.seed + index};
    return simulate_measurement(z_true, layout, x, noise, m.relative_error);
  };
  return dump_json(to_json(coarse_to_fine(source, stages, cfg.window)));
}

std::string cmd_optimize_phi0(const ScenarioConfig& cfg) {
  validate(cfg);
  if (!cfg.z_est) throw ConfigError("config.z_est: required for phase optimization");
  const double x = cfg.drive_x();
  const double z = *cfg.z_est;
  const double phi0_star = optimize_phase(z, cfg.layout, x);
  const double xi = magnification(cfg.layout);

  ordered_json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["phi0_star"] = phi0_star;
  doc["slope_at_operating_point"] = slope(x, kTwoPi * xi * z + phi0_star);
  doc["slope_at_phi0_zero"] = slope(x, kTwoPi * xi * z);
  return dump_json(doc);
}

std::string cmd_steady_state(const ScenarioConfig& cfg) {
  validate(cfg);
  const auto& legs = cfg.layout.transitions();
  if (legs.size() != 4) throw ConfigError("config.layout: steady state is defined for the diamond (N = 2)");

  double phi = 0.0;
  if (cfg.phi) {
    phi = *cfg.phi;
  } else {
    try {
      phi = loop_phase(cfg.layout, cfg.measurement.z_true.value_or(0.0));
    } catch (const NonStaticPhase& e) {
      throw ConfigError(std::string("config.layout: ") + e.what() + "; pass an explicit phi");
    }
  }
  // Legs store Delta_{i+1,i}; the generator takes Delta21, Delta32, Delta41 = -Delta14.
  const std::array<double, 3> detunings{legs[0].detuning, legs[1].detuning, -legs[3].detuning};
  const auto rho = diamond_steady_state<double>(phi, cfg.drive, cfg.decay, detunings);
  const auto pops = populations(rho);

  ordered_json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["phi"] = phi;
  doc["populations"] = ordered_json::array();
  for (double p : pops) doc["populations"].push_back(p);

  std::optional<double> numeric;
  try {
    numeric = ratio_numeric(rho, cfg.decay);
  } catch (const VanishingDenominator&) {
  }
  const bool unit_rates = cfg.decay.rates == std::array<double, 4>{1.0, 1.0, 1.0, 1.0};
  std::optional<double> analytic;
  if (cfg.drive.is_uniform() && unit_rates) analytic = ratio_analytic(cfg.drive.x, phi);

  doc["ratio_numeric"] = numeric ? ordered_json(*numeric) : ordered_json(nullptr);
  doc["ratio_analytic"] = analytic ? ordered_json(*analytic) : ordered_json(nullptr);
  doc["abs_difference"] =
      (numeric && analytic) ? ordered_json(std::abs(*numeric - *analytic)) : ordered_json(nullptr);
  return dump_json(doc);
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ZeroMagnification*>(&e)) return kExitZeroMagnification;
  if (dynamic_cast<const NoSolution*>(&e)) return kExitNoSolution;
  if (dynamic_cast<const AmbiguousBranch*>(&e)) return kExitAmbiguousBranch;
  if (dynamic_cast<const DegenerateSteadyState*>(&e)) return kExitDegenerateSteadyState;
  if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const NonStaticPhase*>(&e) ||
      dynamic_cast<const std::invalid_argument*>(&e)) {
    return kExitConfig;
  }
  return kExitInternal;
}

}  // namespace looploc
