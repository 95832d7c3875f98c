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

// Scenario configuration: JSON ingestion with strict schema checks and
// command-line overrides.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "looploc/dynamics.hpp"
#include "looploc/geometry.hpp"
#include "looploc/localization.hpp"

namespace looploc {

struct MeasurementConfig {
  std::optional<double> ratio;
  std::optional<double> relative_error;
  std::optional<double> z_true;
  double noise_sigma = 0.0;
  std::uint64_t seed = 0;
};

struct StageConfig {
  LoopLayout layout;
  std::optional<double> x;  // falls back to the scenario drive
};

struct ScenarioConfig {
  LoopLayout layout = diamond_layout_for_magnification(2.0);
  DriveParams<double> drive = DriveParams<double>::uniform(5.0);
  DecayModel<double> decay = DecayModel<double>::unit();
  MeasurementConfig measurement;
  Window window;
  std::vector<StageConfig> stages;
  std::optional<double> phi;    // explicit loop phase for steady-state inspection
  std::optional<double> z_est;  // operating-point estimate for phase optimization
  std::size_t points = 721;

  /// Uniform drive strength; ConfigError when only per-transition couplings are set.
  double drive_x() const;
};

/// Command-line overrides applied on top of the JSON file.
struct Overrides {
  std::optional<double> x;
  std::optional<double> xi;
  std::optional<double> phi0;
  std::optional<double> ratio;
  std::optional<double> rel_err;
  std::optional<double> z_true;
  std::optional<std::size_t> points;
  std::optional<std::string> window;  // "LO:HI"
  std::optional<std::uint64_t> seed;
};

/// Parse a scenario from JSON text. Unknown keys and type mismatches raise
/// ConfigError naming the offending field path.
ScenarioConfig parse_config(const std::string& json_text);

ScenarioConfig load_config(const std::string& path);

void apply_overrides(ScenarioConfig& cfg, const Overrides& ov);

}  // namespace looploc
