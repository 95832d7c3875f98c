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

// Command implementations behind the CLI. Each returns the complete output
// document; nothing is emitted on failure.

#include <exception>
#include <string>
#include <vector>

#include "looploc/config.hpp"

namespace looploc {

enum ExitCode : int {
  kExitOk = 0,
  kExitInternal = 1,
  kExitConfig = 2,
  kExitZeroMagnification = 3,
  kExitNoSolution = 4,
  kExitAmbiguousBranch = 5,
  kExitDegenerateSteadyState = 6,
};

/// Schema and cross-field checks shared by every command.
void validate(const ScenarioConfig& cfg);

std::string cmd_ratio_curve(const ScenarioConfig& cfg);
std::string cmd_position_curve(const ScenarioConfig& cfg);
std::string cmd_invert(const ScenarioConfig& cfg);
std::string cmd_protocol(const ScenarioConfig& cfg);
std::string cmd_optimize_phi0(const ScenarioConfig& cfg);
std::string cmd_steady_state(const ScenarioConfig& cfg);

/// Number of R samples in the position-curve table.
inline constexpr std::size_t kPositionCurveSamples = 512;

/// Exit code for an exception thrown by a command.
int exit_code_for(const std::exception& e);

/// Full CLI entry point: `looploc <command> [--config PATH] [overrides] [--out PATH]`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace looploc
