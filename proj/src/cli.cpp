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

#include <fstream>
#include <functional>
#include <map>
#include <ostream>

#include <CLI11.hpp>

#include "looploc/commands.hpp"
#include "looploc/errors.hpp"

namespace looploc {

namespace {

using Command = std::function<std::string(const ScenarioConfig&)>;

const std::map<std::string, std::pair<Command, std::string>>& command_table() {
  static const std::map<std::string, std::pair<Command, std::string>> table{
      {"ratio-curve", {cmd_ratio_curve, "CSV of R and dR/dphi over [0, 2pi]"}},
      {"position-curve", {cmd_position_curve, "CSV of candidate positions versus R"}},
      {"invert", {cmd_invert, "candidate positions with error intervals (JSON)"}},
      {"protocol", {cmd_protocol, "coarse-to-fine magnification protocol (JSON)"}},
      {"optimize-phi0", {cmd_optimize_phi0, "relative phase maximizing |dR/dphi| (JSON)"}},
      {"steady-state", {cmd_steady_state, "master-equation steady state versus closed form (JSON)"}},
  };
  return table;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sub-wavelength localization with closed-loop running-wave fields", "looploc"};
  app.require_subcommand(1, 1);

  std::string config_path;
  std::string out_path;
  Overrides ov;
  std::map<std::string, CLI::App*> subs;
  for (const auto& [name, entry] : command_table()) {
    CLI::App* sub = app.add_subcommand(name, entry.second);
    sub->add_option("--config", config_path, "scenario JSON file");
    sub->add_option("--out", out_path, "output file (default: stdout)");
    sub->add_option("--x", ov.x, "uniform Rabi frequency in units of gamma");
    sub->add_option("--xi", ov.xi, "magnification of a diamond layout");
    sub->add_option("--phi0", ov.phi0, "relative phase (rad)");
    sub->add_option("--R", ov.ratio, "measured ratio");
    sub->add_option("--rel-err", ov.rel_err, "relative error band of the ratio");
    sub->add_option("--z-true", ov.z_true, "true position (wavelengths) for synthetic data");
    sub->add_option("--points", ov.points, "grid points");
    sub->add_option("--window", ov.window, "position window LO:HI (wavelengths)");
    sub->add_option("--seed", ov.seed, "noise seed");
    subs[name] = sub;
  }

  std::vector<std::string> argv_store{"looploc"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_store) argv.push_back(a.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }

  std::string chosen;
  for (const auto& [name, sub] : subs) {
    if (sub->parsed()) chosen = name;
  }

  try {
    ScenarioConfig cfg = config_path.empty() ? ScenarioConfig{} : load_config(config_path);
    apply_overrides(cfg, ov);
    const std::string doc = command_table().at(chosen).first(cfg);
    if (out_path.empty()) {
      out << doc;
    } else {
      std::ofstream f(out_path, std::ios::binary);
      if (!f) throw ConfigError("--out: cannot open " + out_path);
      f << doc;
    }
    return kExitOk;
  } catch (const AmbiguousBranch& e) {
    err << "error: ambiguous branch at stage " << e.stage() << ": " << e.what() << '\n';
    return kExitAmbiguousBranch;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e);
  }
}

}  // namespace looploc
