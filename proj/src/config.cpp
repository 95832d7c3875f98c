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

#include "looploc/config.hpp"

#include <fstream>
#include <initializer_list>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "looploc/errors.hpp"

namespace looploc {

namespace {

using nlohmann::json;

void reject_unknown(const json& obj, const std::string& path,
                    std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw ConfigError(path + ": expected an object");
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (const char* a : allowed) known = known || it.key() == a;
    if (!known) throw ConfigError(path + "." + it.key() + ": unknown key");
  }
}

double number(const json& v, const std::string& path) {
  if (!v.is_number()) throw ConfigError(path + ": expected a number");
  return v.get<double>();
}

template <std::size_t N>
std::array<double, N> number_array(const json& v, const std::string& path) {
  if (!v.is_array() || v.size() != N) {
    throw ConfigError(path + ": expected an array of " + std::to_string(N) + " numbers");
  }
  std::array<double, N> out{};
  for (std::size_t i = 0; i < N; ++i) out[i] = number(v[i], path + "[" + std::to_string(i) + "]");
  return out;
}

template <typename F>
auto guarded(const std::string& path, F&& build) {
  try {
    return build();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

LoopLayout parse_layout(const json& v, const std::string& path,
                        std::initializer_list<const char*> extra_keys = {}) {
  std::vector<const char*> allowed{"xi", "transitions", "phi0", "wavelength"};
  allowed.insert(allowed.end(), extra_keys.begin(), extra_keys.end());
  if (!v.is_object()) throw ConfigError(path + ": expected an object");
  for (auto it = v.begin(); it != v.end(); ++it) {
    bool known = false;
    for (const char* a : allowed) known = known || it.key() == a;
    if (!known) throw ConfigError(path + "." + it.key() + ": unknown key");
  }
  const double phi0 = v.contains("phi0") ? number(v["phi0"], path + ".phi0") : 0.0;
  const double wavelength =
      v.contains("wavelength") ? number(v["wavelength"], path + ".wavelength") : 1.0;
  if (v.contains("xi") && v.contains("transitions")) {
    throw ConfigError(path + ": give either xi or transitions, not both");
  }
  if (v.contains("transitions")) {
    const json& arr = v["transitions"];
    if (!arr.is_array()) throw ConfigError(path + ".transitions: expected an array");
    std::vector<FieldGeometry> legs;
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string p = path + ".transitions[" + std::to_string(i) + "]";
      reject_unknown(arr[i], p, {"wavenumber", "sign", "detuning"});
      FieldGeometry g;
      if (arr[i].contains("wavenumber")) g.wavenumber = number(arr[i]["wavenumber"], p + ".wavenumber");
      if (arr[i].contains("sign")) {
        if (!arr[i]["sign"].is_number_integer()) throw ConfigError(p + ".sign: expected -1 or 1");
        g.propagation_sign = arr[i]["sign"].get<int>();
      }
      if (arr[i].contains("detuning")) g.detuning = number(arr[i]["detuning"], p + ".detuning");
      legs.push_back(g);
    }
    return guarded(path, [&] { return LoopLayout(legs, phi0, wavelength); });
  }
  const double xi = v.contains("xi") ? number(v["xi"], path + ".xi") : 2.0;
  return guarded(path, [&] {
    const LoopLayout base = diamond_layout_for_magnification(xi, phi0);
    return LoopLayout(base.transitions(), phi0, wavelength);
  });
}

}  // namespace

double ScenarioConfig::drive_x() const {
  if (!drive.is_uniform()) {
    throw ConfigError("drive: command needs a uniform drive strength x");
  }
  return drive.x;
}

ScenarioConfig parse_config(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: malformed JSON: ") + e.what());
  }
  reject_unknown(root, "config",
                 {"schema_version", "layout", "drive", "decay", "measurement", "window", "stages",
                  "phi", "z_est", "points"});

  ScenarioConfig cfg;
  if (root.contains("schema_version")) {
    if (!root["schema_version"].is_number_integer() || root["schema_version"].get<int>() != 1) {
      throw ConfigError("config.schema_version: only version 1 is supported");
    }
  }
  if (root.contains("layout")) cfg.layout = parse_layout(root["layout"], "config.layout");

  if (root.contains("drive")) {
    const json& d = root["drive"];
    reject_unknown(d, "config.drive", {"x", "g"});
    if (d.contains("x") && d.contains("g")) throw ConfigError("config.drive: give either x or g");
    if (d.contains("g")) {
      const auto g = number_array<4>(d["g"], "config.drive.g");
      cfg.drive = guarded("config.drive.g", [&] { return DriveParams<double>::explicit_couplings(g); });
    } else if (d.contains("x")) {
      const double x = number(d["x"], "config.drive.x");
      cfg.drive = guarded("config.drive.x", [&] { return DriveParams<double>::uniform(x); });
    }
  }

  if (root.contains("decay")) {
    const json& d = root["decay"];
    reject_unknown(d, "config.decay", {"rates"});
    if (d.contains("rates")) {
      const auto r = number_array<4>(d["rates"], "config.decay.rates");
      cfg.decay = guarded("config.decay.rates", [&] { return DecayModel<double>::from_rates(r); });
    }
  }

  if (root.contains("measurement")) {
    const json& m = root["measurement"];
    const std::string p = "config.measurement";
    reject_unknown(m, p, {"ratio", "relative_error", "z_true", "noise_sigma", "seed"});
    if (m.contains("ratio")) cfg.measurement.ratio = number(m["ratio"], p + ".ratio");
    if (m.contains("relative_error")) {
      cfg.measurement.relative_error = number(m["relative_error"], p + ".relative_error");
    }
    if (m.contains("z_true")) cfg.measurement.z_true = number(m["z_true"], p + ".z_true");
    if (m.contains("noise_sigma")) cfg.measurement.noise_sigma = number(m["noise_sigma"], p + ".noise_sigma");
    if (m.contains("seed")) {
      if (!m["seed"].is_number_unsigned()) throw ConfigError(p + ".seed: expected a non-negative integer");
      cfg.measurement.seed = m["seed"].get<std::uint64_t>();
    }
  }

  if (root.contains("window")) {
    const auto w = number_array<2>(root["window"], "config.window");
    cfg.window = Window{w[0], w[1]};
  }

  if (root.contains("stages")) {
    const json& s = root["stages"];
    if (!s.is_array()) throw ConfigError("config.stages: expected an array");
    for (std::size_t i = 0; i < s.size(); ++i) {
      const std::string p = "config.stages[" + std::to_string(i) + "]";
      StageConfig st{parse_layout(s[i], p, {"x"}), std::nullopt};
      if (s[i].contains("x")) st.x = number(s[i]["x"], p + ".x");
      cfg.stages.push_back(std::move(st));
    }
  }

  if (root.contains("phi")) cfg.phi = number(root["phi"], "config.phi");
  if (root.contains("z_est")) cfg.z_est = number(root["z_est"], "config.z_est");
  if (root.contains("points")) {
    if (!root["points"].is_number_unsigned()) throw ConfigError("config.points: expected a positive integer");
    cfg.points = root["points"].get<std::size_t>();
  }
  return cfg;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

void apply_overrides(ScenarioConfig& cfg, const Overrides& ov) {
  if (ov.x) cfg.drive = guarded("--x", [&] { return DriveParams<double>::uniform(*ov.x); });
  if (ov.xi || ov.phi0) {
    const double phi0 = ov.phi0 ? *ov.phi0 : cfg.layout.relative_phase();
    if (ov.xi) {
      cfg.layout = guarded("--xi", [&] { return diamond_layout_for_magnification(*ov.xi, phi0); });
    } else {
      cfg.layout = guarded("--phi0", [&] { return cfg.layout.with_relative_phase(phi0); });
    }
  }
  if (ov.ratio) {
    cfg.measurement.ratio = *ov.ratio;
    cfg.measurement.z_true.reset();
  }
  if (ov.rel_err) cfg.measurement.relative_error = *ov.rel_err;
  if (ov.z_true) {
    cfg.measurement.z_true = *ov.z_true;
    cfg.measurement.ratio.reset();
  }
  if (ov.points) cfg.points = *ov.points;
  if (ov.seed) cfg.measurement.seed = *ov.seed;
  if (ov.window) {
    const auto colon = ov.window->find(':');
    if (colon == std::string::npos) throw ConfigError("--window: expected LO:HI");
    try {
      std::size_t used_lo = 0;
      std::size_t used_hi = 0;
      const std::string lo_s = ov.window->substr(0, colon);
      const std::string hi_s = ov.window->substr(colon + 1);
      const double lo = std::stod(lo_s, &used_lo);
      const double hi = std::stod(hi_s, &used_hi);
      if (used_lo != lo_s.size() || used_hi != hi_s.size()) throw std::invalid_argument("trailing");
      cfg.window = Window{lo, hi};
    } catch (const std::exception&) {
      throw ConfigError("--window: expected LO:HI with numeric bounds");
    }
  }
}

}  // namespace looploc
