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

#include "looploc/serialize.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace looploc {

using nlohmann::ordered_json;

std::string format_double(double v) {
  if (!std::isfinite(v)) return "null";
  if (v == 0.0) v = 0.0;  // drop the sign of -0
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

void dump(const ordered_json& j, std::string& out) {
  switch (j.type()) {
    case ordered_json::value_t::object: {
      out += '{';
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ',';
        first = false;
        out += ordered_json(it.key()).dump();
        out += ':';
        dump(it.value(), out);
      }
      out += '}';
      break;
    }
    case ordered_json::value_t::array: {
      out += '[';
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out += ',';
        dump(j[i], out);
      }
      out += ']';
      break;
    }
    case ordered_json::value_t::number_float:
      out += format_double(j.get<double>());
      break;
    default:
      out += j.dump();
  }
}

}  // namespace

std::string dump_json(const ordered_json& doc) {
  std::string out;
  dump(doc, out);
  out += '\n';
  return out;
}

std::string ratio_curve_csv(const RatioCurve& curve) {
  std::string out = "# schema_version=1\nphi_rad,R,dR_dPhi\n";
  for (std::size_t k = 0; k < curve.phi_grid.size(); ++k) {
    out += format_double(curve.phi_grid[k]);
    out += ',';
    out += format_double(curve.values[k]);
    out += ',';
    out += format_double(curve.slopes[k]);
    out += '\n';
  }
  return out;
}

ordered_json flag_names(std::uint32_t flags) {
  ordered_json out = ordered_json::array();
  if (flags & kBandEscapesBranch) out.push_back("BandEscapesBranch");
  if (flags & kOutsidePrior) out.push_back("OutsidePrior");
  if (flags & kClippedToWindow) out.push_back("ClippedToWindow");
  return out;
}

ordered_json to_json(const PositionInterval& iv) {
  ordered_json j;
  j["branch"] = iv.branch;
  j["z_hat"] = iv.z_hat;
  j["z_lo"] = iv.z_lo;
  j["z_hi"] = iv.z_hi;
  j["phi_solution"] = iv.phi_solution;
  return j;
}

ordered_json to_json(const CandidateSet& cs) {
  ordered_json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["candidates"] = ordered_json::array();
  doc["relative_uncertainty"] = ordered_json::array();
  doc["flags"] = ordered_json::array();
  for (const auto& c : cs.candidates) {
    doc["candidates"].push_back(to_json(c));
    doc["relative_uncertainty"].push_back(c.relative_uncertainty());
    doc["flags"].push_back(flag_names(c.flags));
  }
  return doc;
}

ordered_json to_json(const ProtocolResult& result) {
  ordered_json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["stages"] = ordered_json::array();
  for (const auto& s : result.stages) {
    ordered_json st;
    st["xi"] = s.xi;
    st["phi0"] = s.phi0;
    st["x"] = s.x;
    st["ratio"] = s.measurement.ratio;
    st["relative_error"] = s.measurement.relative_error;
    st["candidate_count"] = s.candidate_count;
    st["interval"] = to_json(s.interval);
    st["relative_uncertainty"] = s.interval.relative_uncertainty();
    st["flags"] = flag_names(s.interval.flags);
    doc["stages"].push_back(std::move(st));
  }
  ordered_json fin = to_json(result.final_interval);
  fin["relative_uncertainty"] = result.final_relative_uncertainty;
  doc["final"] = std::move(fin);
  return doc;
}

}  // namespace looploc
