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

// Deterministic text serialization. Floats are written with 17 significant
// digits ("%.17g"), which round-trips IEEE doubles; non-finite values become
// JSON null. Lines end in LF, including the last one.

#include <string>

#include <json.hpp>

#include "looploc/localization.hpp"
#include "looploc/observables.hpp"

namespace looploc {

inline constexpr int kSchemaVersion = 1;

std::string format_double(double v);

/// Compact single-line JSON with object keys kept in insertion order.
std::string dump_json(const nlohmann::ordered_json& doc);

/// `phi_rad,R,dR_dPhi` table preceded by a schema comment line.
std::string ratio_curve_csv(const RatioCurve& curve);

nlohmann::ordered_json to_json(const PositionInterval& iv);

/// {"schema_version", "candidates", "relative_uncertainty", "flags"}.
nlohmann::ordered_json to_json(const CandidateSet& cs);

/// {"schema_version", "stages", "final"}.
nlohmann::ordered_json to_json(const ProtocolResult& result);

/// Names of the bits set in `flags`, in bit order.
nlohmann::ordered_json flag_names(std::uint32_t flags);

}  // namespace looploc
