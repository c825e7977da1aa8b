// Copyright 2026 The sortline Authors
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

#include <string>

#include <json.hpp>

#include "sortline/baselines.hpp"
#include "sortline/contracts.hpp"
#include "sortline/plant.hpp"
#include "sortline/rm.hpp"

namespace sortline {

// The shared configuration file: plant geometry and step periods, latency
// bound tables, the contract registry (predicates in the grammar of
// parse_predicate), the contract hierarchy, the manager topology and the cost
// model. See default_config_json() for the reference document.

struct CostModel {
  double message_ms = 1.0;
  double decision_ms = 0.5;
};

struct SystemConfig {
  PlantConfig plant;
  std::map<std::string, LatencyBound> latency_fns;
  ContractRegistry registry;
  HierarchySpec hierarchy;
  RmTopology rm;
  CostModel costs;
  DecentralizedDecisionModel decentralized_model =
      DecentralizedDecisionModel::MirrorHierarchical;
  std::string digest;  // stable hash of the normalized source document

  StructuralTiming structural_timing() const;
};

SystemConfig load_config(const nlohmann::json& doc);
SystemConfig load_config_file(const std::string& path);
SystemConfig default_config();

// The embedded default configuration document.
std::string default_config_json();

// Stable 64-bit FNV-1a digest, hex-encoded.
std::string fnv1a_digest(std::string_view data);

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

struct ConfigValidation {
  bool ok = false;
  std::vector<std::string> plant_errors;
  HierarchyReport hierarchy;

  std::string to_string() const;
};

// Plant invariants, the latency/travel structural constraints, and the full
// hierarchy refinement check.
ConfigValidation validate_config(const SystemConfig& config);

}  // namespace sortline
