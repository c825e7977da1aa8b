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

#include <json.hpp>

#include "sortline/plant.hpp"

namespace sortline {

// Scenario scripting: an ordered list of single-token entries, each either a
// canonical fault scenario type (1..6) or a raw injection list. Entries run
// sequentially with no overlapping in-flight tokens; the belt speed is reset
// between entries once recovery has completed.

struct ScenarioEntry {
  int type = 0;  // 1..6, or 0 for a raw injection list
  Colour colour = Colour::White;
  std::vector<Injection> raw;  // token ids are assigned at execution time

  std::string label() const;
};

struct ScenarioScript {
  std::string name = "custom";
  std::vector<ScenarioEntry> entries;

  nlohmann::json to_json() const;
  std::string digest() const;

  static ScenarioScript from_json(const nlohmann::json& doc);
  static ScenarioScript load_file(const std::string& path);
};

// The canonical nine-entry script [1,2,3,1,2,3,4,5,6], one white token each.
// Under the default plant configuration its six scenario types expand to:
//   1  colour-processor latency 250 ms (violation with slack intact)
//   2  bin-selector latency 250 ms
//   3  both components at 250 ms (two faults, still absorbed)
//   4  bin-selector latency 1550 ms (escalated; the token misses its ejector)
//   5  belt slip of 3 steps (jitter; token recovered into bin 2)
//   6  bin-selector latency 1550 ms plus slip 3 on the same token
ScenarioScript canonical_script();

// The injections a scenario type expands to for a given token.
std::vector<Injection> expand_entry(const ScenarioEntry& entry, TokenId token);

}  // namespace sortline
