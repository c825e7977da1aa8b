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

#include <span>
#include <vector>

#include "sortline/rm.hpp"
#include "sortline/types.hpp"

namespace sortline {

// Reference resilience architectures evaluated over the same fault list, for
// message/decision/time comparison. Baselines never touch the plant: the
// fault list extracted from a run is their input.
//
//   Centralized: every component reports each local fault to one central
//   manager which answers every component — 1 + 3 messages and one decision
//   per fault.
//
//   Decentralized: all four managers reach consensus per fault in three
//   rounds of three messages — 9 messages per fault. Two decision models are
//   provided: mirroring the hierarchical run's decision count (default), or a
//   flat two decision steps per fault.

struct Fault {
  TimeMs t = 0;
  std::string contract;
  TokenId token = 0;
  FaultClass fault_class = FaultClass::Latency;
};

struct BaselineMetrics {
  std::uint64_t messages = 0;
  std::uint64_t decisions = 0;
};

enum class DecentralizedDecisionModel : std::uint8_t { MirrorHierarchical, TwoPerFault };

std::string_view decision_model_name(DecentralizedDecisionModel m);
std::optional<DecentralizedDecisionModel> decision_model_from_name(std::string_view name);

BaselineMetrics run_centralized(std::span<const Fault> faults);

BaselineMetrics run_decentralized(std::span<const Fault> faults,
                                  DecentralizedDecisionModel model,
                                  std::uint64_t hierarchical_decisions = 0);

}  // namespace sortline
