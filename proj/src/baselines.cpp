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

#include "sortline/baselines.hpp"

namespace sortline {

std::string_view decision_model_name(DecentralizedDecisionModel m) {
  return m == DecentralizedDecisionModel::MirrorHierarchical ? "mirror-hierarchical"
                                                             : "two-per-fault";
}

std::optional<DecentralizedDecisionModel> decision_model_from_name(std::string_view name) {
  if (name == "mirror-hierarchical") return DecentralizedDecisionModel::MirrorHierarchical;
  if (name == "two-per-fault") return DecentralizedDecisionModel::TwoPerFault;
  return std::nullopt;
}

BaselineMetrics run_centralized(std::span<const Fault> faults) {
  BaselineMetrics m;
  m.messages = 4 * faults.size();  // one report, three responses
  m.decisions = faults.size();
  return m;
}

BaselineMetrics run_decentralized(std::span<const Fault> faults,
                                  DecentralizedDecisionModel model,
                                  std::uint64_t hierarchical_decisions) {
  BaselineMetrics m;
  m.messages = 9 * faults.size();  // three rounds of three
  m.decisions = model == DecentralizedDecisionModel::TwoPerFault ? 2 * faults.size()
                                                                 : hierarchical_decisions;
  return m;
}

}  // namespace sortline
