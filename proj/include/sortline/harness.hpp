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

#include "sortline/config.hpp"
#include "sortline/scenario.hpp"

namespace sortline {

// Experiment execution across architectures, metric computation and report
// emission.
//
// Every experiment first runs the plant with the scripted injections under
// the full observer/manager pipeline. The hierarchical report is read off
// that execution directly; the baseline architectures consume the extracted
// fault list and never touch the plant.

enum class Architecture : std::uint8_t { Hierarchical, Centralized, Decentralized };

std::string_view architecture_name(Architecture a);
std::optional<Architecture> architecture_from_name(std::string_view name);

// Message accounting. Scenario-origin counts each fault from the manager
// named as its reporter (a leaf report that was merely escalated is folded
// into the escalation); physical counts every inter-manager hop.
enum class AccountingMode : std::uint8_t { ScenarioOrigin, Physical };

std::string_view accounting_name(AccountingMode m);
std::optional<AccountingMode> accounting_from_name(std::string_view name);

double recovery_time(std::uint64_t messages, std::uint64_t decisions,
                     const CostModel& costs = {});

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

struct ScenarioMetrics {
  int index = 0;
  int type = 0;  // 0 for raw entries
  std::uint64_t faults = 0;
  std::uint64_t messages = 0;
  std::uint64_t decisions = 0;
  std::string action = "none";
  std::string outcome = "pending";
  SpeedLevel speed_after = SpeedLevel::S1;
};

struct RunReport {
  Architecture arch = Architecture::Hierarchical;
  AccountingMode accounting = AccountingMode::ScenarioOrigin;
  std::optional<DecentralizedDecisionModel> decision_model;  // decentralized only
  std::string script_name;
  std::string script_digest;
  std::string config_digest;
  CostModel costs;

  std::uint64_t faults = 0;
  std::uint64_t messages = 0;
  std::uint64_t decisions = 0;
  double recovery_time_ms = 0;

  // Physical accounting carries the scenario-origin reference and the delta
  // so the extra hops are visible next to the headline number.
  std::optional<std::uint64_t> messages_scenario_origin;
  std::optional<std::uint64_t> accounting_delta;

  // The alternative decentralized decision model, reported alongside.
  std::optional<std::uint64_t> alt_decisions;
  std::optional<double> alt_recovery_time_ms;

  std::vector<ScenarioMetrics> scenarios;
  std::array<std::uint32_t, 3> bins{0, 0, 0};
  std::uint32_t ran_off = 0;
  std::uint32_t handover = 0;

  std::string to_structured() const;
  std::string to_csv() const;
  static RunReport parse_structured(const std::string& text);
};

// ---------------------------------------------------------------------------
// Execution
// ---------------------------------------------------------------------------

// Validates the configuration, executes the script and assembles the report
// for the requested architecture. Deterministic: fixed inputs produce a
// byte-identical serialized report.
RunReport run_experiment(const SystemConfig& config, const ScenarioScript& script,
                         Architecture arch, AccountingMode accounting);

// Full event/message/decision trace of the hierarchical execution, in the
// line-delimited trace format.
std::string trace_experiment(const SystemConfig& config, const ScenarioScript& script);

// A trace file read back for offline replay: the plant inputs in order plus
// the motor-speed timeline, ready to feed offline_check.
struct TraceData {
  std::vector<ObserverInput> inputs;  // events and departures, trace end last
  ParamTimeline params;
  std::string config_digest;
  std::string script_digest;
};

TraceData parse_trace(const std::string& text);

// ---------------------------------------------------------------------------
// Comparison
// ---------------------------------------------------------------------------

struct ComparisonEntry {
  Architecture arch = Architecture::Centralized;
  std::uint64_t messages = 0;
  double recovery_time_ms = 0;
  int message_saving_pct = 0;
  int time_saving_pct = 0;
};

struct ComparisonReport {
  std::string config_digest;
  std::string script_digest;
  std::uint64_t reference_messages = 0;
  std::uint64_t reference_decisions = 0;
  double reference_recovery_ms = 0;
  std::vector<ComparisonEntry> versus;

  std::string to_string() const;
};

// Savings of the hierarchical run against each baseline report, rounded to
// integer percent. All reports must share the same config and script digests.
ComparisonReport compare(const std::vector<RunReport>& reports);

}  // namespace sortline
