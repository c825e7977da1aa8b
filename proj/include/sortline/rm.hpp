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

#include <functional>
#include <span>

#include "sortline/contracts.hpp"
#include "sortline/observer.hpp"
#include "sortline/plant.hpp"

namespace sortline {

// The three-level resilience-manager hierarchy. Leaf managers own the runtime
// observers and report contract violations upward; the mid-level latency
// manager absorbs overruns within its slack or escalates the excess; the root
// on the motor controller checks the bin outcome first, then degrades the
// belt speed (jitter forces the slowest speed, latency picks the mildest
// sufficient one) or hands over to system control when no speed suffices.
// Managers exchange exactly two message kinds: fault reports travel up,
// parameter updates travel down.

enum class RmLevel : std::uint8_t { Leaf, L1, Root };

struct RmNode {
  std::string id;
  RmLevel level = RmLevel::Leaf;
  std::string parent;                  // empty for the root
  std::vector<std::string> children;
  std::vector<std::string> contracts;
  std::string host;                    // co-location bookkeeping
  bool parameterized = false;          // any contract carries the M_S parameter
};

enum class FaultClass : std::uint8_t { Latency, Jitter };

std::string_view fault_class_name(FaultClass c);

struct FaultReport {
  std::string from;
  std::string contract;
  FaultClass fault_class = FaultClass::Latency;
  std::optional<DurationMs> observed_latency;  // leaf reports carry C_L
  std::optional<DurationMs> violation_amount;  // escalations carry the excess
  TokenId token = 0;
  TimeMs t = 0;
};

struct ParameterUpdate {
  SpeedLevel value = SpeedLevel::S1;  // the M_S parameter
  TimeMs t = 0;
};

enum class RmAction : std::uint8_t {
  NoAction,
  Absorb,
  Escalate,
  SetSpeed,
  HandOverToSystemControl,
};

std::string action_name(RmAction a, std::optional<SpeedLevel> speed = std::nullopt);

struct Decision {
  std::string maker;
  TimeMs t = 0;
  RmAction action = RmAction::NoAction;
  std::optional<SpeedLevel> speed;  // SetSpeed target
  TokenId token = 0;
};

enum class MessageKind : std::uint8_t { FaultReport, ParameterUpdate };

struct MessageRecord {
  TimeMs t = 0;
  std::string from;
  std::string to;
  MessageKind kind = MessageKind::FaultReport;
  FaultReport report;       // meaningful when kind == FaultReport
  ParameterUpdate update;   // meaningful when kind == ParameterUpdate
  // Scenario-origin accounting counts each fault from the manager named as
  // its reporter: a leaf report that the latency manager merely escalates is
  // excluded there (the escalation is counted instead). Physical accounting
  // counts every hop.
  bool counted_scenario_origin = true;
};

struct AddressedUpdate {
  std::string to;
  ParameterUpdate update;
};

// ---------------------------------------------------------------------------
// Topology
// ---------------------------------------------------------------------------

struct RmTopology {
  struct Leaf {
    std::string id;
    std::string contract;
    std::string host;
  };

  std::vector<Leaf> latency_leaves;  // report to the L1 manager
  Leaf jitter_leaf;                  // reports to the root, runs bin-2 recovery
  std::string l1_id = "LM";
  std::string l1_contract = "C_LM";
  std::string l1_host;
  std::string root_id = "MC";
  std::string root_contract = "C_MC";
  std::string root_host;

  static RmTopology standard();
};

// Side effects the hierarchy may request from the plant and the observer
// layer.
struct RmHooks {
  std::function<void(SpeedLevel, TimeMs)> set_speed;                       // local at MC
  std::function<void(TokenId, TimeMs)> schedule_recovery;                  // EC local action
  std::function<void(const std::string&, SpeedLevel, TimeMs)> param_delivered;
};

// ---------------------------------------------------------------------------
// Hierarchy
// ---------------------------------------------------------------------------

class RmHierarchy {
 public:
  RmHierarchy(RmTopology topology, const ContractRegistry& registry, SpeedLevel initial_speed,
              RmHooks hooks);

  // --- protocol steps (no logging; exposed for direct testing) ---

  // A violated observer outcome at a leaf manager. Latency leaves report C_L
  // upward; the jitter leaf reports to the root and schedules the bin-2
  // recovery ejection locally. Satisfied outcomes produce nothing.
  std::vector<FaultReport> leaf_on_violation(const std::string& leaf_id,
                                             const ObserverOutcome& outcome);

  struct L1Result {
    std::vector<Decision> decisions;
    std::vector<FaultReport> escalations;
  };

  // Processes a batch of leaf reports for one token, one decision per report.
  // Absorbs when the known actuals plus worst-case bounds of silent
  // components fit the latency budget; otherwise escalates the excess.
  L1Result l1_evaluate(std::span<const FaultReport> reports);

  struct L2Result {
    Decision decision;
    std::vector<AddressedUpdate> updates;
  };

  // Root decision over the batch for one token, made once the bin outcome is
  // terminal. Precedence: correct bin first (no action, whatever was
  // reported), then jitter (slowest speed), then latency (mildest sufficient
  // speed or hand-over).
  L2Result l2_decide(std::span<const FaultReport> reports, const BinOutcome& outcome,
                     int correct_bin, TimeMs t);

  // Least-degraded speed strictly slower than `current` whose budget covers
  // the violation; nullopt when none exists.
  static std::optional<SpeedLevel> select_degraded_speed(DurationMs violation_ms,
                                                         SpeedLevel current,
                                                         const LatencyBound& budget);

  // One parameter-update message per lower-level manager whose contracts are
  // parameterized by M_S. Only the root may issue updates.
  std::vector<AddressedUpdate> propagate_update(const ParameterUpdate& update,
                                                const std::string& issuer) const;

  // --- event-driven routing (logs messages and decisions) ---

  void on_outcome(const ObserverOutcome& outcome);
  void on_token_terminal(TokenId token, const BinOutcome& outcome, int correct_bin, TimeMs t);

  // Harness reset between scenario entries; not part of the measured
  // protocol.
  void reset_speed(SpeedLevel s);

  SpeedLevel current_speed() const { return root_speed_; }
  const std::vector<MessageRecord>& message_log() const { return messages_; }
  const std::vector<Decision>& decision_log() const { return decisions_; }
  const std::vector<RmNode>& nodes() const { return nodes_; }

 private:
  struct L1TokenState {
    std::map<std::string, std::optional<DurationMs>> actuals;  // leaf id -> C_L
  };

  const RmTopology::Leaf* find_latency_leaf(const std::string& id) const;
  DurationMs leaf_bound(const RmTopology::Leaf& leaf, SpeedLevel s) const;
  void log_message(TimeMs t, const std::string& from, const std::string& to, FaultReport report);
  void log_update(TimeMs t, const std::string& to, const ParameterUpdate& update);
  void apply_updates(const std::vector<AddressedUpdate>& updates, TimeMs t);

  RmTopology topology_;
  std::vector<RmNode> nodes_;
  std::map<std::string, LatencyBound> leaf_bounds_;  // leaf id -> component bound
  LatencyBound l1_budget_;
  std::map<std::string, bool> parameterized_;

  SpeedLevel root_speed_;
  SpeedLevel l1_speed_;

  std::map<TokenId, L1TokenState> l1_state_;
  std::map<TokenId, std::vector<FaultReport>> root_batches_;
  std::map<TokenId, std::pair<BinOutcome, int>> terminal_;

  std::vector<MessageRecord> messages_;
  std::vector<Decision> decisions_;
  RmHooks hooks_;
};

}  // namespace sortline
