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

#include <map>
#include <set>
#include <span>
#include <vector>

#include "sortline/contracts.hpp"
#include "sortline/types.hpp"

namespace sortline {

// Runtime observers: each contract compiles into one timed state machine per
// guarantee clause. Observers consume the plant event trace and emit
// satisfied/violated verdicts together with the actual latency C_L.

// ---------------------------------------------------------------------------
// Trace inputs
// ---------------------------------------------------------------------------

struct Event {
  TimeMs t = 0;
  std::uint64_t seq = 0;  // stable tie-breaker within one timestamp
  Signal signal = Signal::Ls1;
  Value value;
  std::optional<TokenId> token;
};

// A token reached its terminal state (binned or ran off the belt). Observers
// pass it through untouched — component jobs outlive the token, and a late
// obligation must still surface the true latency — but the manager layer uses
// it to close out the token's recovery decision.
struct TokenDeparture {
  TimeMs t = 0;
  TokenId token = 0;
};

struct TraceEnd {
  TimeMs t = 0;
};

using ObserverInput = std::variant<Event, TokenDeparture, TraceEnd>;

TimeMs input_time(const ObserverInput& input);

// ---------------------------------------------------------------------------
// Outcomes
// ---------------------------------------------------------------------------

enum class Verdict : std::uint8_t { Satisfied, Violated, Pending };

enum class ViolationKind : std::uint8_t { DeadlineExceeded, MissingTrigger, UnexpectedTrigger };

std::string_view verdict_name(Verdict v);
std::string_view violation_kind_name(ViolationKind k);

struct ObserverOutcome {
  std::string contract;
  std::size_t clause_index = 0;
  Verdict verdict = Verdict::Pending;
  std::optional<DurationMs> observed_latency;  // C_L
  std::optional<ViolationKind> violation_kind;
  std::optional<DurationMs> excess;  // observed_latency - deadline(M_S)
  std::optional<TokenId> token;
  TimeMs t = 0;

  bool operator==(const ObserverOutcome& other) const;
  std::string to_string() const;
};

// Canonical ordering for outcome-list comparison.
void sort_outcomes(std::vector<ObserverOutcome>& outcomes);

// ---------------------------------------------------------------------------
// Incremental observer
// ---------------------------------------------------------------------------

// Per-clause timed state machine semantics:
//
//  - Bounded response: the clause arms when its trigger becomes true (an edge
//    event, or a false-to-true transition of an edge-free condition) and
//    resolves exactly once per activation. The obligation arriving at or
//    before trigger_time + deadline(M_S) yields Satisfied with
//    C_L = arrival - trigger_time; arriving later yields
//    Violated{DeadlineExceeded} at the arrival with the true C_L and its
//    excess. An obligation that never arrives is declared violated at trace
//    end, once the deadline has expired, with no latency attached. While
//    armed, further triggers are ignored; a condition trigger must fall back
//    to false before it can re-arm.
//
//  - Biconditional: evaluated at belt-step granularity, one activation per
//    token. The trigger edge during a step where the obligation holds yields
//    Satisfied; during any other step Violated{UnexpectedTrigger}; the
//    obligation window closing without a trigger yields
//    Violated{MissingTrigger}.
//
// Unseen signals read as their defaults (step counts 0, enum values null).
// Parameter updates apply to activations armed after the update, never
// retroactively. Activations are keyed by the token id carried on plant
// events, so concurrent tokens are monitored independently.
class Observer {
 public:
  Observer(Contract contract, SpeedLevel initial_speed);

  // Feed one trace input; events must arrive in non-decreasing time order.
  std::vector<ObserverOutcome> observe(const ObserverInput& input);

  // Update the M_S parameter (takes effect for future activations).
  void set_speed(SpeedLevel s);

  const Contract& contract() const { return contract_; }
  SpeedLevel speed() const { return speed_; }

 private:
  struct BoundedState {
    bool prev_trigger = false;
    bool armed = false;
    TimeMs trigger_t = 0;
    TimeMs deadline_at = 0;
    DurationMs deadline_ms = 0;
  };

  struct BiconditionalState {
    bool resolved = false;
    bool prev_obligation = false;
  };

  struct ClauseRuntime {
    bool edge_trigger = false;
    Signal trigger_signal = Signal::Ls1;
    bool default_trigger = false;
    bool default_obligation = false;
    std::map<TokenId, BoundedState> bounded;
    std::map<TokenId, BiconditionalState> biconditional;
  };

  Value read_value(std::optional<TokenId> token, Signal s) const;
  Environment build_env(std::optional<TokenId> token, const PredPtr& pred) const;
  bool eval_for(std::optional<TokenId> token, const PredPtr& pred) const;

  void handle_event(const Event& e, std::vector<ObserverOutcome>& out);
  void resolve_expired(TimeMs t, std::vector<ObserverOutcome>& out);

  ObserverOutcome make_outcome(std::size_t clause, TokenId token, TimeMs t) const;

  Contract contract_;
  SpeedLevel speed_;
  std::vector<ClauseRuntime> clauses_;
  std::map<Signal, Value> global_values_;
  std::map<TokenId, std::map<Signal, Value>> token_values_;
  std::set<TokenId> known_tokens_;
  TimeMs last_t_ = 0;
  bool any_input_ = false;
  bool finished_ = false;
};

// Compiles a contract into an observer. Rejects clause shapes the runtime
// cannot monitor: triggers mixing edges into larger formulas, obligations
// containing edge atoms, and biconditional clauses whose trigger is not a
// plain edge.
Observer compile_observer(const Contract& contract, SpeedLevel initial_speed = SpeedLevel::S1);

// ---------------------------------------------------------------------------
// Batch oracle
// ---------------------------------------------------------------------------

// Timed motor-speed parameter values for offline replay.
struct ParamTimeline {
  SpeedLevel initial = SpeedLevel::S1;
  std::vector<std::pair<TimeMs, SpeedLevel>> changes;  // sorted by time

  SpeedLevel at(TimeMs t) const;
};

// Evaluates every guarantee clause over the complete trace by direct scanning,
// with no incremental state machines. Produces the same outcome list contract
// as Observer::observe and serves as its independent test oracle.
std::vector<ObserverOutcome> offline_check(const Contract& contract,
                                           std::span<const ObserverInput> trace,
                                           const ParamTimeline& params);

}  // namespace sortline
