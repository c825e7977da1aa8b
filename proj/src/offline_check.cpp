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

// Batch re-evaluation of guarantee clauses by direct trace scanning. This is
// the independent oracle for the incremental Observer: it shares the clause
// semantics but none of the state-machine plumbing, re-deriving every verdict
// from scratch per (clause, token) pair.

#include <algorithm>
#include <set>

#include "sortline/observer.hpp"

namespace sortline {

namespace {

Value scan_default(Signal s) {
  switch (kind_of(s)) {
    case SignalKind::Edge: return false;
    case SignalKind::Step: return std::int64_t{0};
    default: return std::monostate{};
  }
}

// Signal store for a single token's viewpoint: the token's own values shadow
// globally published ones.
struct ScanStore {
  std::map<Signal, Value> global;
  std::map<Signal, Value> token;

  Value read(Signal s) const {
    if (auto it = token.find(s); it != token.end()) return it->second;
    if (auto it = global.find(s); it != global.end()) return it->second;
    return scan_default(s);
  }
};

bool eval_in(const ScanStore& store, const PredPtr& pred, SpeedLevel speed) {
  Environment env;
  for (Signal s : signals_of(pred)) env.bind(s, store.read(s));
  env.bind_speed(speed);
  return eval_predicate(pred, env);
}

bool eval_defaults(const PredPtr& pred, SpeedLevel speed) {
  Environment env;
  for (Signal s : signals_of(pred)) env.bind(s, scan_default(s));
  env.bind_speed(speed);
  return eval_predicate(pred, env);
}

bool pure_edge(const PredPtr& p) { return p && p->kind() == Predicate::Kind::RisingEdge; }

ObserverOutcome base_outcome(const Contract& contract, std::size_t clause, TokenId token,
                             TimeMs t) {
  ObserverOutcome o;
  o.contract = contract.name();
  o.clause_index = clause;
  o.token = token;
  o.t = t;
  return o;
}

void scan_bounded(const Contract& contract, std::size_t clause_index, TokenId tid,
                  std::span<const ObserverInput> trace, const ParamTimeline& params,
                  std::vector<ObserverOutcome>& out) {
  const GuaranteeClause& clause = contract.guarantee()[clause_index];
  const bool edge_trigger = pure_edge(clause.trigger);
  const Signal trigger_signal = edge_trigger ? clause.trigger->edge_signal() : Signal::Ls1;

  ScanStore store;
  bool logic_active = false;
  bool prev_trigger = edge_trigger ? false : eval_defaults(clause.trigger, params.initial);
  bool armed = false;
  TimeMs trigger_t = 0, deadline_at = 0;
  DurationMs deadline_ms = 0;

  for (const ObserverInput& input : trace) {
    if (const auto* e = std::get_if<Event>(&input)) {
      const bool is_edge = kind_of(e->signal) == SignalKind::Edge;
      const bool mine = e->token && *e->token == tid;
      if (!is_edge) {
        if (mine) {
          store.token[e->signal] = e->value;
        } else if (!e->token) {
          store.global[e->signal] = e->value;
        }
      }
      if (mine && !logic_active) logic_active = true;
      if (!logic_active) continue;
      // Events of other tokens cannot affect this token's clause state.
      if (e->token && !mine) continue;

      const SpeedLevel speed_now = params.at(e->t);

      if (armed && !is_edge && eval_in(store, clause.obligation, speed_now)) {
        ObserverOutcome o = base_outcome(contract, clause_index, tid, e->t);
        o.observed_latency = e->t - trigger_t;
        if (e->t <= deadline_at) {
          o.verdict = Verdict::Satisfied;
        } else {
          o.verdict = Verdict::Violated;
          o.violation_kind = ViolationKind::DeadlineExceeded;
          o.excess = *o.observed_latency - deadline_ms;
        }
        out.push_back(std::move(o));
        armed = false;
      }

      bool fire = false;
      if (edge_trigger) {
        fire = is_edge && e->signal == trigger_signal && mine;
      } else if (!is_edge) {
        bool cur = eval_in(store, clause.trigger, speed_now);
        fire = !prev_trigger && cur;
        prev_trigger = cur;
      }
      if (fire && !armed) {
        armed = true;
        trigger_t = e->t;
        deadline_ms = clause.deadline->at(params.at(e->t));
        deadline_at = e->t + deadline_ms;
        if (eval_in(store, clause.obligation, speed_now)) {
          ObserverOutcome o = base_outcome(contract, clause_index, tid, e->t);
          o.verdict = Verdict::Satisfied;
          o.observed_latency = 0;
          out.push_back(std::move(o));
          armed = false;
        }
      }
    } else if (const auto* end = std::get_if<TraceEnd>(&input)) {
      if (armed && deadline_at < end->t) {
        ObserverOutcome o = base_outcome(contract, clause_index, tid, end->t);
        o.verdict = Verdict::Violated;
        o.violation_kind = ViolationKind::DeadlineExceeded;
        out.push_back(std::move(o));
        armed = false;
      }
    }
  }
}

void scan_biconditional(const Contract& contract, std::size_t clause_index, TokenId tid,
                        std::span<const ObserverInput> trace, const ParamTimeline& params,
                        std::vector<ObserverOutcome>& out) {
  const GuaranteeClause& clause = contract.guarantee()[clause_index];
  const Signal trigger_signal = clause.trigger->edge_signal();

  ScanStore store;
  bool logic_active = false;
  bool prev_obligation = eval_defaults(clause.obligation, params.initial);
  bool resolved = false;

  for (const ObserverInput& input : trace) {
    const auto* e = std::get_if<Event>(&input);
    if (!e) continue;
    const bool is_edge = kind_of(e->signal) == SignalKind::Edge;
    const bool mine = e->token && *e->token == tid;
    if (!is_edge) {
      if (mine) {
        store.token[e->signal] = e->value;
      } else if (!e->token) {
        store.global[e->signal] = e->value;
      }
    }
    if (mine && !logic_active) logic_active = true;
    if (!logic_active) continue;
    if (e->token && !mine) continue;

    const SpeedLevel speed_now = params.at(e->t);

    if (is_edge && e->signal == trigger_signal && mine) {
      if (!resolved) {
        ObserverOutcome o = base_outcome(contract, clause_index, tid, e->t);
        if (eval_in(store, clause.obligation, speed_now)) {
          o.verdict = Verdict::Satisfied;
        } else {
          o.verdict = Verdict::Violated;
          o.violation_kind = ViolationKind::UnexpectedTrigger;
        }
        out.push_back(std::move(o));
        resolved = true;
      }
    } else if (!is_edge) {
      bool cur = eval_in(store, clause.obligation, speed_now);
      if (prev_obligation && !cur && !resolved) {
        ObserverOutcome o = base_outcome(contract, clause_index, tid, e->t);
        o.verdict = Verdict::Violated;
        o.violation_kind = ViolationKind::MissingTrigger;
        out.push_back(std::move(o));
        resolved = true;
      }
      prev_obligation = cur;
    }
  }
}

}  // namespace

std::vector<ObserverOutcome> offline_check(const Contract& contract,
                                           std::span<const ObserverInput> trace,
                                           const ParamTimeline& params) {
  TimeMs last = 0;
  bool any = false;
  for (const ObserverInput& input : trace) {
    TimeMs t = input_time(input);
    if (any && t < last) {
      throw TraceError("offline trace out of order at t=" + std::to_string(t));
    }
    any = true;
    last = t;
  }

  std::set<TokenId> tokens;
  for (const ObserverInput& input : trace) {
    if (const auto* e = std::get_if<Event>(&input)) {
      if (e->token) tokens.insert(*e->token);
    }
  }

  std::vector<ObserverOutcome> out;
  for (std::size_t ci = 0; ci < contract.guarantee().size(); ++ci) {
    const GuaranteeClause& clause = contract.guarantee()[ci];
    for (TokenId tid : tokens) {
      if (clause.mode == ClauseMode::BoundedResponse) {
        scan_bounded(contract, ci, tid, trace, params, out);
      } else {
        scan_biconditional(contract, ci, tid, trace, params, out);
      }
    }
  }
  return out;
}

}  // namespace sortline
