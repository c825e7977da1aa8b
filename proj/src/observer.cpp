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

#include "sortline/observer.hpp"

#include <algorithm>
#include <sstream>
#include <tuple>

namespace sortline {

TimeMs input_time(const ObserverInput& input) {
  return std::visit([](const auto& v) { return v.t; }, input);
}

std::string_view verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Satisfied: return "satisfied";
    case Verdict::Violated: return "violated";
    case Verdict::Pending: return "pending";
  }
  return "?";
}

std::string_view violation_kind_name(ViolationKind k) {
  switch (k) {
    case ViolationKind::DeadlineExceeded: return "deadline-exceeded";
    case ViolationKind::MissingTrigger: return "missing-trigger";
    case ViolationKind::UnexpectedTrigger: return "unexpected-trigger";
  }
  return "?";
}

bool ObserverOutcome::operator==(const ObserverOutcome& other) const {
  return contract == other.contract && clause_index == other.clause_index &&
         verdict == other.verdict && observed_latency == other.observed_latency &&
         violation_kind == other.violation_kind && excess == other.excess &&
         token == other.token && t == other.t;
}

std::string ObserverOutcome::to_string() const {
  std::ostringstream os;
  os << contract << "#" << clause_index << " " << verdict_name(verdict) << " t=" << t;
  if (token) os << " token=" << *token;
  if (violation_kind) os << " kind=" << violation_kind_name(*violation_kind);
  if (observed_latency) os << " C_L=" << *observed_latency;
  if (excess) os << " excess=" << *excess;
  return os.str();
}

void sort_outcomes(std::vector<ObserverOutcome>& outcomes) {
  std::sort(outcomes.begin(), outcomes.end(),
            [](const ObserverOutcome& a, const ObserverOutcome& b) {
              auto key = [](const ObserverOutcome& o) {
                return std::tuple(o.t, o.clause_index, o.token.value_or(0),
                                  static_cast<int>(o.verdict),
                                  o.observed_latency.value_or(-1));
              };
              return key(a) < key(b);
            });
}

// ---------------------------------------------------------------------------
// Compilation checks
// ---------------------------------------------------------------------------

namespace {

bool contains_edge_atom(const PredPtr& p) {
  if (!p) return false;
  switch (p->kind()) {
    case Predicate::Kind::RisingEdge: return true;
    case Predicate::Kind::True:
    case Predicate::Kind::Eq:
    case Predicate::Kind::Neq: return false;
    default: return contains_edge_atom(p->left()) || contains_edge_atom(p->right());
  }
}

bool is_pure_edge(const PredPtr& p) { return p && p->kind() == Predicate::Kind::RisingEdge; }

Value default_value(Signal s) {
  switch (kind_of(s)) {
    case SignalKind::Edge: return false;
    case SignalKind::Step: return std::int64_t{0};
    default: return std::monostate{};
  }
}

}  // namespace

Observer compile_observer(const Contract& contract, SpeedLevel initial_speed) {
  for (const GuaranteeClause& clause : contract.guarantee()) {
    if (contains_edge_atom(clause.obligation)) {
      throw ConfigError("contract " + contract.name() +
                        ": observer obligations cannot contain edge atoms: " + clause.to_string());
    }
    if (contains_edge_atom(clause.trigger) && !is_pure_edge(clause.trigger)) {
      throw ConfigError("contract " + contract.name() +
                        ": observer triggers must be a plain edge or edge-free: " +
                        clause.to_string());
    }
    if (clause.mode == ClauseMode::Biconditional && !is_pure_edge(clause.trigger)) {
      throw ConfigError("contract " + contract.name() +
                        ": biconditional triggers must be a plain edge: " + clause.to_string());
    }
  }
  return Observer(contract, initial_speed);
}

// ---------------------------------------------------------------------------
// Observer
// ---------------------------------------------------------------------------

Observer::Observer(Contract contract, SpeedLevel initial_speed)
    : contract_(std::move(contract)), speed_(initial_speed) {
  clauses_.resize(contract_.guarantee().size());
  for (std::size_t i = 0; i < clauses_.size(); ++i) {
    const GuaranteeClause& clause = contract_.guarantee()[i];
    ClauseRuntime& rt = clauses_[i];
    rt.edge_trigger = is_pure_edge(clause.trigger);
    if (rt.edge_trigger) rt.trigger_signal = clause.trigger->edge_signal();
    // Default-environment truth values seed the transition tracking for
    // tokens the observer has not seen yet.
    Environment defaults;
    for (Signal s : signals_of(clause.trigger)) defaults.bind(s, default_value(s));
    defaults.bind_speed(speed_);
    rt.default_trigger = rt.edge_trigger ? false : eval_predicate(clause.trigger, defaults);
    Environment ob_defaults;
    for (Signal s : signals_of(clause.obligation)) ob_defaults.bind(s, default_value(s));
    ob_defaults.bind_speed(speed_);
    rt.default_obligation = eval_predicate(clause.obligation, ob_defaults);
  }
}

void Observer::set_speed(SpeedLevel s) { speed_ = s; }

Value Observer::read_value(std::optional<TokenId> token, Signal s) const {
  if (token) {
    auto tit = token_values_.find(*token);
    if (tit != token_values_.end()) {
      auto vit = tit->second.find(s);
      if (vit != tit->second.end()) return vit->second;
    }
  }
  auto git = global_values_.find(s);
  if (git != global_values_.end()) return git->second;
  return default_value(s);
}

Environment Observer::build_env(std::optional<TokenId> token, const PredPtr& pred) const {
  Environment env;
  for (Signal s : signals_of(pred)) env.bind(s, read_value(token, s));
  env.bind_speed(speed_);
  return env;
}

bool Observer::eval_for(std::optional<TokenId> token, const PredPtr& pred) const {
  return eval_predicate(pred, build_env(token, pred));
}

ObserverOutcome Observer::make_outcome(std::size_t clause, TokenId token, TimeMs t) const {
  ObserverOutcome o;
  o.contract = contract_.name();
  o.clause_index = clause;
  o.token = token;
  o.t = t;
  return o;
}

std::vector<ObserverOutcome> Observer::observe(const ObserverInput& input) {
  if (finished_) throw TraceError("observer received input after trace end");
  const TimeMs t = input_time(input);
  if (any_input_ && t < last_t_) {
    throw TraceError("out-of-order trace input at t=" + std::to_string(t) +
                     " after t=" + std::to_string(last_t_));
  }
  any_input_ = true;
  last_t_ = t;

  std::vector<ObserverOutcome> out;
  if (const auto* e = std::get_if<Event>(&input)) {
    handle_event(*e, out);
  } else if (const auto* end = std::get_if<TraceEnd>(&input)) {
    resolve_expired(end->t, out);
    finished_ = true;
  }
  // Token departures advance the clock only: in-flight component jobs still
  // complete, and their late obligations must surface the true latency.
  return out;
}

void Observer::handle_event(const Event& e, std::vector<ObserverOutcome>& out) {
  const bool is_edge = kind_of(e.signal) == SignalKind::Edge;

  // Edge events are instantaneous and never stored; value events update the
  // per-token or global state.
  if (!is_edge) {
    if (e.token) {
      token_values_[*e.token][e.signal] = e.value;
    } else {
      global_values_[e.signal] = e.value;
    }
  }
  if (e.token) known_tokens_.insert(*e.token);

  // Tokens whose clause state can be affected by this event.
  std::vector<TokenId> affected;
  if (e.token) {
    affected.push_back(*e.token);
  } else {
    affected.assign(known_tokens_.begin(), known_tokens_.end());
  }

  for (std::size_t ci = 0; ci < clauses_.size(); ++ci) {
    const GuaranteeClause& clause = contract_.guarantee()[ci];
    ClauseRuntime& rt = clauses_[ci];

    if (clause.mode == ClauseMode::BoundedResponse) {
      for (TokenId token : affected) {
        auto [it, inserted] = rt.bounded.try_emplace(token);
        BoundedState& st = it->second;
        if (inserted) st.prev_trigger = rt.default_trigger;

        // Obligation first: an armed activation resolves before any re-arm.
        if (st.armed && !is_edge && eval_for(token, clause.obligation)) {
          ObserverOutcome o = make_outcome(ci, token, e.t);
          o.observed_latency = e.t - st.trigger_t;
          if (e.t <= st.deadline_at) {
            o.verdict = Verdict::Satisfied;
          } else {
            o.verdict = Verdict::Violated;
            o.violation_kind = ViolationKind::DeadlineExceeded;
            o.excess = *o.observed_latency - st.deadline_ms;
          }
          out.push_back(std::move(o));
          st.armed = false;
        }

        // Trigger detection.
        bool fire = false;
        if (rt.edge_trigger) {
          fire = is_edge && e.signal == rt.trigger_signal && e.token && *e.token == token;
        } else if (!is_edge) {
          bool cur = eval_for(token, clause.trigger);
          fire = !st.prev_trigger && cur;
          st.prev_trigger = cur;
        }
        if (fire && !st.armed) {
          st.armed = true;
          st.trigger_t = e.t;
          st.deadline_ms = clause.deadline->at(speed_);
          st.deadline_at = e.t + st.deadline_ms;
          // An obligation already holding at the trigger satisfies instantly.
          if (eval_for(token, clause.obligation)) {
            ObserverOutcome o = make_outcome(ci, token, e.t);
            o.verdict = Verdict::Satisfied;
            o.observed_latency = 0;
            out.push_back(std::move(o));
            st.armed = false;
          }
        }
      }
    } else {  // Biconditional
      for (TokenId token : affected) {
        auto [it, inserted] = rt.biconditional.try_emplace(token);
        BiconditionalState& st = it->second;
        if (inserted) st.prev_obligation = rt.default_obligation;

        if (is_edge && e.signal == rt.trigger_signal && e.token && *e.token == token) {
          if (!st.resolved) {
            bool ob = eval_for(token, clause.obligation);
            ObserverOutcome o = make_outcome(ci, token, e.t);
            if (ob) {
              o.verdict = Verdict::Satisfied;
            } else {
              o.verdict = Verdict::Violated;
              o.violation_kind = ViolationKind::UnexpectedTrigger;
            }
            out.push_back(std::move(o));
            st.resolved = true;
          }
        } else if (!is_edge) {
          bool cur = eval_for(token, clause.obligation);
          if (st.prev_obligation && !cur && !st.resolved) {
            // The obligation window closed without its trigger.
            ObserverOutcome o = make_outcome(ci, token, e.t);
            o.verdict = Verdict::Violated;
            o.violation_kind = ViolationKind::MissingTrigger;
            out.push_back(std::move(o));
            st.resolved = true;
          }
          st.prev_obligation = cur;
        }
      }
    }
  }
}

void Observer::resolve_expired(TimeMs t, std::vector<ObserverOutcome>& out) {
  for (std::size_t ci = 0; ci < clauses_.size(); ++ci) {
    ClauseRuntime& rt = clauses_[ci];
    for (auto& [token, st] : rt.bounded) {
      if (st.armed && st.deadline_at < t) {
        ObserverOutcome o = make_outcome(ci, token, t);
        o.verdict = Verdict::Violated;
        o.violation_kind = ViolationKind::DeadlineExceeded;
        out.push_back(std::move(o));
        st.armed = false;
      }
    }
  }
}

// ---------------------------------------------------------------------------
// Parameter timeline
// ---------------------------------------------------------------------------

SpeedLevel ParamTimeline::at(TimeMs t) const {
  SpeedLevel s = initial;
  for (const auto& [when, value] : changes) {
    if (when > t) break;
    s = value;
  }
  return s;
}

}  // namespace sortline
