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

#include "sortline/rm.hpp"

#include <algorithm>

namespace sortline {

std::string_view fault_class_name(FaultClass c) {
  return c == FaultClass::Latency ? "latency" : "jitter";
}

std::string action_name(RmAction a, std::optional<SpeedLevel> speed) {
  switch (a) {
    case RmAction::NoAction: return "no-action";
    case RmAction::Absorb: return "absorb";
    case RmAction::Escalate: return "escalate";
    case RmAction::SetSpeed:
      return "set-speed:" + std::string(speed ? speed_name(*speed) : "?");
    case RmAction::HandOverToSystemControl: return "hand-over";
  }
  return "?";
}

RmTopology RmTopology::standard() {
  RmTopology t;
  t.latency_leaves = {{"CP", "C_CP", "rpi-cp"}, {"BS", "C_BS", "rpi-bs"}};
  t.jitter_leaf = {"EC", "C_EC", "rpi-ec"};
  t.l1_id = "LM";
  t.l1_contract = "C_LM";
  t.l1_host = "rpi-bs";
  t.root_id = "MC";
  t.root_contract = "C_MC";
  t.root_host = "rpi-mc";
  return t;
}

namespace {

const LatencyBound& first_bounded_deadline(const Contract& contract) {
  for (const GuaranteeClause& clause : contract.guarantee()) {
    if (clause.mode == ClauseMode::BoundedResponse) return *clause.deadline;
  }
  throw ConfigError("contract " + contract.name() + " has no bounded-response deadline");
}

}  // namespace

RmHierarchy::RmHierarchy(RmTopology topology, const ContractRegistry& registry,
                         SpeedLevel initial_speed, RmHooks hooks)
    : topology_(std::move(topology)),
      root_speed_(initial_speed),
      l1_speed_(initial_speed),
      hooks_(std::move(hooks)) {
  if (topology_.latency_leaves.empty()) {
    throw ConfigError("rm topology requires at least one latency leaf");
  }

  for (const auto& leaf : topology_.latency_leaves) {
    const Contract& c = registry.get(leaf.contract);
    leaf_bounds_.emplace(leaf.id, first_bounded_deadline(c));
    parameterized_[leaf.id] = c.has_param("M_S");
  }
  {
    const Contract& jc = registry.get(topology_.jitter_leaf.contract);
    parameterized_[topology_.jitter_leaf.id] = jc.has_param("M_S");
  }
  const Contract& l1c = registry.get(topology_.l1_contract);
  l1_budget_ = first_bounded_deadline(l1c);
  parameterized_[topology_.l1_id] = l1c.has_param("M_S");
  parameterized_[topology_.root_id] = registry.get(topology_.root_contract).has_param("M_S");

  // Node table: one root, every non-root with exactly one parent.
  RmNode root{topology_.root_id, RmLevel::Root, "", {topology_.l1_id, topology_.jitter_leaf.id},
              {topology_.root_contract}, topology_.root_host,
              parameterized_[topology_.root_id]};
  RmNode l1{topology_.l1_id, RmLevel::L1, topology_.root_id, {}, {topology_.l1_contract},
            topology_.l1_host, parameterized_[topology_.l1_id]};
  for (const auto& leaf : topology_.latency_leaves) {
    l1.children.push_back(leaf.id);
    nodes_.push_back(RmNode{leaf.id, RmLevel::Leaf, topology_.l1_id, {}, {leaf.contract},
                            leaf.host, parameterized_[leaf.id]});
  }
  nodes_.push_back(RmNode{topology_.jitter_leaf.id, RmLevel::Leaf, topology_.root_id, {},
                          {topology_.jitter_leaf.contract}, topology_.jitter_leaf.host,
                          parameterized_[topology_.jitter_leaf.id]});
  nodes_.push_back(std::move(l1));
  nodes_.push_back(std::move(root));
}

const RmTopology::Leaf* RmHierarchy::find_latency_leaf(const std::string& id) const {
  for (const auto& leaf : topology_.latency_leaves) {
    if (leaf.id == id) return &leaf;
  }
  return nullptr;
}

DurationMs RmHierarchy::leaf_bound(const RmTopology::Leaf& leaf, SpeedLevel s) const {
  return leaf_bounds_.at(leaf.id).at(s);
}

// ---------------------------------------------------------------------------
// Protocol steps
// ---------------------------------------------------------------------------

std::vector<FaultReport> RmHierarchy::leaf_on_violation(const std::string& leaf_id,
                                                        const ObserverOutcome& outcome) {
  const bool is_jitter = leaf_id == topology_.jitter_leaf.id;
  const RmTopology::Leaf* latency = find_latency_leaf(leaf_id);
  if (!is_jitter && !latency) throw RoutingError("unknown leaf manager: " + leaf_id);

  const std::string& owned =
      is_jitter ? topology_.jitter_leaf.contract : latency->contract;
  if (outcome.contract != owned) {
    throw RoutingError("outcome for contract " + outcome.contract +
                       " routed to leaf manager " + leaf_id + " owning " + owned);
  }
  if (outcome.verdict != Verdict::Violated) return {};

  FaultReport report;
  report.from = leaf_id;
  report.contract = outcome.contract;
  report.token = outcome.token.value_or(0);
  report.t = outcome.t;
  if (is_jitter) {
    report.fault_class = FaultClass::Jitter;
    // Local mitigation, no message: route the token to the temporary bin.
    if (hooks_.schedule_recovery) hooks_.schedule_recovery(report.token, outcome.t);
  } else {
    report.fault_class = FaultClass::Latency;
    report.observed_latency = outcome.observed_latency;
  }
  return {report};
}

RmHierarchy::L1Result RmHierarchy::l1_evaluate(std::span<const FaultReport> reports) {
  L1Result result;
  for (const FaultReport& report : reports) {
    const RmTopology::Leaf* leaf = find_latency_leaf(report.from);
    if (!leaf) throw RoutingError("latency manager received a report from non-child " +
                                  report.from);

    L1TokenState& state = l1_state_[report.token];
    state.actuals[report.from] = report.observed_latency;

    // Known actuals plus worst-case bounds for silent components. A report
    // without an actual latency (obligation never arrived) cannot be
    // absorbed; it enters as budget-exceeding.
    DurationMs total = 0;
    for (const auto& child : topology_.latency_leaves) {
      auto it = state.actuals.find(child.id);
      if (it == state.actuals.end()) {
        total += leaf_bound(child, l1_speed_);
      } else if (it->second) {
        total += *it->second;
      } else {
        total += l1_budget_.at(l1_speed_) + 1;
      }
    }

    Decision decision;
    decision.maker = topology_.l1_id;
    decision.t = report.t;
    decision.token = report.token;
    const DurationMs budget = l1_budget_.at(l1_speed_);
    if (total <= budget) {
      decision.action = RmAction::Absorb;
    } else {
      decision.action = RmAction::Escalate;
      FaultReport escalation;
      escalation.from = topology_.l1_id;
      escalation.contract = topology_.l1_contract;
      escalation.fault_class = FaultClass::Latency;
      escalation.violation_amount = total - budget;
      escalation.token = report.token;
      escalation.t = report.t;
      result.escalations.push_back(std::move(escalation));
    }
    result.decisions.push_back(std::move(decision));
  }
  return result;
}

std::optional<SpeedLevel> RmHierarchy::select_degraded_speed(DurationMs violation_ms,
                                                             SpeedLevel current,
                                                             const LatencyBound& budget) {
  const DurationMs needed = budget.at(current) + violation_ms;
  for (SpeedLevel s : kAllSpeeds) {
    if (speed_index(s) <= speed_index(current)) continue;
    if (budget.at(s) >= needed) return s;
  }
  return std::nullopt;
}

RmHierarchy::L2Result RmHierarchy::l2_decide(std::span<const FaultReport> reports,
                                             const BinOutcome& outcome, int correct_bin,
                                             TimeMs t) {
  if (outcome.kind == BinOutcome::Kind::Pending) {
    throw SequencingError("root decision requested before the bin outcome is terminal");
  }
  if (reports.empty()) {
    throw SequencingError("root decision requested with no fault reports");
  }

  L2Result result;
  result.decision.maker = topology_.root_id;
  result.decision.t = t;
  result.decision.token = reports.front().token;

  // The bin sensor check comes first: a token that landed where it belongs
  // closes the case regardless of what was reported.
  if (outcome.kind == BinOutcome::Kind::Binned && outcome.bin == correct_bin) {
    result.decision.action = RmAction::NoAction;
    return result;
  }

  const bool any_jitter = std::any_of(reports.begin(), reports.end(), [](const FaultReport& r) {
    return r.fault_class == FaultClass::Jitter;
  });

  std::optional<SpeedLevel> target;
  if (any_jitter) {
    // Unpredictable jitter: go straight to the slowest speed.
    target = SpeedLevel::S3;
  } else {
    DurationMs violation = 0;
    for (const FaultReport& r : reports) {
      violation = std::max(violation, r.violation_amount.value_or(0));
    }
    target = select_degraded_speed(violation, root_speed_, l1_budget_);
    if (!target) {
      result.decision.action = RmAction::HandOverToSystemControl;
      return result;
    }
  }

  result.decision.action = RmAction::SetSpeed;
  result.decision.speed = target;
  ParameterUpdate update{*target, t};
  result.updates = propagate_update(update, topology_.root_id);
  return result;
}

std::vector<AddressedUpdate> RmHierarchy::propagate_update(const ParameterUpdate& update,
                                                           const std::string& issuer) const {
  if (issuer != topology_.root_id) {
    throw RoutingError("parameter updates may only be issued by the root manager");
  }
  std::vector<AddressedUpdate> out;
  if (parameterized_.at(topology_.l1_id)) out.push_back({topology_.l1_id, update});
  for (const auto& leaf : topology_.latency_leaves) {
    if (parameterized_.at(leaf.id)) out.push_back({leaf.id, update});
  }
  if (parameterized_.at(topology_.jitter_leaf.id)) {
    out.push_back({topology_.jitter_leaf.id, update});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Routing and logging
// ---------------------------------------------------------------------------

void RmHierarchy::log_message(TimeMs t, const std::string& from, const std::string& to,
                              FaultReport report) {
  MessageRecord rec;
  rec.t = t;
  rec.from = from;
  rec.to = to;
  rec.kind = MessageKind::FaultReport;
  rec.report = std::move(report);
  messages_.push_back(std::move(rec));
}

void RmHierarchy::log_update(TimeMs t, const std::string& to, const ParameterUpdate& update) {
  MessageRecord rec;
  rec.t = t;
  rec.from = topology_.root_id;
  rec.to = to;
  rec.kind = MessageKind::ParameterUpdate;
  rec.update = update;
  messages_.push_back(std::move(rec));
}

void RmHierarchy::apply_updates(const std::vector<AddressedUpdate>& updates, TimeMs t) {
  for (const AddressedUpdate& u : updates) {
    log_update(t, u.to, u.update);
    if (u.to == topology_.l1_id) {
      l1_speed_ = u.update.value;
    } else if (hooks_.param_delivered) {
      hooks_.param_delivered(u.to, u.update.value, t);
    }
  }
}

void RmHierarchy::on_outcome(const ObserverOutcome& outcome) {
  if (outcome.verdict != Verdict::Violated) return;

  // Find the leaf manager owning the contract.
  std::string leaf_id;
  if (outcome.contract == topology_.jitter_leaf.contract) {
    leaf_id = topology_.jitter_leaf.id;
  } else {
    for (const auto& leaf : topology_.latency_leaves) {
      if (leaf.contract == outcome.contract) {
        leaf_id = leaf.id;
        break;
      }
    }
  }
  if (leaf_id.empty()) {
    throw RoutingError("no leaf manager owns contract " + outcome.contract);
  }

  const bool is_jitter = leaf_id == topology_.jitter_leaf.id;
  for (FaultReport& report : leaf_on_violation(leaf_id, outcome)) {
    if (is_jitter) {
      log_message(report.t, leaf_id, topology_.root_id, report);
      root_batches_[report.token].push_back(report);
      // A report arriving after the token's terminal outcome still gets a
      // root decision of its own.
      if (auto it = terminal_.find(report.token); it != terminal_.end()) {
        on_token_terminal(report.token, it->second.first, it->second.second, report.t);
      }
    } else {
      log_message(report.t, leaf_id, topology_.l1_id, report);
      const std::size_t report_index = messages_.size() - 1;
      L1Result r = l1_evaluate(std::span(&report, 1));
      for (Decision& d : r.decisions) decisions_.push_back(d);
      for (FaultReport& esc : r.escalations) {
        // Scenario-origin accounting attributes the fault to the escalating
        // manager, not the underlying leaf hop.
        messages_[report_index].counted_scenario_origin = false;
        log_message(esc.t, topology_.l1_id, topology_.root_id, esc);
        root_batches_[esc.token].push_back(esc);
        if (auto it = terminal_.find(esc.token); it != terminal_.end()) {
          on_token_terminal(esc.token, it->second.first, it->second.second, esc.t);
        }
      }
    }
  }
}

void RmHierarchy::on_token_terminal(TokenId token, const BinOutcome& outcome, int correct_bin,
                                    TimeMs t) {
  terminal_[token] = {outcome, correct_bin};
  auto it = root_batches_.find(token);
  if (it == root_batches_.end() || it->second.empty()) return;

  std::vector<FaultReport> batch = std::move(it->second);
  root_batches_.erase(it);

  L2Result result = l2_decide(batch, outcome, correct_bin, t);
  decisions_.push_back(result.decision);
  if (result.decision.action == RmAction::SetSpeed) {
    root_speed_ = *result.decision.speed;
    if (hooks_.set_speed) hooks_.set_speed(*result.decision.speed, t);
    apply_updates(result.updates, t);
  }
}

void RmHierarchy::reset_speed(SpeedLevel s) {
  root_speed_ = s;
  l1_speed_ = s;
}

}  // namespace sortline
