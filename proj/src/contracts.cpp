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

#include "sortline/contracts.hpp"

#include <algorithm>
#include <sstream>

namespace sortline {

// ---------------------------------------------------------------------------
// Clause and contract construction
// ---------------------------------------------------------------------------

void GuaranteeClause::validate() const {
  if (!trigger || !obligation) throw ConfigError("guarantee clause missing trigger/obligation");
  if (mode == ClauseMode::BoundedResponse && !deadline) {
    throw ConfigError("bounded-response clause requires a deadline: " + to_string());
  }
  if (mode == ClauseMode::Biconditional && deadline) {
    throw ConfigError("biconditional clause cannot carry a deadline: " + to_string());
  }
}

std::string GuaranteeClause::to_string() const {
  std::ostringstream os;
  os << trigger->to_string();
  os << (mode == ClauseMode::BoundedResponse ? " => " : " <=> ");
  os << obligation->to_string();
  if (deadline) os << " within " << deadline->name() << "(M_S)";
  return os.str();
}

Contract::Contract(std::string name, std::set<Signal> inputs, std::set<Signal> outputs,
                   std::set<std::string> params, PredPtr assumptions,
                   std::vector<GuaranteeClause> guarantee, std::set<Signal> hidden)
    : name_(std::move(name)),
      inputs_(std::move(inputs)),
      outputs_(std::move(outputs)),
      params_(std::move(params)),
      assumptions_(assumptions ? std::move(assumptions) : Predicate::truth()),
      guarantee_(std::move(guarantee)),
      hidden_(std::move(hidden)) {
  for (Signal s : inputs_) {
    if (outputs_.count(s)) {
      throw ConfigError("contract " + name_ + ": signal " + std::string(wire_name(s)) +
                        " is both input and output");
    }
  }
  auto check_scope = [this](const PredPtr& p, const char* where) {
    for (Signal s : signals_of(p)) {
      if (!inputs_.count(s) && !outputs_.count(s) && !hidden_.count(s)) {
        throw ConfigError("contract " + name_ + ": " + where + " references signal " +
                          std::string(wire_name(s)) + " outside its interface");
      }
    }
    if (references_speed(p) && !params_.count("M_S")) {
      throw ConfigError("contract " + name_ + ": " + where +
                        " references M_S but the contract has no such parameter");
    }
  };
  check_scope(assumptions_, "assumptions");
  for (const GuaranteeClause& clause : guarantee_) {
    clause.validate();
    check_scope(clause.trigger, "guarantee");
    check_scope(clause.obligation, "guarantee");
  }
}

// ---------------------------------------------------------------------------
// Refinement
// ---------------------------------------------------------------------------

std::string GuaranteeCounterexample::to_string() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::UnmatchedClause:
      os << "no clause matches [" << super_clause << "]";
      break;
    case Kind::DeadlineExceeded:
      os << "deadline at " << speed_name(speed.value_or(SpeedLevel::S1)) << ": " << sub_deadline_ms
         << " > " << super_deadline_ms << " for [" << super_clause << "]";
      break;
    case Kind::ObligationGap:
      os << "obligation of [" << (sub_clause ? *sub_clause : "?") << "] does not imply ["
         << super_clause << "]";
      if (environment) os << " at " << *environment;
      break;
  }
  return os.str();
}

namespace {

struct MatchResult {
  bool matched = false;
  bool deadline_only_failure = false;
  SpeedLevel failing_speed = SpeedLevel::S1;
  DurationMs sub_ms = 0, super_ms = 0;
};

MatchResult match_clause(const GuaranteeClause& sub, const GuaranteeClause& super) {
  MatchResult r;
  if (sub.mode != super.mode) return r;
  if (!equivalent(sub.trigger, super.trigger)) return r;
  if (!implies(sub.obligation, super.obligation)) return r;
  if (sub.mode == ClauseMode::BoundedResponse) {
    for (SpeedLevel s : kAllSpeeds) {
      if (sub.deadline->at(s) > super.deadline->at(s)) {
        r.deadline_only_failure = true;
        r.failing_speed = s;
        r.sub_ms = sub.deadline->at(s);
        r.super_ms = super.deadline->at(s);
        return r;
      }
    }
  }
  r.matched = true;
  return r;
}

}  // namespace

RefinementReport check_refinement(const Contract& sub, const Contract& super) {
  RefinementReport report;

  // Sub may assume no more than super: super's assumptions imply sub's.
  report.assumption_counterexamples =
      implication_counterexamples(super.assumptions(), sub.assumptions());

  // Every super clause must be matched by some sub clause.
  for (const GuaranteeClause& sc : super.guarantee()) {
    bool matched = false;
    std::optional<GuaranteeCounterexample> best;
    for (const GuaranteeClause& cand : sub.guarantee()) {
      MatchResult m = match_clause(cand, sc);
      if (m.matched) {
        matched = true;
        break;
      }
      if (m.deadline_only_failure && !best) {
        GuaranteeCounterexample ce;
        ce.kind = GuaranteeCounterexample::Kind::DeadlineExceeded;
        ce.super_clause = sc.to_string();
        ce.sub_clause = cand.to_string();
        ce.speed = m.failing_speed;
        ce.sub_deadline_ms = m.sub_ms;
        ce.super_deadline_ms = m.super_ms;
        best = ce;
      }
    }
    if (!matched) {
      if (best) {
        report.guarantee_counterexamples.push_back(*best);
      } else {
        GuaranteeCounterexample ce;
        ce.kind = GuaranteeCounterexample::Kind::UnmatchedClause;
        ce.super_clause = sc.to_string();
        report.guarantee_counterexamples.push_back(ce);
      }
    }
  }

  report.holds = report.assumption_counterexamples.empty() &&
                 report.guarantee_counterexamples.empty();
  return report;
}

// ---------------------------------------------------------------------------
// Composition
// ---------------------------------------------------------------------------

namespace {

std::set<Signal> set_union(const std::set<Signal>& a, const std::set<Signal>& b) {
  std::set<Signal> out = a;
  out.insert(b.begin(), b.end());
  return out;
}

std::set<Signal> set_minus(const std::set<Signal>& a, const std::set<Signal>& b) {
  std::set<Signal> out;
  for (Signal s : a) {
    if (!b.count(s)) out.insert(s);
  }
  return out;
}

std::set<Signal> set_intersect(const std::set<Signal>& a, const std::set<Signal>& b) {
  std::set<Signal> out;
  for (Signal s : a) {
    if (b.count(s)) out.insert(s);
  }
  return out;
}

// Guarantee of a contract flattened into one predicate: the conjunction of
// trigger=>obligation (or <=> for biconditional clauses). Used only for the
// assumption-interdependence rule.
PredPtr guarantee_as_predicate(const Contract& c) {
  PredPtr acc = Predicate::truth();
  for (const GuaranteeClause& clause : c.guarantee()) {
    PredPtr one = clause.mode == ClauseMode::BoundedResponse
                      ? Predicate::implies(clause.trigger, clause.obligation)
                      : Predicate::iff(clause.trigger, clause.obligation);
    acc = Predicate::p_and(acc, one);
  }
  return acc;
}

// Rebuild a Boolean function as a DNF predicate over the given universe.
// Used when the weakest-assumption rule produces a predicate with no simpler
// syntactic form.
PredPtr materialize_dnf(const AtomUniverse& universe,
                        const std::vector<EnumeratedEnv>& envs,
                        const std::vector<bool>& truth) {
  bool all_true = true, any_true = false;
  for (bool t : truth) {
    all_true = all_true && t;
    any_true = any_true || t;
  }
  if (all_true) return Predicate::truth();
  if (!any_true) {
    // Unsatisfiable; callers reject this case before materializing.
    PredPtr t = Predicate::truth();
    return Predicate::p_not(t);
  }

  PredPtr result;
  for (std::size_t i = 0; i < envs.size(); ++i) {
    if (!truth[i]) continue;
    const EnumeratedEnv& e = envs[i];
    PredPtr minterm = Predicate::truth();
    auto add = [&minterm](PredPtr lit) { minterm = Predicate::p_and(minterm, lit); };
    for (Signal s : universe.edge_signals) {
      bool v = std::get<bool>(e.env.signals.at(s));
      PredPtr atom = Predicate::rising(s);
      add(v ? atom : Predicate::p_not(atom));
    }
    for (Signal s : universe.enum_signals) {
      const Value& v = e.env.signals.at(s);
      Term lit = std::holds_alternative<std::monostate>(v) ? Term::null_lit()
                 : kind_of(s) == SignalKind::ColourValue
                     ? Term::colour_lit(std::get<Colour>(v))
                     : Term::ejector_lit(std::get<Ejector>(v));
      add(Predicate::eq(Term::signal_ref(s), lit));
    }
    if (universe.uses_speed) {
      add(Predicate::eq(Term::speed_param(), Term::speed_lit(*e.env.speed)));
    }
    // Opaque numeric atoms cannot be re-expressed without their original term
    // structure; the weakest-assumption rule is only entered for predicates
    // over enumerable domains, which covers the registry.
    result = result ? Predicate::p_or(result, minterm) : minterm;
  }
  return result;
}

}  // namespace

Contract compose(const Contract& c1, const Contract& c2) {
  const auto overlap = set_intersect(c1.outputs(), c2.outputs());
  if (!overlap.empty()) {
    throw CompositionError("cannot compose " + c1.name() + " and " + c2.name() +
                           ": overlapping output " + std::string(wire_name(*overlap.begin())));
  }

  // Connected signals are hidden from the composite interface.
  const auto out_union = set_union(c1.outputs(), c2.outputs());
  const auto in_union = set_union(c1.inputs(), c2.inputs());
  const auto connected = set_union(set_intersect(c1.outputs(), c2.inputs()),
                                   set_intersect(c2.outputs(), c1.inputs()));
  std::set<Signal> inputs = set_minus(in_union, out_union);
  std::set<Signal> outputs = set_minus(out_union, in_union);
  std::set<Signal> hidden =
      set_union(set_union(c1.hidden(), c2.hidden()), connected);

  // Guarantees: union of clause lists with cause-effect chains fused. A chain
  // is a bounded clause of one contract whose obligation signals all flow over
  // connected signals and match exactly the trigger signals of a bounded
  // clause of the other contract; the fused clause carries the summed
  // deadline.
  std::vector<GuaranteeClause> clauses;
  std::vector<bool> used1(c1.guarantee().size(), false), used2(c2.guarantee().size(), false);

  auto try_fuse = [&](const Contract& ca, const Contract& cb, std::vector<bool>& used_a,
                      std::vector<bool>& used_b) {
    for (std::size_t i = 0; i < ca.guarantee().size(); ++i) {
      if (used_a[i]) continue;
      const GuaranteeClause& first = ca.guarantee()[i];
      if (first.mode != ClauseMode::BoundedResponse) continue;
      const auto produced = signals_of(first.obligation);
      if (produced.empty()) continue;
      if (set_minus(produced, connected).size() != 0) continue;
      for (std::size_t j = 0; j < cb.guarantee().size(); ++j) {
        if (used_b[j]) continue;
        const GuaranteeClause& second = cb.guarantee()[j];
        if (second.mode != ClauseMode::BoundedResponse) continue;
        if (signals_of(second.trigger) != produced) continue;
        GuaranteeClause fused;
        fused.mode = ClauseMode::BoundedResponse;
        fused.trigger = first.trigger;
        fused.obligation = second.obligation;
        fused.deadline = *first.deadline + *second.deadline;
        fused.fused_chain = true;
        clauses.push_back(std::move(fused));
        used_a[i] = true;
        used_b[j] = true;
        break;
      }
    }
  };
  try_fuse(c1, c2, used1, used2);
  try_fuse(c2, c1, used2, used1);

  for (std::size_t i = 0; i < c1.guarantee().size(); ++i) {
    if (!used1[i]) clauses.push_back(c1.guarantee()[i]);
  }
  for (std::size_t j = 0; j < c2.guarantee().size(); ++j) {
    if (!used2[j]) clauses.push_back(c2.guarantee()[j]);
  }

  // Assumptions. Independence means the guarantees of each contract share no
  // signals with the assumptions of the other.
  const PredPtr g1 = guarantee_as_predicate(c1);
  const PredPtr g2 = guarantee_as_predicate(c2);
  const bool independent =
      set_intersect(signals_of(g1), signals_of(c2.assumptions())).empty() &&
      set_intersect(signals_of(g2), signals_of(c1.assumptions())).empty();

  PredPtr assumptions;
  if (independent) {
    assumptions = equivalent(c1.assumptions(), c2.assumptions())
                      ? c1.assumptions()
                      : Predicate::p_and(c1.assumptions(), c2.assumptions());
  } else {
    // Weakest A with A && G1 => A2 and A && G2 => A1, computed by enumeration:
    // A = (G1 => A2) && (G2 => A1).
    AtomUniverse universe;
    universe.add_from(g1);
    universe.add_from(g2);
    universe.add_from(c1.assumptions());
    universe.add_from(c2.assumptions());
    const auto envs = enumerate_envs(universe);
    std::vector<bool> truth(envs.size(), false);
    for (std::size_t i = 0; i < envs.size(); ++i) {
      bool ok1 = !eval_enumerated(g1, envs[i]) || eval_enumerated(c2.assumptions(), envs[i]);
      bool ok2 = !eval_enumerated(g2, envs[i]) || eval_enumerated(c1.assumptions(), envs[i]);
      truth[i] = ok1 && ok2;
    }
    assumptions = materialize_dnf(universe, envs, truth);
  }
  if (!satisfiable(assumptions)) {
    throw CompositionError("cannot compose " + c1.name() + " and " + c2.name() +
                           ": combined assumptions are unsatisfiable");
  }

  std::set<std::string> params = c1.params();
  params.insert(c2.params().begin(), c2.params().end());

  return Contract("(" + c1.name() + "*" + c2.name() + ")", std::move(inputs), std::move(outputs),
                  std::move(params), std::move(assumptions), std::move(clauses),
                  std::move(hidden));
}

// ---------------------------------------------------------------------------
// Registry and hierarchy
// ---------------------------------------------------------------------------

void ContractRegistry::add(Contract contract) {
  const std::string name = contract.name();
  if (by_name_.count(name)) throw ConfigError("duplicate contract name: " + name);
  by_name_.emplace(name, std::move(contract));
  order_.push_back(name);
}

const Contract& ContractRegistry::get(const std::string& name) const {
  auto it = by_name_.find(name);
  if (it == by_name_.end()) throw InputError("unknown contract: " + name);
  return it->second;
}

bool ContractRegistry::contains(const std::string& name) const {
  return by_name_.count(name) != 0;
}

std::string HierarchyReport::to_string() const {
  std::ostringstream os;
  for (const auto& node : nodes) {
    os << (node.passed ? "pass" : "FAIL") << "  " << node.contract;
    if (node.is_leaf) {
      os << " (leaf)";
    }
    os << "\n";
    if (!node.passed) {
      for (const auto& a : node.refinement.assumption_counterexamples) {
        os << "      assumption counterexample: " << a << "\n";
      }
      for (const auto& g : node.refinement.guarantee_counterexamples) {
        os << "      guarantee counterexample: " << g.to_string() << "\n";
      }
      for (const auto& s : node.structural_failures) {
        os << "      structural: " << s << "\n";
      }
    }
  }
  os << (all_passed ? "hierarchy OK" : "hierarchy INVALID") << "\n";
  return os.str();
}

namespace {

void collect_names(const HierarchyNode& node, std::vector<std::string>& out) {
  out.push_back(node.contract);
  for (const auto& child : node.children) collect_names(child, out);
}

void validate_node(const HierarchyNode& node, const ContractRegistry& registry,
                   const std::optional<StructuralTiming>& timing, HierarchyReport& report) {
  HierarchyNodeResult result;
  result.contract = node.contract;
  const Contract& parent = registry.get(node.contract);

  if (node.children.empty()) {
    result.is_leaf = true;
    result.passed = true;
    report.nodes.push_back(std::move(result));
    return;
  }

  // Left-fold composition of the children contracts.
  const Contract* first = &registry.get(node.children.front().contract);
  std::optional<Contract> composed;
  for (std::size_t i = 1; i < node.children.size(); ++i) {
    const Contract& next = registry.get(node.children[i].contract);
    composed = compose(composed ? *composed : *first, next);
  }
  const Contract& composition = composed ? *composed : *first;

  result.refinement = check_refinement(composition, parent);
  result.passed = result.refinement.holds;

  if (timing) {
    auto travel_ms = [&](SpeedLevel s) {
      return timing->offset_steps * timing->step_period_ms[speed_index(s)];
    };
    for (const GuaranteeClause& pc : parent.guarantee()) {
      if (pc.mode != ClauseMode::BoundedResponse) continue;
      for (SpeedLevel s : kAllSpeeds) {
        if (pc.deadline->at(s) >= travel_ms(s)) {
          std::ostringstream os;
          os << pc.deadline->name() << "(" << speed_name(s) << ")=" << pc.deadline->at(s)
             << " must stay below belt travel " << travel_ms(s);
          result.structural_failures.push_back(os.str());
          result.passed = false;
        }
      }
      // Fused chains must leave strictly positive slack under the parent.
      for (const GuaranteeClause& cc : composition.guarantee()) {
        if (!cc.fused_chain || cc.mode != ClauseMode::BoundedResponse) continue;
        if (!equivalent(cc.trigger, pc.trigger)) continue;
        for (SpeedLevel s : kAllSpeeds) {
          if (cc.deadline->at(s) >= pc.deadline->at(s)) {
            std::ostringstream os;
            os << cc.deadline->name() << "(" << speed_name(s) << ")=" << cc.deadline->at(s)
               << " leaves no slack under " << pc.deadline->name() << "(" << speed_name(s)
               << ")=" << pc.deadline->at(s);
            result.structural_failures.push_back(os.str());
            result.passed = false;
          }
        }
      }
    }
  }

  report.nodes.push_back(std::move(result));

  for (const auto& child : node.children) {
    validate_node(child, registry, timing, report);
  }
}

}  // namespace

HierarchyReport validate_hierarchy(const HierarchySpec& spec, const ContractRegistry& registry,
                                   const std::optional<StructuralTiming>& timing) {
  std::vector<std::string> names;
  collect_names(spec.root, names);
  std::vector<std::string> sorted = names;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw InputError("hierarchy is not a tree: a contract appears more than once");
  }
  for (const std::string& n : names) {
    if (!registry.contains(n)) throw InputError("unknown contract: " + n);
  }

  HierarchyReport report;
  validate_node(spec.root, registry, timing, report);
  report.all_passed = std::all_of(report.nodes.begin(), report.nodes.end(),
                                  [](const HierarchyNodeResult& n) { return n.passed; });
  return report;
}

}  // namespace sortline
