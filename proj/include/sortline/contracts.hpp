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
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "sortline/predicate.hpp"
#include "sortline/types.hpp"

namespace sortline {

// Parametric assume-guarantee contracts over the plant signal registry, with
// refinement and composition checks.
//
// A contract guarantee is a list of clauses. A bounded-response clause demands
// that whenever its trigger becomes true at time t, its obligation holds by
// t + deadline(M_S). A biconditional clause demands that the trigger occurs
// exactly when the obligation holds; both directions can be violated.

enum class ClauseMode : std::uint8_t { BoundedResponse, Biconditional };

struct GuaranteeClause {
  ClauseMode mode = ClauseMode::BoundedResponse;
  PredPtr trigger;
  PredPtr obligation;
  std::optional<LatencyBound> deadline;  // present iff BoundedResponse
  bool fused_chain = false;  // set by compose() when two clauses were chained

  void validate() const;
  std::string to_string() const;
};

class Contract {
 public:
  Contract(std::string name, std::set<Signal> inputs, std::set<Signal> outputs,
           std::set<std::string> params, PredPtr assumptions,
           std::vector<GuaranteeClause> guarantee, std::set<Signal> hidden = {});

  const std::string& name() const { return name_; }
  const std::set<Signal>& inputs() const { return inputs_; }
  const std::set<Signal>& outputs() const { return outputs_; }
  const std::set<std::string>& params() const { return params_; }
  const PredPtr& assumptions() const { return assumptions_; }
  const std::vector<GuaranteeClause>& guarantee() const { return guarantee_; }
  // Signals internal to a composition: produced and consumed inside it, part
  // of neither interface set.
  const std::set<Signal>& hidden() const { return hidden_; }

  bool has_param(const std::string& p) const { return params_.count(p) != 0; }

 private:
  std::string name_;
  std::set<Signal> inputs_, outputs_;
  std::set<std::string> params_;
  PredPtr assumptions_;
  std::vector<GuaranteeClause> guarantee_;
  std::set<Signal> hidden_;
};

// ---------------------------------------------------------------------------
// Refinement
// ---------------------------------------------------------------------------

struct GuaranteeCounterexample {
  enum class Kind : std::uint8_t { UnmatchedClause, DeadlineExceeded, ObligationGap };

  Kind kind = Kind::UnmatchedClause;
  std::string super_clause;
  std::optional<std::string> sub_clause;
  std::optional<SpeedLevel> speed;        // DeadlineExceeded
  DurationMs sub_deadline_ms = 0;         // DeadlineExceeded
  DurationMs super_deadline_ms = 0;       // DeadlineExceeded
  std::optional<std::string> environment; // ObligationGap

  std::string to_string() const;
};

struct RefinementReport {
  bool holds = false;
  std::vector<std::string> assumption_counterexamples;
  std::vector<GuaranteeCounterexample> guarantee_counterexamples;
};

// Does `sub` refine `super`? Holds when super's assumptions imply sub's (sub
// assumes no more) and every clause of super is matched by a clause of sub
// whose trigger is propositionally equivalent, whose obligation implies
// super's, and whose deadline is no larger at every speed (sub guarantees no
// less). Matching is greedy over all clause pairs.
RefinementReport check_refinement(const Contract& sub, const Contract& super);

// ---------------------------------------------------------------------------
// Composition
// ---------------------------------------------------------------------------

// Compose two contracts into a subsystem contract. Guarantees are the union
// of both clause lists, except that cause-effect chains — a clause whose
// obligation signals are exactly the trigger inputs of a clause of the other
// contract, over connected signals — fuse into a single clause with pointwise
// summed deadlines. Connected signals (outputs of one consumed as inputs of
// the other) are hidden from the composite interface. Assumptions follow the
// usual rules: the conjunction when each guarantee is independent of the
// other's assumptions, otherwise the weakest predicate whose conjunction with
// each guarantee implies the other's assumptions.
//
// Throws CompositionError on overlapping outputs or unsatisfiable combined
// assumptions.
Contract compose(const Contract& c1, const Contract& c2);

// ---------------------------------------------------------------------------
// Contract registry and hierarchy validation
// ---------------------------------------------------------------------------

class ContractRegistry {
 public:
  void add(Contract contract);
  const Contract& get(const std::string& name) const;
  bool contains(const std::string& name) const;
  const std::vector<std::string>& names() const { return order_; }

 private:
  std::map<std::string, Contract> by_name_;
  std::vector<std::string> order_;
};

struct HierarchyNode {
  std::string contract;
  std::vector<HierarchyNode> children;
};

struct HierarchySpec {
  HierarchyNode root;
};

// Timing facts needed by the structural latency check; taken from the plant
// configuration when one is supplied.
struct StructuralTiming {
  std::int64_t offset_steps = 0;
  std::array<DurationMs, 3> step_period_ms{};
};

struct HierarchyNodeResult {
  std::string contract;
  bool is_leaf = false;
  bool passed = true;
  RefinementReport refinement;            // meaningful for non-leaf nodes
  std::vector<std::string> structural_failures;
};

struct HierarchyReport {
  bool all_passed = true;
  std::vector<HierarchyNodeResult> nodes;

  std::string to_string() const;
};

// For every non-leaf node, composes the children contracts (left fold) and
// checks that the composition refines the parent. With timing supplied, also
// checks that every fused chain deadline is strictly below its parent clause
// deadline and that every parent bounded-response deadline stays strictly
// below the belt travel time offset*step_period at every speed.
//
// Throws InputError when the spec is not a tree (a contract appears twice) or
// references an unknown contract.
HierarchyReport validate_hierarchy(const HierarchySpec& spec, const ContractRegistry& registry,
                                   const std::optional<StructuralTiming>& timing = std::nullopt);

}  // namespace sortline
