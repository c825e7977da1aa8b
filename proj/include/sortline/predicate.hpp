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
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "sortline/types.hpp"

namespace sortline {

// Boolean predicates over plant signals and the motor-speed parameter.
// Atoms are True, rising(Signal) and (in)equalities between terms; connectives
// are the usual Boolean ones. Arithmetic is restricted to the single additive
// form "step signal + constant".

// ---------------------------------------------------------------------------
// Terms
// ---------------------------------------------------------------------------

struct Term {
  enum class Kind : std::uint8_t {
    SignalRef,        // value of a signal
    SpeedParam,       // the M_S parameter
    IntLit,           // step-count literal
    ColourLit,
    EjectorLit,
    SpeedLit,
    NullLit,          // uninitialised value
    SignalPlusConst,  // step signal + constant offset
  };

  Kind kind = Kind::NullLit;
  Signal signal = Signal::Ls1;   // SignalRef / SignalPlusConst
  std::int64_t int_value = 0;    // IntLit / SignalPlusConst offset
  Colour colour = Colour::White;
  Ejector ejector = Ejector::E1;
  SpeedLevel speed = SpeedLevel::S1;

  static Term signal_ref(Signal s);
  static Term speed_param();
  static Term int_lit(std::int64_t v);
  static Term colour_lit(Colour c);
  static Term ejector_lit(Ejector e);
  static Term speed_lit(SpeedLevel s);
  static Term null_lit();
  static Term signal_plus(Signal s, std::int64_t offset);

  std::string to_string() const;
  bool operator==(const Term& other) const;
};

// ---------------------------------------------------------------------------
// Predicates
// ---------------------------------------------------------------------------

class Predicate;
using PredPtr = std::shared_ptr<const Predicate>;

class Predicate {
 public:
  enum class Kind : std::uint8_t { True, RisingEdge, Eq, Neq, And, Or, Not, Implies, Iff };

  Kind kind() const { return kind_; }
  Signal edge_signal() const { return edge_signal_; }
  const Term& lhs() const { return lhs_; }
  const Term& rhs() const { return rhs_; }
  const PredPtr& left() const { return left_; }
  const PredPtr& right() const { return right_; }

  std::string to_string() const;

  // Factories. p_and/p_or fold away True operands so composed assumptions
  // stay readable.
  static PredPtr truth();
  static PredPtr rising(Signal s);
  static PredPtr eq(Term a, Term b);
  static PredPtr neq(Term a, Term b);
  static PredPtr p_and(PredPtr a, PredPtr b);
  static PredPtr p_or(PredPtr a, PredPtr b);
  static PredPtr p_not(PredPtr a);
  static PredPtr implies(PredPtr a, PredPtr b);
  static PredPtr iff(PredPtr a, PredPtr b);

 private:
  friend struct PredicateBuilder;
  Predicate() = default;

  Kind kind_ = Kind::True;
  Signal edge_signal_ = Signal::Ls1;
  Term lhs_, rhs_;
  PredPtr left_, right_;
};

bool is_true_pred(const PredPtr& p);

// Signals appearing anywhere in the predicate (including edge atoms).
std::set<Signal> signals_of(const PredPtr& p);

// Whether the predicate mentions the M_S parameter.
bool references_speed(const PredPtr& p);

// ---------------------------------------------------------------------------
// Concrete evaluation
// ---------------------------------------------------------------------------

// An assignment of signals and parameters to values. Edge signals are bound to
// bool ("is rising now"), step signals to int64, enum signals to their domain
// or null. Referencing an unbound variable raises EvalError naming it.
struct Environment {
  std::map<Signal, Value> signals;
  std::optional<SpeedLevel> speed;

  Environment& bind(Signal s, Value v);
  Environment& bind_speed(SpeedLevel s);
  std::string to_string() const;
};

bool eval_predicate(const PredPtr& pred, const Environment& env);

// ---------------------------------------------------------------------------
// Implication by enumeration
// ---------------------------------------------------------------------------

// The finite environment space of a set of predicates: edge atoms range over
// {true,false}, enum-valued signals over their full domains (plus null), the
// speed parameter over its three levels. Step-count comparisons are opaque
// Boolean atoms keyed by their printed form; this is sound for contracts in
// which each numeric atom occurs uniquely.
struct AtomUniverse {
  std::set<Signal> edge_signals;
  std::set<Signal> enum_signals;
  bool uses_speed = false;
  std::set<std::string> opaque_atoms;

  void add_from(const PredPtr& p);
};

struct EnumeratedEnv {
  Environment env;
  std::map<std::string, bool> opaque;

  std::string to_string() const;
};

// All assignments over the universe. Sizes stay tiny for the plant registry.
std::vector<EnumeratedEnv> enumerate_envs(const AtomUniverse& universe);

// Evaluation under an enumerated environment (numeric atoms resolved through
// the opaque map).
bool eval_enumerated(const PredPtr& pred, const EnumeratedEnv& e);

// Exhaustive checks over the joint universe of both predicates.
bool implies(const PredPtr& p, const PredPtr& q);
bool equivalent(const PredPtr& p, const PredPtr& q);
bool satisfiable(const PredPtr& p);

// Environments where p holds and q does not (rendered; empty iff p implies q).
std::vector<std::string> implication_counterexamples(const PredPtr& p, const PredPtr& q);

// The canonical key of a numeric comparison atom, or empty if the predicate is
// not one. Exposed for tests.
std::string opaque_atom_key(const Term& a, const Term& b);

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

// Grammar (precedence low to high): <=> | => | "||" | && | ! | atom.
// Atoms: true, rising(SIG), term == term, term != term, parenthesised
// predicates. Terms: signal names, M_S, enum literals (W, N, E1..E3, S1..S3,
// null), integers, and "SIG + name|int" where a name is looked up in
// `constants` (e.g. Offset).
PredPtr parse_predicate(std::string_view text,
                        const std::map<std::string, std::int64_t>& constants = {});

}  // namespace sortline
