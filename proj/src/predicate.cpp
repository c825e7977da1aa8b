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

#include "sortline/predicate.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace sortline {

// ---------------------------------------------------------------------------
// Terms
// ---------------------------------------------------------------------------

Term Term::signal_ref(Signal s) {
  Term t;
  t.kind = Kind::SignalRef;
  t.signal = s;
  return t;
}

Term Term::speed_param() {
  Term t;
  t.kind = Kind::SpeedParam;
  return t;
}

Term Term::int_lit(std::int64_t v) {
  Term t;
  t.kind = Kind::IntLit;
  t.int_value = v;
  return t;
}

Term Term::colour_lit(Colour c) {
  Term t;
  t.kind = Kind::ColourLit;
  t.colour = c;
  return t;
}

Term Term::ejector_lit(Ejector e) {
  Term t;
  t.kind = Kind::EjectorLit;
  t.ejector = e;
  return t;
}

Term Term::speed_lit(SpeedLevel s) {
  Term t;
  t.kind = Kind::SpeedLit;
  t.speed = s;
  return t;
}

Term Term::null_lit() {
  Term t;
  t.kind = Kind::NullLit;
  return t;
}

Term Term::signal_plus(Signal s, std::int64_t offset) {
  Term t;
  t.kind = Kind::SignalPlusConst;
  t.signal = s;
  t.int_value = offset;
  return t;
}

std::string Term::to_string() const {
  switch (kind) {
    case Kind::SignalRef: return std::string(wire_name(signal));
    case Kind::SpeedParam: return "M_S";
    case Kind::IntLit: return std::to_string(int_value);
    case Kind::ColourLit: return std::string(colour_name(colour));
    case Kind::EjectorLit: return std::string(ejector_name(ejector));
    case Kind::SpeedLit: return std::string(speed_name(speed));
    case Kind::NullLit: return "null";
    case Kind::SignalPlusConst:
      return std::string(wire_name(signal)) + "+" + std::to_string(int_value);
  }
  return "?";
}

bool Term::operator==(const Term& other) const {
  if (kind != other.kind) return false;
  switch (kind) {
    case Kind::SignalRef: return signal == other.signal;
    case Kind::SpeedParam: return true;
    case Kind::IntLit: return int_value == other.int_value;
    case Kind::ColourLit: return colour == other.colour;
    case Kind::EjectorLit: return ejector == other.ejector;
    case Kind::SpeedLit: return speed == other.speed;
    case Kind::NullLit: return true;
    case Kind::SignalPlusConst: return signal == other.signal && int_value == other.int_value;
  }
  return false;
}

namespace {

enum class TermClass { Step, ColourV, EjectorV, Speed, Null };

TermClass classify(const Term& t) {
  switch (t.kind) {
    case Term::Kind::SignalRef:
      switch (kind_of(t.signal)) {
        case SignalKind::Step: return TermClass::Step;
        case SignalKind::ColourValue: return TermClass::ColourV;
        case SignalKind::EjectorValue: return TermClass::EjectorV;
        case SignalKind::Edge: throw EvalError("edge signal used as a comparison term");
      }
      return TermClass::Step;
    case Term::Kind::SpeedParam:
    case Term::Kind::SpeedLit: return TermClass::Speed;
    case Term::Kind::IntLit:
    case Term::Kind::SignalPlusConst: return TermClass::Step;
    case Term::Kind::ColourLit: return TermClass::ColourV;
    case Term::Kind::EjectorLit: return TermClass::EjectorV;
    case Term::Kind::NullLit: return TermClass::Null;
  }
  return TermClass::Null;
}

// Comparison atoms must pair compatible domains; null compares against the
// enum-valued signals only.
void check_comparable(const Term& a, const Term& b) {
  TermClass ca = classify(a), cb = classify(b);
  if (ca == cb) return;
  if (ca == TermClass::Null && (cb == TermClass::ColourV || cb == TermClass::EjectorV)) return;
  if (cb == TermClass::Null && (ca == TermClass::ColourV || ca == TermClass::EjectorV)) return;
  throw EvalError("comparison between incompatible terms: " + a.to_string() + " vs " +
                  b.to_string());
}

bool is_numeric_atom(const Term& a, const Term& b) {
  return classify(a) == TermClass::Step && classify(b) == TermClass::Step;
}

}  // namespace

// ---------------------------------------------------------------------------
// Predicate construction
// ---------------------------------------------------------------------------

struct PredicateBuilder {
  static PredPtr make(Predicate::Kind kind, Signal edge, Term lhs, Term rhs, PredPtr l,
                      PredPtr r) {
    auto p = std::shared_ptr<Predicate>(new Predicate());
    p->kind_ = kind;
    p->edge_signal_ = edge;
    p->lhs_ = lhs;
    p->rhs_ = rhs;
    p->left_ = std::move(l);
    p->right_ = std::move(r);
    return p;
  }
};

PredPtr Predicate::truth() {
  return PredicateBuilder::make(Kind::True, Signal::Ls1, Term{}, Term{}, nullptr, nullptr);
}

PredPtr Predicate::rising(Signal s) {
  if (kind_of(s) != SignalKind::Edge) {
    throw EvalError("rising() requires an edge signal, got " + std::string(wire_name(s)));
  }
  return PredicateBuilder::make(Kind::RisingEdge, s, Term{}, Term{}, nullptr, nullptr);
}

PredPtr Predicate::eq(Term a, Term b) {
  check_comparable(a, b);
  return PredicateBuilder::make(Kind::Eq, Signal::Ls1, a, b, nullptr, nullptr);
}

PredPtr Predicate::neq(Term a, Term b) {
  check_comparable(a, b);
  return PredicateBuilder::make(Kind::Neq, Signal::Ls1, a, b, nullptr, nullptr);
}

PredPtr Predicate::p_and(PredPtr a, PredPtr b) {
  if (is_true_pred(a)) return b;
  if (is_true_pred(b)) return a;
  return PredicateBuilder::make(Kind::And, Signal::Ls1, Term{}, Term{}, std::move(a),
                                std::move(b));
}

PredPtr Predicate::p_or(PredPtr a, PredPtr b) {
  return PredicateBuilder::make(Kind::Or, Signal::Ls1, Term{}, Term{}, std::move(a), std::move(b));
}

PredPtr Predicate::p_not(PredPtr a) {
  return PredicateBuilder::make(Kind::Not, Signal::Ls1, Term{}, Term{}, std::move(a), nullptr);
}

PredPtr Predicate::implies(PredPtr a, PredPtr b) {
  return PredicateBuilder::make(Kind::Implies, Signal::Ls1, Term{}, Term{}, std::move(a),
                                std::move(b));
}

PredPtr Predicate::iff(PredPtr a, PredPtr b) {
  return PredicateBuilder::make(Kind::Iff, Signal::Ls1, Term{}, Term{}, std::move(a),
                                std::move(b));
}

std::string Predicate::to_string() const {
  switch (kind_) {
    case Kind::True: return "true";
    case Kind::RisingEdge: return "rising(" + std::string(wire_name(edge_signal_)) + ")";
    case Kind::Eq: return lhs_.to_string() + " == " + rhs_.to_string();
    case Kind::Neq: return lhs_.to_string() + " != " + rhs_.to_string();
    case Kind::And: return "(" + left_->to_string() + " && " + right_->to_string() + ")";
    case Kind::Or: return "(" + left_->to_string() + " || " + right_->to_string() + ")";
    case Kind::Not: return "!(" + left_->to_string() + ")";
    case Kind::Implies: return "(" + left_->to_string() + " => " + right_->to_string() + ")";
    case Kind::Iff: return "(" + left_->to_string() + " <=> " + right_->to_string() + ")";
  }
  return "?";
}

bool is_true_pred(const PredPtr& p) { return p && p->kind() == Predicate::Kind::True; }

std::set<Signal> signals_of(const PredPtr& p) {
  std::set<Signal> out;
  if (!p) return out;
  auto add_term = [&out](const Term& t) {
    if (t.kind == Term::Kind::SignalRef || t.kind == Term::Kind::SignalPlusConst) {
      out.insert(t.signal);
    }
  };
  switch (p->kind()) {
    case Predicate::Kind::True: break;
    case Predicate::Kind::RisingEdge: out.insert(p->edge_signal()); break;
    case Predicate::Kind::Eq:
    case Predicate::Kind::Neq:
      add_term(p->lhs());
      add_term(p->rhs());
      break;
    default: {
      for (const auto& child : {p->left(), p->right()}) {
        if (!child) continue;
        auto sub = signals_of(child);
        out.insert(sub.begin(), sub.end());
      }
    }
  }
  return out;
}

bool references_speed(const PredPtr& p) {
  if (!p) return false;
  switch (p->kind()) {
    case Predicate::Kind::True:
    case Predicate::Kind::RisingEdge: return false;
    case Predicate::Kind::Eq:
    case Predicate::Kind::Neq:
      return p->lhs().kind == Term::Kind::SpeedParam || p->rhs().kind == Term::Kind::SpeedParam;
    default:
      return references_speed(p->left()) || references_speed(p->right());
  }
}

// ---------------------------------------------------------------------------
// Concrete evaluation
// ---------------------------------------------------------------------------

Environment& Environment::bind(Signal s, Value v) {
  signals[s] = std::move(v);
  return *this;
}

Environment& Environment::bind_speed(SpeedLevel s) {
  speed = s;
  return *this;
}

std::string Environment::to_string() const {
  std::ostringstream os;
  bool first = true;
  for (const auto& [sig, val] : signals) {
    if (!first) os << " ";
    first = false;
    os << wire_name(sig) << "=" << value_to_string(val);
  }
  if (speed) {
    if (!first) os << " ";
    os << "M_S=" << speed_name(*speed);
  }
  return os.str();
}

namespace {

const Value& lookup(const Environment& env, Signal s) {
  auto it = env.signals.find(s);
  if (it == env.signals.end()) {
    throw EvalError("unbound signal in environment: " + std::string(wire_name(s)));
  }
  return it->second;
}

// Term evaluation yields a Value; speed terms are mapped onto int64 indices so
// the variant comparison stays uniform.
Value eval_term(const Term& t, const Environment& env) {
  switch (t.kind) {
    case Term::Kind::SignalRef: return lookup(env, t.signal);
    case Term::Kind::SpeedParam:
      if (!env.speed) throw EvalError("unbound parameter in environment: M_S");
      return static_cast<std::int64_t>(speed_index(*env.speed));
    case Term::Kind::IntLit: return t.int_value;
    case Term::Kind::ColourLit: return t.colour;
    case Term::Kind::EjectorLit: return t.ejector;
    case Term::Kind::SpeedLit: return static_cast<std::int64_t>(speed_index(t.speed));
    case Term::Kind::NullLit: return std::monostate{};
    case Term::Kind::SignalPlusConst: {
      const Value& base = lookup(env, t.signal);
      if (!std::holds_alternative<std::int64_t>(base)) {
        throw EvalError("step arithmetic over a non-step value: " + t.to_string());
      }
      return std::get<std::int64_t>(base) + t.int_value;
    }
  }
  return std::monostate{};
}

bool values_equal(const Value& a, const Value& b) { return a == b; }

}  // namespace

bool eval_predicate(const PredPtr& pred, const Environment& env) {
  if (!pred) throw EvalError("null predicate");
  switch (pred->kind()) {
    case Predicate::Kind::True: return true;
    case Predicate::Kind::RisingEdge: {
      const Value& v = lookup(env, pred->edge_signal());
      if (!std::holds_alternative<bool>(v)) {
        throw EvalError("edge signal bound to a non-boolean value: " +
                        std::string(wire_name(pred->edge_signal())));
      }
      return std::get<bool>(v);
    }
    case Predicate::Kind::Eq:
      return values_equal(eval_term(pred->lhs(), env), eval_term(pred->rhs(), env));
    case Predicate::Kind::Neq:
      return !values_equal(eval_term(pred->lhs(), env), eval_term(pred->rhs(), env));
    case Predicate::Kind::And:
      return eval_predicate(pred->left(), env) && eval_predicate(pred->right(), env);
    case Predicate::Kind::Or:
      return eval_predicate(pred->left(), env) || eval_predicate(pred->right(), env);
    case Predicate::Kind::Not: return !eval_predicate(pred->left(), env);
    case Predicate::Kind::Implies:
      return !eval_predicate(pred->left(), env) || eval_predicate(pred->right(), env);
    case Predicate::Kind::Iff:
      return eval_predicate(pred->left(), env) == eval_predicate(pred->right(), env);
  }
  return false;
}

// ---------------------------------------------------------------------------
// Enumeration
// ---------------------------------------------------------------------------

std::string opaque_atom_key(const Term& a, const Term& b) {
  if (!is_numeric_atom(a, b)) return {};
  std::string sa = a.to_string(), sb = b.to_string();
  if (sb < sa) std::swap(sa, sb);
  return sa + "==" + sb;
}

void AtomUniverse::add_from(const PredPtr& p) {
  if (!p) return;
  auto add_term = [this](const Term& t) {
    switch (t.kind) {
      case Term::Kind::SignalRef:
        if (kind_of(t.signal) == SignalKind::ColourValue ||
            kind_of(t.signal) == SignalKind::EjectorValue) {
          enum_signals.insert(t.signal);
        }
        break;
      case Term::Kind::SpeedParam: uses_speed = true; break;
      default: break;
    }
  };
  switch (p->kind()) {
    case Predicate::Kind::True: break;
    case Predicate::Kind::RisingEdge: edge_signals.insert(p->edge_signal()); break;
    case Predicate::Kind::Eq:
    case Predicate::Kind::Neq: {
      if (is_numeric_atom(p->lhs(), p->rhs())) {
        opaque_atoms.insert(opaque_atom_key(p->lhs(), p->rhs()));
      } else {
        add_term(p->lhs());
        add_term(p->rhs());
      }
      break;
    }
    default:
      add_from(p->left());
      add_from(p->right());
  }
}

std::string EnumeratedEnv::to_string() const {
  std::ostringstream os;
  os << env.to_string();
  for (const auto& [key, val] : opaque) {
    os << (os.tellp() > 0 ? " " : "") << "[" << key << "]=" << (val ? "true" : "false");
  }
  return os.str();
}

std::vector<EnumeratedEnv> enumerate_envs(const AtomUniverse& universe) {
  std::vector<EnumeratedEnv> envs;
  envs.emplace_back();

  auto expand = [&envs](auto&& apply, std::size_t variants) {
    std::vector<EnumeratedEnv> next;
    next.reserve(envs.size() * variants);
    for (const auto& base : envs) {
      for (std::size_t i = 0; i < variants; ++i) {
        EnumeratedEnv e = base;
        apply(e, i);
        next.push_back(std::move(e));
      }
    }
    envs = std::move(next);
  };

  for (Signal s : universe.edge_signals) {
    expand([s](EnumeratedEnv& e, std::size_t i) { e.env.bind(s, i == 1); }, 2);
  }
  for (Signal s : universe.enum_signals) {
    if (kind_of(s) == SignalKind::ColourValue) {
      expand(
          [s](EnumeratedEnv& e, std::size_t i) {
            if (i == 0) {
              e.env.bind(s, std::monostate{});
            } else {
              e.env.bind(s, i == 1 ? Colour::White : Colour::NonWhite);
            }
          },
          3);
    } else {
      expand(
          [s](EnumeratedEnv& e, std::size_t i) {
            if (i == 0) {
              e.env.bind(s, std::monostate{});
            } else {
              e.env.bind(s, static_cast<Ejector>(i - 1));
            }
          },
          4);
    }
  }
  if (universe.uses_speed) {
    expand([](EnumeratedEnv& e, std::size_t i) { e.env.bind_speed(kAllSpeeds[i]); }, 3);
  }
  for (const std::string& atom : universe.opaque_atoms) {
    expand([&atom](EnumeratedEnv& e, std::size_t i) { e.opaque[atom] = (i == 1); }, 2);
  }
  return envs;
}

bool eval_enumerated(const PredPtr& pred, const EnumeratedEnv& e) {
  if (!pred) throw EvalError("null predicate");
  switch (pred->kind()) {
    case Predicate::Kind::Eq:
    case Predicate::Kind::Neq: {
      if (is_numeric_atom(pred->lhs(), pred->rhs())) {
        auto it = e.opaque.find(opaque_atom_key(pred->lhs(), pred->rhs()));
        if (it == e.opaque.end()) {
          throw EvalError("numeric atom outside universe: " + pred->to_string());
        }
        bool truth = it->second;
        return pred->kind() == Predicate::Kind::Eq ? truth : !truth;
      }
      return eval_predicate(pred, e.env);
    }
    case Predicate::Kind::And:
      return eval_enumerated(pred->left(), e) && eval_enumerated(pred->right(), e);
    case Predicate::Kind::Or:
      return eval_enumerated(pred->left(), e) || eval_enumerated(pred->right(), e);
    case Predicate::Kind::Not: return !eval_enumerated(pred->left(), e);
    case Predicate::Kind::Implies:
      return !eval_enumerated(pred->left(), e) || eval_enumerated(pred->right(), e);
    case Predicate::Kind::Iff:
      return eval_enumerated(pred->left(), e) == eval_enumerated(pred->right(), e);
    default: return eval_predicate(pred, e.env);
  }
}

namespace {
std::vector<EnumeratedEnv> joint_envs(const PredPtr& p, const PredPtr& q) {
  AtomUniverse u;
  u.add_from(p);
  u.add_from(q);
  return enumerate_envs(u);
}
}  // namespace

bool implies(const PredPtr& p, const PredPtr& q) {
  for (const auto& e : joint_envs(p, q)) {
    if (eval_enumerated(p, e) && !eval_enumerated(q, e)) return false;
  }
  return true;
}

bool equivalent(const PredPtr& p, const PredPtr& q) {
  for (const auto& e : joint_envs(p, q)) {
    if (eval_enumerated(p, e) != eval_enumerated(q, e)) return false;
  }
  return true;
}

bool satisfiable(const PredPtr& p) {
  AtomUniverse u;
  u.add_from(p);
  for (const auto& e : enumerate_envs(u)) {
    if (eval_enumerated(p, e)) return true;
  }
  return false;
}

std::vector<std::string> implication_counterexamples(const PredPtr& p, const PredPtr& q) {
  std::vector<std::string> out;
  for (const auto& e : joint_envs(p, q)) {
    if (eval_enumerated(p, e) && !eval_enumerated(q, e)) out.push_back(e.to_string());
  }
  return out;
}

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

namespace {

class PredParser {
 public:
  PredParser(std::string_view text, const std::map<std::string, std::int64_t>& constants)
      : text_(text), constants_(constants) {}

  PredPtr parse() {
    PredPtr p = parse_iff();
    skip_ws();
    if (pos_ != text_.size()) fail("trailing input");
    return p;
  }

 private:
  [[noreturn]] void fail(const std::string& why) {
    throw ConfigError("predicate parse error at offset " + std::to_string(pos_) + ": " + why +
                      " in \"" + std::string(text_) + "\"");
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool eat(std::string_view tok) {
    skip_ws();
    if (text_.substr(pos_, tok.size()) == tok) {
      pos_ += tok.size();
      return true;
    }
    return false;
  }

  bool peek(std::string_view tok) {
    skip_ws();
    return text_.substr(pos_, tok.size()) == tok;
  }

  PredPtr parse_iff() {
    PredPtr left = parse_implies();
    while (eat("<=>")) left = Predicate::iff(left, parse_implies());
    return left;
  }

  PredPtr parse_implies() {
    PredPtr left = parse_or();
    if (peek("=>")) {
      eat("=>");
      return Predicate::implies(left, parse_implies());  // right associative
    }
    return left;
  }

  PredPtr parse_or() {
    PredPtr left = parse_and();
    while (eat("||")) left = Predicate::p_or(left, parse_and());
    return left;
  }

  PredPtr parse_and() {
    PredPtr left = parse_unary();
    while (eat("&&")) left = Predicate::p_and(left, parse_unary());
    return left;
  }

  PredPtr parse_unary() {
    if (eat("!")) return Predicate::p_not(parse_unary());
    if (eat("(")) {
      PredPtr inner = parse_iff();
      if (!eat(")")) fail("expected ')'");
      return inner;
    }
    return parse_atom();
  }

  std::string parse_ident() {
    skip_ws();
    std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
      ++pos_;
    }
    if (pos_ == start) fail("expected identifier");
    return std::string(text_.substr(start, pos_ - start));
  }

  Term parse_term() {
    skip_ws();
    if (pos_ < text_.size() &&
        (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '-')) {
      std::size_t start = pos_;
      if (text_[pos_] == '-') ++pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      return Term::int_lit(std::stoll(std::string(text_.substr(start, pos_ - start))));
    }
    std::string id = parse_ident();
    Term base;
    if (id == "null") {
      base = Term::null_lit();
    } else if (id == "M_S") {
      base = Term::speed_param();
    } else if (id == "W") {
      base = Term::colour_lit(Colour::White);
    } else if (id == "N") {
      base = Term::colour_lit(Colour::NonWhite);
    } else if (auto sp = speed_from_name(id)) {
      base = Term::speed_lit(*sp);
    } else if (id == "E1" || id == "E2" || id == "E3") {
      base = Term::ejector_lit(static_cast<Ejector>(id[1] - '1'));
    } else if (auto sig = signal_from_wire(id)) {
      base = Term::signal_ref(*sig);
    } else if (auto it = constants_.find(id); it != constants_.end()) {
      base = Term::int_lit(it->second);
    } else {
      fail("unknown term '" + id + "'");
    }
    if (eat("+")) {
      if (base.kind != Term::Kind::SignalRef || kind_of(base.signal) != SignalKind::Step) {
        fail("'+' requires a step-count signal on the left");
      }
      skip_ws();
      std::int64_t offset = 0;
      if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        std::size_t start = pos_;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
          ++pos_;
        }
        offset = std::stoll(std::string(text_.substr(start, pos_ - start)));
      } else {
        std::string name = parse_ident();
        auto it = constants_.find(name);
        if (it == constants_.end()) fail("unknown constant '" + name + "'");
        offset = it->second;
      }
      return Term::signal_plus(base.signal, offset);
    }
    return base;
  }

  PredPtr parse_atom() {
    skip_ws();
    if (eat("true")) return Predicate::truth();
    if (peek("rising")) {
      eat("rising");
      if (!eat("(")) fail("expected '(' after rising");
      std::string id = parse_ident();
      auto sig = signal_from_wire(id);
      if (!sig) fail("unknown signal '" + id + "'");
      if (!eat(")")) fail("expected ')'");
      return Predicate::rising(*sig);
    }
    Term lhs = parse_term();
    if (eat("==")) return Predicate::eq(lhs, parse_term());
    if (eat("!=")) return Predicate::neq(lhs, parse_term());
    fail("expected comparison operator");
  }

  std::string_view text_;
  const std::map<std::string, std::int64_t>& constants_;
  std::size_t pos_ = 0;
};

}  // namespace

PredPtr parse_predicate(std::string_view text,
                        const std::map<std::string, std::int64_t>& constants) {
  return PredParser(text, constants).parse();
}

}  // namespace sortline
