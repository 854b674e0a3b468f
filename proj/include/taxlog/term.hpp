// Copyright 2026 The Taxlog Authors
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

#ifndef TAXLOG_TERM_HPP_
#define TAXLOG_TERM_HPP_

#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "taxlog/bigint.hpp"

namespace taxlog {

/// Immutable logic-language term. Copies share the payload, so terms are
/// cheap to pass by value and safe to share across threads.
///
/// Atoms are lowercase identifiers, variables uppercase or `_`, integers
/// arbitrary precision, strings double-quoted text (dates, org names).
/// Compounds have arity >= 1; a zero-arity symbol is an Atom.
class Term {
 public:
  enum class Kind { kAtom, kVar, kInt, kStr, kCompound };

  static Term atom(std::string name) {
    return Term(Kind::kAtom, std::move(name), BigInt(), 0, {});
  }
  static Term var(std::string name, std::uint64_t id) {
    return Term(Kind::kVar, std::move(name), BigInt(), id, {});
  }
  static Term integer(BigInt value) {
    return Term(Kind::kInt, "", std::move(value), 0, {});
  }
  static Term str(std::string text) {
    return Term(Kind::kStr, std::move(text), BigInt(), 0, {});
  }
  static Term compound(std::string functor, std::vector<Term> args) {
    return Term(Kind::kCompound, std::move(functor), BigInt(), 0,
                std::move(args));
  }

  Kind kind() const { return rep_->kind; }
  bool is_atom() const { return rep_->kind == Kind::kAtom; }
  bool is_var() const { return rep_->kind == Kind::kVar; }
  bool is_int() const { return rep_->kind == Kind::kInt; }
  bool is_str() const { return rep_->kind == Kind::kStr; }
  bool is_compound() const { return rep_->kind == Kind::kCompound; }
  bool is_callable() const { return is_atom() || is_compound(); }

  /// Atom name, variable name, string text, or compound functor.
  const std::string& name() const { return rep_->text; }
  const BigInt& int_value() const { return rep_->num; }
  std::uint64_t var_id() const { return rep_->var_id; }
  const std::vector<Term>& args() const { return rep_->args; }
  std::size_t arity() const { return rep_->args.size(); }

  /// functor/arity key, e.g. "owes_tax/3"; atoms have arity 0.
  std::string indicator() const {
    return rep_->text + "/" + std::to_string(arity());
  }

  bool equals(const Term& other) const {
    if (rep_ == other.rep_) return true;
    if (rep_->kind != other.rep_->kind) return false;
    switch (rep_->kind) {
      case Kind::kAtom:
      case Kind::kStr:
        return rep_->text == other.rep_->text;
      case Kind::kVar:
        return rep_->var_id == other.rep_->var_id;
      case Kind::kInt:
        return rep_->num == other.rep_->num;
      case Kind::kCompound: {
        if (rep_->text != other.rep_->text ||
            rep_->args.size() != other.rep_->args.size())
          return false;
        for (std::size_t i = 0; i < rep_->args.size(); ++i)
          if (!rep_->args[i].equals(other.rep_->args[i])) return false;
        return true;
      }
    }
    return false;
  }

  std::uint64_t max_var_id() const {
    switch (rep_->kind) {
      case Kind::kVar:
        return rep_->var_id;
      case Kind::kCompound: {
        std::uint64_t m = 0;
        for (const Term& a : rep_->args) m = std::max(m, a.max_var_id());
        return m;
      }
      default:
        return 0;
    }
  }

 private:
  struct Rep {
    Kind kind;
    std::string text;
    BigInt num;
    std::uint64_t var_id;
    std::vector<Term> args;
  };

  Term(Kind kind, std::string text, BigInt num, std::uint64_t var_id,
       std::vector<Term> args)
      : rep_(std::make_shared<const Rep>(Rep{kind, std::move(text),
                                             std::move(num), var_id,
                                             std::move(args)})) {}

  std::shared_ptr<const Rep> rep_;
};

/// Horn clause: `head.` (fact, empty body) or `head :- g1, ..., gn.`
struct Clause {
  Term head;                // Atom or Compound, never a builtin functor
  std::vector<Term> body;   // goals, each Atom or Compound

  bool is_fact() const { return body.empty(); }
};

/// Ordered clause list. Resolution tries clauses in source order, so the
/// order here is exactly the order in the parsed text.
struct Program {
  std::vector<Clause> clauses;
  std::string source_id;
  std::uint64_t max_var_id = 0;
};

// List terms use the conventional cell encoding: '[]' and '.'(Head, Tail).
inline const std::string kNilName = "[]";
inline const std::string kConsName = ".";

inline Term nil_term() { return Term::atom(kNilName); }
inline Term cons(Term head, Term tail) {
  return Term::compound(kConsName, {std::move(head), std::move(tail)});
}
inline Term make_list(const std::vector<Term>& items) {
  Term t = nil_term();
  for (std::size_t i = items.size(); i-- > 0;) t = cons(items[i], t);
  return t;
}

}  // namespace taxlog

#endif  // TAXLOG_TERM_HPP_
