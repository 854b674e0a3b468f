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

#ifndef TAXLOG_UNIFY_HPP_
#define TAXLOG_UNIFY_HPP_

#include <cstdint>
#include <optional>
#include <unordered_map>
#include <vector>

#include "taxlog/term.hpp"

namespace taxlog {

/// Variable bindings, id -> Term. Acyclic when the occurs check is on;
/// resolve() is idempotent (applying twice equals applying once).
class Substitution {
 public:
  const Term* lookup(std::uint64_t id) const {
    auto it = map_.find(id);
    return it == map_.end() ? nullptr : &it->second;
  }

  /// Shallow dereference: follows variable chains to the representative.
  Term walk(Term t) const {
    while (t.is_var()) {
      const Term* bound = lookup(t.var_id());
      if (bound == nullptr) return t;
      t = *bound;
    }
    return t;
  }

  /// Deep dereference: every bound variable replaced, recursively.
  Term resolve(const Term& t) const {
    Term w = walk(t);
    if (!w.is_compound()) return w;
    std::vector<Term> args;
    args.reserve(w.arity());
    for (const Term& a : w.args()) args.push_back(resolve(a));
    return Term::compound(w.name(), std::move(args));
  }

  void bind(std::uint64_t id, Term t) { map_.insert_or_assign(id, std::move(t)); }
  void erase(std::uint64_t id) { map_.erase(id); }
  std::size_t size() const { return map_.size(); }
  bool empty() const { return map_.empty(); }

 private:
  std::unordered_map<std::uint64_t, Term> map_;
};

namespace detail {

inline bool occurs(std::uint64_t id, const Term& t, const Substitution& s) {
  Term w = s.walk(t);
  if (w.is_var()) return w.var_id() == id;
  if (w.is_compound()) {
    for (const Term& a : w.args())
      if (occurs(id, a, s)) return true;
  }
  return false;
}

}  // namespace detail

/// Destructive unification; new bindings are appended to `trail` so callers
/// can rewind on backtracking. Returns false (with partial bindings still
/// trailed) on clash or occurs-check violation.
inline bool unify_trail(const Term& a, const Term& b, Substitution& s,
                        std::vector<std::uint64_t>& trail,
                        bool occurs_check = true) {
  Term x = s.walk(a);
  Term y = s.walk(b);
  if (x.is_var() && y.is_var() && x.var_id() == y.var_id()) return true;
  if (x.is_var()) {
    if (occurs_check && detail::occurs(x.var_id(), y, s)) return false;
    s.bind(x.var_id(), y);
    trail.push_back(x.var_id());
    return true;
  }
  if (y.is_var()) {
    if (occurs_check && detail::occurs(y.var_id(), x, s)) return false;
    s.bind(y.var_id(), x);
    trail.push_back(y.var_id());
    return true;
  }
  if (x.kind() != y.kind()) return false;
  switch (x.kind()) {
    case Term::Kind::kAtom:
    case Term::Kind::kStr:
      return x.name() == y.name();
    case Term::Kind::kInt:
      return x.int_value() == y.int_value();
    case Term::Kind::kCompound: {
      if (x.name() != y.name() || x.arity() != y.arity()) return false;
      for (std::size_t i = 0; i < x.arity(); ++i)
        if (!unify_trail(x.args()[i], y.args()[i], s, trail, occurs_check))
          return false;
      return true;
    }
    default:
      return false;
  }
}

inline void undo_trail(Substitution& s, std::vector<std::uint64_t>& trail,
                       std::size_t mark) {
  while (trail.size() > mark) {
    s.erase(trail.back());
    trail.pop_back();
  }
}

/// Most-general-unifier interface: extends `in` or reports failure.
inline std::optional<Substitution> unify(const Term& a, const Term& b,
                                         Substitution in,
                                         bool occurs_check = true) {
  std::vector<std::uint64_t> trail;
  if (unify_trail(a, b, in, trail, occurs_check)) return in;
  return std::nullopt;
}

}  // namespace taxlog

#endif  // TAXLOG_UNIFY_HPP_
