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

#ifndef TAXLOG_ENGINE_HPP_
#define TAXLOG_ENGINE_HPP_

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "taxlog/arith.hpp"
#include "taxlog/errors.hpp"
#include "taxlog/parser.hpp"
#include "taxlog/term.hpp"
#include "taxlog/unify.hpp"

namespace taxlog {

/// Indexed, order-preserving clause store. Mutable while loading; freeze()
/// before solving. A frozen KB is immutable and safe to share across
/// threads (each solve call owns its private search state).
class KnowledgeBase {
 public:
  explicit KnowledgeBase(std::string ruleset_id = "r")
      : ruleset_id_(std::move(ruleset_id)) {}

  /// Appends a program's clauses, preserving order. Rejects builtin
  /// redefinition and mutation after freeze.
  KnowledgeBase& consult(const Program& program) {
    if (frozen_) throw ConsultError("consult on frozen knowledge base");
    for (const Clause& c : program.clauses) {
      if (!c.head.is_callable())
        throw ConsultError("clause head must be an atom or compound");
      if (is_reserved_functor(c.head.name()))
        throw ConsultError("clause redefines builtin '" + c.head.name() +
                           "'");
      for (const Term& g : c.body)
        if (!g.is_callable())
          throw ConsultError("body goal must be an atom or compound");
      std::size_t idx = clauses_.size();
      clauses_.push_back(c);
      index_[c.head.indicator()].push_back(idx);
      max_var_id_ = std::max(max_var_id_, c.head.max_var_id());
      for (const Term& g : c.body)
        max_var_id_ = std::max(max_var_id_, g.max_var_id());
    }
    return *this;
  }

  void freeze() { frozen_ = true; }
  bool frozen() const { return frozen_; }

  const std::string& ruleset_id() const { return ruleset_id_; }
  void set_ruleset_id(std::string id) { ruleset_id_ = std::move(id); }

  const std::vector<Clause>& clauses() const { return clauses_; }

  /// Clause indices for functor/arity, in original source order.
  const std::vector<std::size_t>* lookup(const std::string& functor,
                                         std::size_t arity) const {
    auto it = index_.find(functor + "/" + std::to_string(arity));
    return it == index_.end() ? nullptr : &it->second;
  }

  bool defines(const std::string& functor, std::size_t arity) const {
    return lookup(functor, arity) != nullptr;
  }

  std::uint64_t max_var_id() const { return max_var_id_; }

 private:
  std::string ruleset_id_;
  std::vector<Clause> clauses_;
  std::unordered_map<std::string, std::vector<std::size_t>> index_;
  std::uint64_t max_var_id_ = 0;
  bool frozen_ = false;
};

struct SolveConfig {
  int max_depth = 4096;                     // resolution steps per derivation
  std::optional<std::size_t> max_solutions; // distinct solutions; nullopt = all
  // Disabling the occurs check permits cyclic bindings; resolving a cyclic
  // solution term does not terminate, so leave this on unless the program
  // provably never unifies a variable with a term containing it.
  bool occurs_check = true;
};

struct Solution {
  /// The query with all bindings applied; leftover unbound variables are
  /// canonically renamed _G0, _G1, ... in traversal order.
  Term resolved_query;
  /// Named query variables (anonymous `_` omitted) to their values.
  std::map<std::string, Term> bindings;
};

struct SolveOutcome {
  enum class Kind { kSolutions, kNoSolution, kResourceExhausted };

  Kind kind;
  std::vector<Solution> solutions;  // nonempty iff kind == kSolutions
  bool depth_hit = false;           // set for kResourceExhausted

  bool has_solutions() const { return kind == Kind::kSolutions; }
  bool no_solution() const { return kind == Kind::kNoSolution; }
  bool exhausted() const { return kind == Kind::kResourceExhausted; }
};

namespace detail {

// Thrown when a findall sub-search hits the depth bound: its collected list
// would be incomplete, which would be unsound to bind.
struct SearchAbort {};

struct GoalNode {
  Term goal;
  std::uint64_t barrier;  // cut target for this goal's clause context
  std::shared_ptr<const GoalNode> next;
};
using GoalList = std::shared_ptr<const GoalNode>;

inline GoalList push_goal(Term goal, std::uint64_t barrier, GoalList next) {
  return std::make_shared<const GoalNode>(
      GoalNode{std::move(goal), barrier, std::move(next)});
}

class Solver {
 public:
  Solver(const KnowledgeBase& kb, const SolveConfig& cfg, const Term& query)
      : kb_(kb), cfg_(cfg), query_(query) {
    next_var_id_ = std::max(kb.max_var_id(), query.max_var_id()) + 1;
    collect_query_vars(query);
  }

  SolveOutcome run_query() {
    emit_ = [this] { return emit_top_level(); };
    try {
      run(push_goal(query_, 0, nullptr), cfg_.max_depth);
    } catch (const SearchAbort&) {
      return SolveOutcome{SolveOutcome::Kind::kResourceExhausted, {}, true};
    }
    if (!solutions_.empty())
      return SolveOutcome{SolveOutcome::Kind::kSolutions,
                          std::move(solutions_), false};
    if (depth_hit_)
      return SolveOutcome{SolveOutcome::Kind::kResourceExhausted, {}, true};
    return SolveOutcome{SolveOutcome::Kind::kNoSolution, {}, false};
  }

 private:
  struct Flow {
    bool stop = false;        // whole search is done (enough solutions)
    std::uint64_t cut_to = 0; // nonzero: unwind clause loops to this barrier
  };

  // Depth-first, left-to-right resolution over the goal list.
  Flow run(const GoalList& goals, int depth) {
    if (goals == nullptr) {
      bool keep_going = emit_();
      return Flow{!keep_going, 0};
    }
    Term goal = subst_.walk(goals->goal);
    const GoalList& rest = goals->next;

    if (goal.is_var()) throw EvalError("unbound variable used as a goal");
    if (!goal.is_callable())
      throw EvalError("goal must be an atom or compound: " +
                      render_term(goal));

    const std::string& f = goal.name();
    std::size_t n = goal.arity();

    if (f == "true" && n == 0) return run(rest, depth);
    if (f == "fail" && n == 0) return Flow{};
    if (f == "!" && n == 0) {
      Flow flow = run(rest, depth);
      if (flow.stop || flow.cut_to != 0) return flow;
      return Flow{false, goals->barrier};
    }
    if (f == "," && n == 2) {
      GoalList expanded = push_goal(
          goal.args()[0], goals->barrier,
          push_goal(goal.args()[1], goals->barrier, rest));
      return run(expanded, depth);
    }
    if (f == "\\+" && n == 1) return solve_negation(goal, rest, depth);
    if (f == "findall" && n == 3) return solve_findall(goal, rest, depth);
    if (f == "between" && n == 3) return solve_between(goal, rest, depth);
    if (f == "is" && n == 2) {
      BigInt v = eval_arith(goal.args()[1], subst_);
      return unify_then(goal.args()[0], Term::integer(v), rest, depth);
    }
    if (f == "=" && n == 2)
      return unify_then(goal.args()[0], goal.args()[1], rest, depth);
    if (n == 2 &&
        (f == "<" || f == ">" || f == "=<" || f == ">=" || f == "=:=" ||
         f == "=\\=")) {
      BigInt a = eval_arith(goal.args()[0], subst_);
      BigInt b = eval_arith(goal.args()[1], subst_);
      bool ok = (f == "<")    ? a < b
                : (f == ">")  ? a > b
                : (f == "=<") ? a <= b
                : (f == ">=") ? a >= b
                : (f == "=:=") ? a == b
                                : a != b;
      return ok ? run(rest, depth) : Flow{};
    }
    if (n == 2 && (f == "date_before" || f == "date_after" ||
                   f == "date_leq" || f == "date_geq")) {
      std::string a = require_date(goal.args()[0], subst_);
      std::string b = require_date(goal.args()[1], subst_);
      bool ok = (f == "date_before") ? a < b
                : (f == "date_after") ? a > b
                : (f == "date_leq")   ? a <= b
                                      : a >= b;
      return ok ? run(rest, depth) : Flow{};
    }
    if (f == "date_year" && n == 2) {
      std::string d = require_date(goal.args()[0], subst_);
      return unify_then(goal.args()[1], Term::integer(date_year_of(d)), rest,
                        depth);
    }
    if (is_reserved_functor(f))
      throw EvalError("builtin " + f + " called with arity " +
                      std::to_string(n));

    return solve_user(goal, rest, depth);
  }

  Flow solve_user(const Term& goal, const GoalList& rest, int depth) {
    if (depth <= 0) {
      depth_hit_ = true;
      return Flow{};
    }
    const std::vector<std::size_t>* idxs = kb_.lookup(goal.name(),
                                                      goal.arity());
    if (idxs == nullptr) return Flow{};  // unknown predicate: finite failure
    std::uint64_t barrier = next_barrier_++;
    for (std::size_t idx : idxs[0]) {
      Clause instance = rename_clause(kb_.clauses()[idx]);
      std::size_t mark = trail_.size();
      if (unify_trail(goal, instance.head, subst_, trail_,
                      cfg_.occurs_check)) {
        GoalList goals = rest;
        for (std::size_t i = instance.body.size(); i-- > 0;)
          goals = push_goal(instance.body[i], barrier, goals);
        Flow flow = run(goals, depth - 1);
        undo_trail(subst_, trail_, mark);
        if (flow.stop) return flow;
        if (flow.cut_to != 0)
          return flow.cut_to == barrier ? Flow{} : flow;
      } else {
        undo_trail(subst_, trail_, mark);
      }
    }
    return Flow{};
  }

  // \+ G succeeds iff G finitely fails within the remaining depth. If the
  // sub-search is cut short by the depth bound, negation fails and the hit
  // is recorded so an overall failure reports ResourceExhausted instead of
  // a false NoSolution.
  Flow solve_negation(const Term& goal, const GoalList& rest, int depth) {
    Term inner = subst_.walk(goal.args()[0]);
    if (inner.is_var()) throw EvalError("\\+ on unbound variable");
    std::size_t mark = trail_.size();
    bool found = false;
    bool sub_hit = run_nested(inner, depth, [&found] {
      found = true;
      return false;
    });
    undo_trail(subst_, trail_, mark);
    if (found) return Flow{};
    if (sub_hit) {
      depth_hit_ = true;
      return Flow{};
    }
    return run(rest, depth);
  }

  Flow solve_findall(const Term& goal, const GoalList& rest, int depth) {
    const Term& tmpl = goal.args()[0];
    Term inner = subst_.walk(goal.args()[1]);
    if (!inner.is_callable())
      throw EvalError("findall goal must be callable");
    std::vector<Term> collected;
    std::size_t mark = trail_.size();
    bool sub_hit = run_nested(inner, depth, [&] {
      collected.push_back(copy_fresh(subst_.resolve(tmpl)));
      return true;
    });
    undo_trail(subst_, trail_, mark);
    if (sub_hit) throw SearchAbort{};  // incomplete list would be unsound
    return unify_then(goal.args()[2], make_list(collected), rest, depth);
  }

  Flow solve_between(const Term& goal, const GoalList& rest, int depth) {
    BigInt lo = eval_arith(goal.args()[0], subst_);
    BigInt hi = eval_arith(goal.args()[1], subst_);
    Term x = subst_.walk(goal.args()[2]);
    if (x.is_int()) {
      bool ok = lo <= x.int_value() && x.int_value() <= hi;
      return ok ? run(rest, depth) : Flow{};
    }
    if (!x.is_var())
      throw EvalError("between/3 third argument must be integer or variable");
    for (BigInt v = lo; v <= hi; v = v + BigInt(1)) {
      std::size_t mark = trail_.size();
      if (unify_trail(x, Term::integer(v), subst_, trail_,
                      cfg_.occurs_check)) {
        Flow flow = run(rest, depth);
        undo_trail(subst_, trail_, mark);
        if (flow.stop || flow.cut_to != 0) return flow;
      } else {
        undo_trail(subst_, trail_, mark);
      }
    }
    return Flow{};
  }

  Flow unify_then(const Term& a, const Term& b, const GoalList& rest,
                  int depth) {
    std::size_t mark = trail_.size();
    if (unify_trail(a, b, subst_, trail_, cfg_.occurs_check)) {
      Flow flow = run(rest, depth);
      undo_trail(subst_, trail_, mark);
      return flow;
    }
    undo_trail(subst_, trail_, mark);
    return Flow{};
  }

  // Runs a self-contained sub-search (negation, findall). Cut is opaque:
  // any cut signal is spent inside. Returns whether the sub-search hit the
  // depth bound; the caller decides what that means.
  bool run_nested(const Term& goal, int depth,
                  std::function<bool()> on_solution) {
    std::function<bool()> saved_emit = std::move(emit_);
    bool saved_hit = depth_hit_;
    depth_hit_ = false;
    emit_ = std::move(on_solution);
    std::uint64_t barrier = next_barrier_++;
    run(push_goal(goal, barrier, nullptr), depth);
    bool sub_hit = depth_hit_;
    depth_hit_ = saved_hit;
    emit_ = std::move(saved_emit);
    return sub_hit;
  }

  bool emit_top_level() {
    Term resolved = subst_.resolve(query_);
    std::unordered_map<std::uint64_t, Term> rename;
    std::uint64_t counter = 0;
    Term canon = canonicalize(resolved, rename, counter);
    std::string key = render_term(canon);
    if (seen_.insert(key).second) {
      Solution sol{canon, {}};
      for (const auto& [name, id] : query_vars_) {
        Term value = subst_.resolve(Term::var(name, id));
        sol.bindings.emplace(name, canonicalize(value, rename, counter));
      }
      solutions_.push_back(std::move(sol));
    }
    if (cfg_.max_solutions && solutions_.size() >= *cfg_.max_solutions)
      return false;
    return true;
  }

  static Term canonicalize(const Term& t,
                           std::unordered_map<std::uint64_t, Term>& rename,
                           std::uint64_t& counter) {
    switch (t.kind()) {
      case Term::Kind::kVar: {
        auto it = rename.find(t.var_id());
        if (it != rename.end()) return it->second;
        Term fresh = Term::var("_G" + std::to_string(counter), counter);
        ++counter;
        rename.emplace(t.var_id(), fresh);
        return fresh;
      }
      case Term::Kind::kCompound: {
        std::vector<Term> args;
        args.reserve(t.arity());
        for (const Term& a : t.args())
          args.push_back(canonicalize(a, rename, counter));
        return Term::compound(t.name(), std::move(args));
      }
      default:
        return t;
    }
  }

  Clause rename_clause(const Clause& c) {
    std::unordered_map<std::uint64_t, std::uint64_t> m;
    Clause out{rename_term(c.head, m), {}};
    out.body.reserve(c.body.size());
    for (const Term& g : c.body) out.body.push_back(rename_term(g, m));
    return out;
  }

  Term rename_term(const Term& t,
                   std::unordered_map<std::uint64_t, std::uint64_t>& m) {
    switch (t.kind()) {
      case Term::Kind::kVar: {
        auto it = m.find(t.var_id());
        std::uint64_t id;
        if (it == m.end()) {
          id = next_var_id_++;
          m.emplace(t.var_id(), id);
        } else {
          id = it->second;
        }
        return Term::var(t.name(), id);
      }
      case Term::Kind::kCompound: {
        std::vector<Term> args;
        args.reserve(t.arity());
        for (const Term& a : t.args()) args.push_back(rename_term(a, m));
        return Term::compound(t.name(), std::move(args));
      }
      default:
        return t;
    }
  }

  // findall copies: leftover unbound variables get fresh identities so the
  // collected terms are independent of later bindings.
  Term copy_fresh(const Term& t) {
    std::unordered_map<std::uint64_t, std::uint64_t> m;
    return rename_term(t, m);
  }

  void collect_query_vars(const Term& t) {
    if (t.is_var()) {
      if (t.name() != "_") {
        for (const auto& [name, id] : query_vars_)
          if (id == t.var_id()) return;
        query_vars_.emplace_back(t.name(), t.var_id());
      }
      return;
    }
    if (t.is_compound())
      for (const Term& a : t.args()) collect_query_vars(a);
  }

  const KnowledgeBase& kb_;
  SolveConfig cfg_;
  Term query_;
  Substitution subst_;
  std::vector<std::uint64_t> trail_;
  std::function<bool()> emit_;
  std::vector<std::pair<std::string, std::uint64_t>> query_vars_;
  std::vector<Solution> solutions_;
  std::set<std::string> seen_;
  std::uint64_t next_var_id_ = 1;
  std::uint64_t next_barrier_ = 1;
  bool depth_hit_ = false;
};

}  // namespace detail

/// Depth-bounded SLD resolution: depth-first, left-to-right, clauses in
/// source order. Solutions come back in discovery order, structurally
/// deduplicated. ResourceExhausted is reported only when no solution was
/// found AND the depth bound was hit somewhere, so a NoSolution outcome is
/// always a true finite failure.
inline SolveOutcome solve(const KnowledgeBase& kb, const Term& goal,
                          const SolveConfig& cfg = {}) {
  if (!kb.frozen())
    throw ConsultError("solve requires a frozen knowledge base");
  if (!goal.is_callable())
    throw EvalError("query goal must be an atom or compound");
  if (cfg.max_depth < 1) throw EvalError("max_depth must be >= 1");
  detail::Solver solver(kb, cfg, goal);
  return solver.run_query();
}

}  // namespace taxlog

#endif  // TAXLOG_ENGINE_HPP_
