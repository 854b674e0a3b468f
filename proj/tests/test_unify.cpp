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

#include "taxlog/unify.hpp"

#include <doctest.h>

#include "taxlog/parser.hpp"

using namespace taxlog;

namespace {
Term V(const std::string& name, std::uint64_t id) { return Term::var(name, id); }
Term A(const std::string& name) { return Term::atom(name); }
}  // namespace

TEST_CASE("textbook mgu") {
  // unify(f(X,b), f(a,Y)) -> {X->a, Y->b}
  Term left = Term::compound("f", {V("X", 1), A("b")});
  Term right = Term::compound("f", {A("a"), V("Y", 2)});
  auto s = unify(left, right, {});
  REQUIRE(s.has_value());
  CHECK(s->resolve(V("X", 1)).name() == "a");
  CHECK(s->resolve(V("Y", 2)).name() == "b");
}

TEST_CASE("identical constants unify with empty bindings") {
  auto s = unify(A("alice"), A("alice"), {});
  REQUIRE(s.has_value());
  CHECK(s->empty());
  CHECK(!unify(A("alice"), A("bob"), {}).has_value());
}

TEST_CASE("occurs check rejects X = f(X)") {
  Term x = V("X", 1);
  Term fx = Term::compound("f", {x});
  CHECK(!unify(x, fx, {}).has_value());
  // and is skippable when explicitly disabled
  CHECK(unify(x, fx, {}, false).has_value());
}

TEST_CASE("clashes fail") {
  CHECK(!unify(Term::integer(1), Term::integer(2), {}).has_value());
  CHECK(!unify(Term::str("a"), A("a"), {}).has_value());
  CHECK(!unify(Term::compound("f", {A("a")}),
               Term::compound("f", {A("a"), A("b")}), {})
             .has_value());
  CHECK(!unify(Term::compound("f", {A("a")}),
               Term::compound("g", {A("a")}), {})
             .has_value());
}

TEST_CASE("bindings extend the input substitution") {
  Substitution in;
  in.bind(1, A("a"));
  auto s = unify(V("X", 1), V("Y", 2), in);
  REQUIRE(s.has_value());
  CHECK(s->resolve(V("Y", 2)).name() == "a");
}

TEST_CASE("resolve is idempotent") {
  Term pattern = parse_query("f(X, g(Y), Z)");
  Substitution s;
  // chain: X -> Y, Y -> h(Z), Z -> 5
  std::uint64_t x = pattern.args()[0].var_id();
  std::uint64_t y = pattern.args()[1].args()[0].var_id();
  std::uint64_t z = pattern.args()[2].var_id();
  s.bind(x, Term::var("Y", y));
  s.bind(y, Term::compound("h", {Term::var("Z", z)}));
  s.bind(z, Term::integer(BigInt(5)));
  Term once = s.resolve(pattern);
  Term twice = s.resolve(once);
  CHECK(once.equals(twice));
  CHECK(render_term(once) == "f(h(5),g(h(5)),5)");
}

TEST_CASE("mgu property: any other unifier factors through it") {
  // mgu of p(X, Y) and p(Y, a) binds X and Y to a... no: mgu is {X->Y, Y->a}
  // resolved X = a. A specific unifier {X->a, Y->a} must agree with the mgu
  // after composition.
  Term l = Term::compound("p", {V("X", 1), V("Y", 2)});
  Term r = Term::compound("p", {V("Y", 2), A("a")});
  auto s = unify(l, r, {});
  REQUIRE(s.has_value());
  CHECK(s->resolve(l).equals(s->resolve(r)));
  CHECK(render_term(s->resolve(l)) == "p(a,a)");
}

TEST_CASE("trail undo restores the substitution") {
  Substitution s;
  std::vector<std::uint64_t> trail;
  std::size_t mark = trail.size();
  REQUIRE(unify_trail(V("X", 1), A("a"), s, trail));
  CHECK(s.size() == 1);
  undo_trail(s, trail, mark);
  CHECK(s.empty());
}
