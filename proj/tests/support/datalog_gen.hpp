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

// Seeded generator of small Datalog-fragment programs used to compare the
// SLD engine against the bottom-up oracle. Base relations are DAG-shaped
// (edges only from lower- to higher-numbered nodes) and recursion is right
// recursive, so top-down search terminates without tabling.

#ifndef TAXLOG_TESTS_DATALOG_GEN_HPP_
#define TAXLOG_TESTS_DATALOG_GEN_HPP_

#include <string>
#include <vector>

#include "taxlog/rng.hpp"

namespace taxlog_tests {

struct GeneratedKb {
  std::string program_text;
  std::vector<std::string> queries;
};

inline GeneratedKb generate_datalog_kb(std::uint64_t seed,
                                       bool with_negation) {
  taxlog::Rng rng(seed);
  int n_nodes = static_cast<int>(rng.next_in_range(4, 7));
  std::string src;
  int clause_count = 0;

  auto node = [](int i) { return "n" + std::to_string(i); };

  // DAG edges
  for (int i = 0; i < n_nodes; ++i) {
    for (int j = i + 1; j < n_nodes; ++j) {
      if (rng.next_in_range(0, 99) < 45 && clause_count < 18) {
        src += "edge(" + node(i) + ", " + node(j) + ").\n";
        ++clause_count;
      }
    }
  }
  // unary base relation
  for (int i = 0; i < n_nodes; ++i) {
    if (rng.next_in_range(0, 99) < 50) {
      src += "mark(" + node(i) + ").\n";
      ++clause_count;
    }
  }
  // non-recursive conjunctive view
  src += "hop(X, Y) :- edge(X, Z), edge(Z, Y).\n";
  // right-recursive closure
  src += "reach(X, Y) :- edge(X, Y).\n";
  src += "reach(X, Y) :- edge(X, Z), reach(Z, Y).\n";
  src += "linked(X) :- reach(" + node(0) + ", X).\n";
  clause_count += 4;
  if (with_negation) {
    src += "unmarked_target(Y) :- reach(" + node(0) + ", Y), \\+ mark(Y).\n";
    src += "isolated(X) :- mark(X), \\+ hop(X, X).\n";
    clause_count += 2;
  }

  GeneratedKb kb;
  kb.program_text = src;
  kb.queries = {
      "reach(" + node(0) + ", X)",
      "reach(X, " + node(n_nodes - 1) + ")",
      "hop(X, Y)",
      "linked(X)",
      "mark(X)",
      "reach(" + node(0) + ", " + node(n_nodes - 1) + ")",
  };
  if (with_negation) {
    kb.queries.push_back("unmarked_target(X)");
    kb.queries.push_back("isolated(X)");
  }
  return kb;
}

}  // namespace taxlog_tests

#endif  // TAXLOG_TESTS_DATALOG_GEN_HPP_
