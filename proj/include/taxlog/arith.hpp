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

#ifndef TAXLOG_ARITH_HPP_
#define TAXLOG_ARITH_HPP_

#include <string>

#include "taxlog/bigint.hpp"
#include "taxlog/errors.hpp"
#include "taxlog/parser.hpp"
#include "taxlog/term.hpp"
#include "taxlog/unify.hpp"

namespace taxlog {

/// Evaluates an arithmetic expression to an exact integer. Operators:
/// + - * // mod min max abs. `//` truncates toward negative infinity and
/// mod pairs with it (result follows the divisor's sign).
inline BigInt eval_arith(const Term& expr, const Substitution& s) {
  Term t = s.walk(expr);
  switch (t.kind()) {
    case Term::Kind::kInt:
      return t.int_value();
    case Term::Kind::kVar:
      throw EvalError("arithmetic on unbound variable " + t.name());
    case Term::Kind::kAtom:
    case Term::Kind::kStr:
      throw EvalError("non-numeric operand in arithmetic: " + render_term(t));
    case Term::Kind::kCompound: {
      const std::string& f = t.name();
      if (t.arity() == 1 && f == "abs") return eval_arith(t.args()[0], s).abs();
      if (t.arity() == 2) {
        BigInt a = eval_arith(t.args()[0], s);
        BigInt b = eval_arith(t.args()[1], s);
        if (f == "+") return a + b;
        if (f == "-") return a - b;
        if (f == "*") return a * b;
        if (f == "//") {
          if (b.is_zero()) throw EvalError("division by zero");
          return floor_div(a, b);
        }
        if (f == "mod") {
          if (b.is_zero()) throw EvalError("division by zero in mod");
          return floor_mod(a, b);
        }
        if (f == "min") return min(a, b);
        if (f == "max") return max(a, b);
      }
      throw EvalError("unknown arithmetic functor: " + t.indicator());
    }
  }
  throw EvalError("unreachable arithmetic case");
}

// ---------------------------------------------------------------------------
// Date support. Dates are quoted "YYYY-MM-DD" strings compared
// lexicographically; the shape is validated at builtin call time.

inline bool is_date_string(const std::string& s) {
  if (s.size() != 10) return false;
  for (std::size_t i = 0; i < 10; ++i) {
    if (i == 4 || i == 7) {
      if (s[i] != '-') return false;
    } else if (s[i] < '0' || s[i] > '9') {
      return false;
    }
  }
  return true;
}

inline std::string require_date(const Term& t, const Substitution& s) {
  Term w = s.walk(t);
  if (!w.is_str())
    throw EvalError("date builtin needs a quoted \"YYYY-MM-DD\" string, got " +
                    render_term(w));
  if (!is_date_string(w.name()))
    throw EvalError("malformed date string \"" + w.name() + "\"");
  return w.name();
}

inline BigInt date_year_of(const std::string& date) {
  return BigInt::from_string(date.substr(0, 4));
}

}  // namespace taxlog

#endif  // TAXLOG_ARITH_HPP_
