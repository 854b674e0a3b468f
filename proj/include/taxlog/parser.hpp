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

#ifndef TAXLOG_PARSER_HPP_
#define TAXLOG_PARSER_HPP_

#include <cstdint>
#include <set>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "taxlog/errors.hpp"
#include "taxlog/term.hpp"

namespace taxlog {

// The accepted language is a deliberately small subset: facts, rules,
// queries, `%` comments, lists, arithmetic/comparison operators, negation
// as failure, cut, findall/3 and between/3. No DCG, no directives, no
// operator declarations, no floats, and no `;` disjunction (write separate
// clauses instead).

/// Functor names a program may not define clauses for.
inline const std::set<std::string>& reserved_functors() {
  static const std::set<std::string> names = {
      "is",   "=",      "<",       ">",        "=<",       ">=",
      "=:=",  "=\\=",   "findall", "between",  "true",     "fail",
      "\\+",  "!",      ",",       ";",        ".",        "[]",
      "+",    "-",      "*",       "//",       "mod",      "min",
      "max",  "abs",    ":-",      "date_before", "date_after",
      "date_leq", "date_geq", "date_year"};
  return names;
}

inline bool is_reserved_functor(const std::string& name) {
  return reserved_functors().count(name) != 0;
}

namespace detail {

enum class Tok {
  kName,     // lowercase identifier
  kVar,      // uppercase/_ identifier
  kInt,      // digit run
  kStr,      // double-quoted
  kPunct,    // operators and delimiters
  kEnd,      // end of input
};

struct Token {
  Tok type;
  std::string text;
  std::size_t line;
  std::size_t column;
};

class Lexer {
 public:
  explicit Lexer(const std::string& source) : src_(source) {}

  Token next() {
    skip_layout();
    std::size_t line = line_, col = col_;
    if (pos_ >= src_.size()) return {Tok::kEnd, "", line, col};
    char c = src_[pos_];
    if (c >= 'a' && c <= 'z') return ident(Tok::kName, line, col);
    if ((c >= 'A' && c <= 'Z') || c == '_') return ident(Tok::kVar, line, col);
    if (c >= '0' && c <= '9') {
      std::size_t start = pos_;
      while (pos_ < src_.size() && src_[pos_] >= '0' && src_[pos_] <= '9')
        advance();
      return {Tok::kInt, src_.substr(start, pos_ - start), line, col};
    }
    if (c == '"') return quoted(line, col);
    // longest-match punctuation
    static const char* multi[] = {"=:=", "=\\=", ":-", "=<", ">=", "//",
                                  "\\+"};
    for (const char* m : multi) {
      std::size_t len = std::string(m).size();
      if (src_.compare(pos_, len, m) == 0) {
        for (std::size_t i = 0; i < len; ++i) advance();
        return {Tok::kPunct, m, line, col};
      }
    }
    static const std::string single = "()[],|.!=<>+-*;";
    if (single.find(c) != std::string::npos) {
      advance();
      return {Tok::kPunct, std::string(1, c), line, col};
    }
    throw ParseError(line, col, "unexpected character", std::string(1, c));
  }

 private:
  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skip_layout() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        advance();
      } else if (c == '%') {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
      } else {
        break;
      }
    }
  }

  Token ident(Tok type, std::size_t line, std::size_t col) {
    std::size_t start = pos_;
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
          (c >= '0' && c <= '9') || c == '_') {
        advance();
      } else {
        break;
      }
    }
    return {type, src_.substr(start, pos_ - start), line, col};
  }

  Token quoted(std::size_t line, std::size_t col) {
    advance();  // opening quote
    std::string text;
    while (true) {
      if (pos_ >= src_.size())
        throw ParseError(line, col, "unterminated string", "\"");
      char c = src_[pos_];
      if (c == '\n')
        throw ParseError(line_, col_, "newline inside string", "");
      if (c == '"') {
        advance();
        return {Tok::kStr, text, line, col};
      }
      if (c == '\\') {
        advance();
        if (pos_ >= src_.size())
          throw ParseError(line_, col_, "dangling escape", "\\");
        char e = src_[pos_];
        switch (e) {
          case 'n': text.push_back('\n'); break;
          case 't': text.push_back('\t'); break;
          case '"': text.push_back('"'); break;
          case '\\': text.push_back('\\'); break;
          default:
            throw ParseError(line_, col_, "unknown escape",
                             std::string("\\") + e);
        }
        advance();
      } else {
        text.push_back(c);
        advance();
      }
    }
  }

  const std::string& src_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t col_ = 1;
};

class Parser {
 public:
  Parser(const std::string& source, std::uint64_t first_var_id)
      : lexer_(source), next_var_id_(first_var_id) {
    cur_ = lexer_.next();
  }

  Program parse_program(std::string source_id) {
    Program program;
    program.source_id = std::move(source_id);
    while (cur_.type != Tok::kEnd) program.clauses.push_back(parse_clause());
    program.max_var_id = next_var_id_ - 1;
    return program;
  }

  Term parse_single_query() {
    if (cur_.type == Tok::kEnd)
      throw ParseError(cur_.line, cur_.column, "empty query", "");
    scope_.clear();
    Term goal = parse_goal();
    require_callable(goal, "query goal");
    if (is_punct("."))
      consume();
    if (cur_.type != Tok::kEnd)
      throw ParseError(cur_.line, cur_.column,
                       "query must be a single goal", cur_.text);
    return goal;
  }

  std::uint64_t next_var_id() const { return next_var_id_; }

 private:
  [[noreturn]] void fail(const std::string& message) {
    throw ParseError(cur_.line, cur_.column, message, cur_.text);
  }

  bool is_punct(const std::string& p) const {
    return cur_.type == Tok::kPunct && cur_.text == p;
  }
  bool is_name(const std::string& n) const {
    return cur_.type == Tok::kName && cur_.text == n;
  }

  void consume() { cur_ = lexer_.next(); }

  void expect_punct(const std::string& p, const std::string& what) {
    if (!is_punct(p)) fail("expected '" + p + "' " + what);
    consume();
  }

  Clause parse_clause() {
    scope_.clear();
    Term head = parse_goal();
    if (!head.is_callable())
      fail("clause head must be an atom or compound");
    if (is_reserved_functor(head.name()))
      fail("clause head redefines reserved builtin '" + head.name() + "'");
    Clause clause{head, {}};
    if (is_punct(":-")) {
      consume();
      clause.body.push_back(parse_body_goal());
      while (is_punct(",")) {
        consume();
        clause.body.push_back(parse_body_goal());
      }
    }
    if (is_punct(";"))
      fail("disjunction ';' is not supported; write separate clauses");
    expect_punct(".", "to end clause");
    return clause;
  }

  Term parse_body_goal() {
    Term goal = parse_goal();
    require_callable(goal, "body goal");
    return goal;
  }

  void require_callable(const Term& goal, const std::string& what) {
    if (goal.is_var()) fail(what + " may not be a bare variable");
    if (!goal.is_callable()) fail(what + " must be an atom or compound");
  }

  // One goal-priority term: handles `!`, `\+`, and infix relational
  // operators. Also used for compound arguments and list elements, where
  // any term is acceptable (callers check callability where it matters).
  Term parse_goal() {
    if (is_punct("!")) {
      consume();
      return Term::atom("!");
    }
    if (is_punct("\\+")) {
      consume();
      Term operand = parse_goal();
      require_callable(operand, "negated goal");
      return Term::compound("\\+", {operand});
    }
    Term left = parse_expr();
    std::string op;
    if (cur_.type == Tok::kPunct &&
        (cur_.text == "=" || cur_.text == "<" || cur_.text == ">" ||
         cur_.text == "=<" || cur_.text == ">=" || cur_.text == "=:=" ||
         cur_.text == "=\\=")) {
      op = cur_.text;
    } else if (cur_.type == Tok::kName && cur_.text == "is") {
      op = "is";
    }
    if (op.empty()) return left;
    consume();
    Term right = parse_expr();
    return Term::compound(op, {left, right});
  }

  Term parse_expr() {
    Term left = parse_mul();
    while (cur_.type == Tok::kPunct &&
           (cur_.text == "+" || cur_.text == "-")) {
      std::string op = cur_.text;
      consume();
      Term right = parse_mul();
      left = Term::compound(op, {left, right});
    }
    return left;
  }

  Term parse_mul() {
    Term left = parse_unary();
    while ((cur_.type == Tok::kPunct &&
            (cur_.text == "*" || cur_.text == "//")) ||
           (cur_.type == Tok::kName && cur_.text == "mod")) {
      std::string op = cur_.text;
      consume();
      Term right = parse_unary();
      left = Term::compound(op, {left, right});
    }
    return left;
  }

  Term parse_unary() {
    if (is_punct("-")) {
      Token minus = cur_;
      consume();
      if (cur_.type != Tok::kInt)
        throw ParseError(minus.line, minus.column,
                         "'-' is only allowed before an integer literal",
                         cur_.text);
      Term t = Term::integer(-BigInt::from_string(cur_.text));
      consume();
      return t;
    }
    return parse_primary();
  }

  Term parse_primary() {
    switch (cur_.type) {
      case Tok::kInt: {
        Term t = Term::integer(BigInt::from_string(cur_.text));
        consume();
        return t;
      }
      case Tok::kStr: {
        Term t = Term::str(cur_.text);
        consume();
        return t;
      }
      case Tok::kVar: {
        Term t = make_var(cur_.text);
        consume();
        return t;
      }
      case Tok::kName: {
        std::string name = cur_.text;
        consume();
        if (is_punct("(")) {
          consume();
          std::vector<Term> args;
          args.push_back(parse_goal());
          while (is_punct(",")) {
            consume();
            args.push_back(parse_goal());
          }
          if (is_punct(";"))
            fail("disjunction ';' is not supported; write separate clauses");
          expect_punct(")", "to close argument list");
          return Term::compound(name, std::move(args));
        }
        return Term::atom(name);
      }
      case Tok::kPunct:
        if (cur_.text == "(") {
          consume();
          Term group = parse_group();
          expect_punct(")", "to close group");
          return group;
        }
        if (cur_.text == "[") return parse_list();
        if (cur_.text == ";")
          fail("disjunction ';' is not supported; write separate clauses");
        fail("unexpected token");
      case Tok::kEnd:
        fail("unexpected end of input");
    }
    fail("unexpected token");
  }

  // Parenthesized group: a single term or a ','-conjunction of goals.
  Term parse_group() {
    std::vector<Term> goals;
    goals.push_back(parse_goal());
    while (is_punct(",")) {
      consume();
      goals.push_back(parse_goal());
    }
    if (is_punct(";"))
      fail("disjunction ';' is not supported; write separate clauses");
    Term t = goals.back();
    for (std::size_t i = goals.size() - 1; i-- > 0;)
      t = Term::compound(",", {goals[i], t});
    return t;
  }

  Term parse_list() {
    consume();  // '['
    if (is_punct("]")) {
      consume();
      return nil_term();
    }
    std::vector<Term> items;
    items.push_back(parse_goal());
    while (is_punct(",")) {
      consume();
      items.push_back(parse_goal());
    }
    Term tail = nil_term();
    if (is_punct("|")) {
      consume();
      tail = parse_goal();
    }
    expect_punct("]", "to close list");
    Term t = tail;
    for (std::size_t i = items.size(); i-- > 0;) t = cons(items[i], t);
    return t;
  }

  Term make_var(const std::string& name) {
    if (name == "_") return Term::var("_", next_var_id_++);
    auto it = scope_.find(name);
    if (it != scope_.end()) return Term::var(name, it->second);
    std::uint64_t id = next_var_id_++;
    scope_.emplace(name, id);
    return Term::var(name, id);
  }

  Lexer lexer_;
  Token cur_;
  std::unordered_map<std::string, std::uint64_t> scope_;  // per clause
  std::uint64_t next_var_id_;
};

}  // namespace detail

/// Parses a whole program. Clause order is preserved; variable scopes are
/// per clause; throws ParseError on the first violation (no partial result).
inline Program parse_program(const std::string& source,
                             std::string source_id = "") {
  detail::Parser parser(source, 1);
  return parser.parse_program(std::move(source_id));
}

/// Parses a single goal, optionally `.`-terminated. Unbound variables are
/// permitted (they are the answer slots).
inline Term parse_query(const std::string& source) {
  detail::Parser parser(source, 1);
  return parser.parse_single_query();
}

// ---------------------------------------------------------------------------
// Rendering. parse(render(t)) is structurally equal to t; this is what the
// round-trip property tests pin down.

namespace detail {

inline bool is_binary_op(const Term& t) {
  if (!t.is_compound() || t.arity() != 2) return false;
  const std::string& f = t.name();
  return f == "+" || f == "-" || f == "*" || f == "//" || f == "mod" ||
         f == "is" || f == "=" || f == "<" || f == ">" || f == "=<" ||
         f == ">=" || f == "=:=" || f == "=\\=";
}

inline bool is_operator_shaped(const Term& t) {
  return is_binary_op(t) ||
         (t.is_compound() && t.arity() == 1 && t.name() == "\\+") ||
         (t.is_compound() && t.arity() == 2 && t.name() == ",");
}

inline bool is_word_op(const std::string& f) {
  return f == "is" || f == "mod";
}

}  // namespace detail

inline std::string render_term(const Term& t);

namespace detail {

inline std::string render_operand(const Term& t) {
  if (is_binary_op(t) || (t.is_compound() && t.name() == "\\+"))
    return "(" + render_term(t) + ")";
  return render_term(t);
}

inline std::string render_list(const Term& t) {
  std::string out = "[";
  const Term* cur = &t;
  bool first = true;
  while (cur->is_compound() && cur->name() == kConsName &&
         cur->arity() == 2) {
    if (!first) out += ",";
    out += render_term(cur->args()[0]);
    first = false;
    cur = &cur->args()[1];
  }
  if (!(cur->is_atom() && cur->name() == kNilName))
    out += "|" + render_term(*cur);
  return out + "]";
}

inline std::string escape_str(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

}  // namespace detail

inline std::string render_term(const Term& t) {
  switch (t.kind()) {
    case Term::Kind::kAtom:
      return t.name();
    case Term::Kind::kVar:
      return t.name();
    case Term::Kind::kInt:
      return t.int_value().to_string();
    case Term::Kind::kStr:
      return "\"" + detail::escape_str(t.name()) + "\"";
    case Term::Kind::kCompound: {
      if (t.name() == kConsName && t.arity() == 2)
        return detail::render_list(t);
      if (t.name() == "," && t.arity() == 2)
        return "(" + render_term(t.args()[0]) + "," +
               render_term(t.args()[1]) + ")";
      if (t.name() == "\\+" && t.arity() == 1)
        return "\\+ " + detail::render_operand(t.args()[0]);
      if (detail::is_binary_op(t)) {
        std::string op = detail::is_word_op(t.name())
                             ? " " + t.name() + " "
                             : t.name();
        return detail::render_operand(t.args()[0]) + op +
               detail::render_operand(t.args()[1]);
      }
      std::string out = t.name() + "(";
      for (std::size_t i = 0; i < t.arity(); ++i) {
        if (i != 0) out += ",";
        out += render_term(t.args()[i]);
      }
      return out + ")";
    }
  }
  return "";
}

inline std::string render_clause(const Clause& c) {
  std::string out = render_term(c.head);
  if (!c.body.empty()) {
    out += " :- ";
    for (std::size_t i = 0; i < c.body.size(); ++i) {
      if (i != 0) out += ", ";
      out += render_term(c.body[i]);
    }
  }
  return out + ".";
}

inline std::string render_program(const Program& p) {
  std::string out;
  for (const Clause& c : p.clauses) {
    out += render_clause(c);
    out += "\n";
  }
  return out;
}

}  // namespace taxlog

#endif  // TAXLOG_PARSER_HPP_
