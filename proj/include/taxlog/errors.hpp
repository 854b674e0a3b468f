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

#ifndef TAXLOG_ERRORS_HPP_
#define TAXLOG_ERRORS_HPP_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace taxlog {

/// Lexical or syntactic failure; line/column are 1-based into the original
/// source text. Parsing stops at the first violation.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, std::size_t column, std::string message,
             std::string offending_lexeme)
      : std::runtime_error("parse error at " + std::to_string(line) + ":" +
                           std::to_string(column) + ": " + message +
                           (offending_lexeme.empty()
                                ? ""
                                : " (near '" + offending_lexeme + "')")),
        line_(line),
        column_(column),
        message_(std::move(message)),
        offending_lexeme_(std::move(offending_lexeme)) {}

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }
  const std::string& message() const { return message_; }
  const std::string& offending_lexeme() const { return offending_lexeme_; }

 private:
  std::size_t line_;
  std::size_t column_;
  std::string message_;
  std::string offending_lexeme_;
};

/// Knowledge-base construction failure (frozen mutation, builtin shadowing).
class ConsultError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Arithmetic evaluation failure: unbound variable, division by zero, or a
/// non-numeric operand (including malformed date strings in date builtins).
class EvalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Corpus file invalid: missing fields, bad record, answer/split mismatch.
class CorpusError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A case fact collides with a computed statute predicate.
class AlignmentError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Provider transport failure after retries.
class ProviderError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// LLM output rejected by the facts-only translation contract. Keeps the
/// raw response for audit.
class TranslationError : public std::runtime_error {
 public:
  TranslationError(const std::string& message, std::string raw_response)
      : std::runtime_error(message), raw_response_(std::move(raw_response)) {}
  const std::string& raw_response() const { return raw_response_; }

 private:
  std::string raw_response_;
};

}  // namespace taxlog

#endif  // TAXLOG_ERRORS_HPP_
