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

#ifndef TAXLOG_CORPUS_HPP_
#define TAXLOG_CORPUS_HPP_

#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "taxlog/engine.hpp"
#include "taxlog/errors.hpp"
#include "taxlog/parser.hpp"
#include "taxlog/term.hpp"

namespace taxlog {

using Json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Split tags: the ten corpus rows. Base task x rule variant x case variant.

enum class SplitBase { kEe, kEn, kN };
enum class RuleVariant { kOriginal, kRPrime };
enum class CaseVariant { kOriginal, kNumericChanged, kParaphrased };

struct SplitTag {
  SplitBase base;
  RuleVariant rule_variant;
  CaseVariant case_variant;

  bool is_numeric_task() const { return base == SplitBase::kN; }
  bool is_entailment_task() const { return !is_numeric_task(); }

  std::string name() const {
    std::string b = base == SplitBase::kEe ? "Ee"
                    : base == SplitBase::kEn ? "En"
                                             : "N";
    std::string suffix;
    if (rule_variant == RuleVariant::kRPrime) suffix += "r";
    if (case_variant == CaseVariant::kNumericChanged) suffix += "c";
    if (case_variant == CaseVariant::kParaphrased) suffix += "c";
    return suffix.empty() ? b : b + "_" + suffix;
  }

  static SplitTag parse(const std::string& name) {
    static const std::map<std::string, SplitTag> rows = {
        {"N", {SplitBase::kN, RuleVariant::kOriginal, CaseVariant::kOriginal}},
        {"N_r", {SplitBase::kN, RuleVariant::kRPrime, CaseVariant::kOriginal}},
        {"N_c",
         {SplitBase::kN, RuleVariant::kOriginal, CaseVariant::kNumericChanged}},
        {"N_rc",
         {SplitBase::kN, RuleVariant::kRPrime, CaseVariant::kNumericChanged}},
        {"En", {SplitBase::kEn, RuleVariant::kOriginal, CaseVariant::kOriginal}},
        {"En_r",
         {SplitBase::kEn, RuleVariant::kRPrime, CaseVariant::kOriginal}},
        {"En_c",
         {SplitBase::kEn, RuleVariant::kOriginal,
          CaseVariant::kNumericChanged}},
        {"En_rc",
         {SplitBase::kEn, RuleVariant::kRPrime, CaseVariant::kNumericChanged}},
        {"Ee", {SplitBase::kEe, RuleVariant::kOriginal, CaseVariant::kOriginal}},
        {"Ee_c",
         {SplitBase::kEe, RuleVariant::kOriginal, CaseVariant::kParaphrased}},
    };
    auto it = rows.find(name);
    if (it == rows.end())
      throw CorpusError("unknown split tag '" + name +
                        "' (expected one of the ten corpus rows)");
    return it->second;
  }
};

// ---------------------------------------------------------------------------

struct Answer {
  enum class Kind { kEntailment, kNumeric };

  Kind kind;
  bool entailed = false;  // for kEntailment
  BigInt value;           // for kNumeric, nonnegative whole dollars

  static Answer entailment(bool is_entailed) {
    Answer a;
    a.kind = Kind::kEntailment;
    a.entailed = is_entailed;
    return a;
  }
  static Answer numeric(BigInt v) {
    Answer a;
    a.kind = Kind::kNumeric;
    a.value = std::move(v);
    return a;
  }

  Json to_json() const {
    Json j;
    if (kind == Kind::kEntailment) {
      j["kind"] = "entailment";
      j["value"] = entailed ? "Entailment" : "Contradiction";
    } else {
      j["kind"] = "numeric";
      if (auto v = value.to_int64())
        j["value"] = *v;
      else
        j["value"] = value.to_string();
    }
    return j;
  }
};

enum class Provenance { kOriginal, kGenerated };

/// One benchmark item: the fact pattern text, its gold logical facts, the
/// query, and the gold answer.
struct CaseInstance {
  std::string id;
  SplitTag split;
  std::string text;
  Program gold_facts;   // facts only, never rules
  Term query;
  Answer answer;
  Provenance provenance = Provenance::kOriginal;
  std::vector<std::string> tags;

  bool has_tag(const std::string& t) const {
    for (const auto& x : tags)
      if (x == t) return true;
    return false;
  }
};

// ---------------------------------------------------------------------------
// Statute KB wrapper: the rule half of the logic program, plus (for a
// perturbed ruleset) the numeric substitutions that produced it.

struct SubstitutionEntry {
  std::size_t clause_index;
  std::size_t goal_index;           // 0 = head, i >= 1 = i-th body goal
  std::vector<std::size_t> arg_path;  // nested argument indices
  BigInt old_value;
  BigInt new_value;
};

struct StatuteKB {
  Program program;
  std::string ruleset_id;  // "r" or "r_prime"
  std::vector<SubstitutionEntry> substitution_map;  // empty for r
};

namespace detail {

inline Term replace_at(const Term& t, const std::vector<std::size_t>& path,
                       std::size_t depth, const BigInt& old_value,
                       const BigInt& new_value) {
  if (depth == path.size()) {
    if (!t.is_int() || !(t.int_value() == old_value))
      throw CorpusError("substitution map does not match program at path");
    return Term::integer(new_value);
  }
  if (!t.is_compound() || path[depth] >= t.arity())
    throw CorpusError("substitution map path leaves the term");
  std::vector<Term> args = t.args();
  args[path[depth]] =
      replace_at(args[path[depth]], path, depth + 1, old_value, new_value);
  return Term::compound(t.name(), std::move(args));
}

}  // namespace detail

/// Applies a substitution map to a program; used both to build r' and to
/// verify that map+r reproduces r' byte-for-byte after rendering.
inline Program apply_substitution_map(
    const Program& source, const std::vector<SubstitutionEntry>& map) {
  Program out = source;
  for (const SubstitutionEntry& e : map) {
    if (e.clause_index >= out.clauses.size())
      throw CorpusError("substitution map clause index out of range");
    Clause& c = out.clauses[e.clause_index];
    Term& slot = e.goal_index == 0 ? c.head : c.body.at(e.goal_index - 1);
    slot = detail::replace_at(slot, e.arg_path, 0, e.old_value, e.new_value);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Loaders

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CorpusError("cannot open file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw CorpusError("cannot write file: " + path);
  out << content;
}

/// Loads a statute rule file. Parse failures carry the file path; an empty
/// file is valid but reported through `warnings`.
inline StatuteKB load_statutes(const std::string& path,
                               std::vector<std::string>* warnings = nullptr) {
  std::string text = read_file(path);
  Program program;
  try {
    program = parse_program(text, path);
  } catch (const ParseError& e) {
    throw ParseError(e.line(), e.column(), path + ": " + e.message(),
                     e.offending_lexeme());
  }
  if (program.clauses.empty() && warnings != nullptr)
    warnings->push_back("statute file has no clauses: " + path);
  return StatuteKB{std::move(program), "r", {}};
}

/// The computed-predicate blocklist is configuration data shipped with the
/// statute KB: one entry per line, `name/arity`, bare `name`, or `name*`.
class Blocklist {
 public:
  static Blocklist load(const std::string& path) {
    Blocklist b;
    std::istringstream in(read_file(path));
    std::string line;
    while (std::getline(in, line)) {
      while (!line.empty() && (line.back() == '\r' || line.back() == ' '))
        line.pop_back();
      std::size_t start = line.find_first_not_of(" \t");
      if (start == std::string::npos) continue;
      line = line.substr(start);
      if (line[0] == '#' || line[0] == '%') continue;
      b.add(line);
    }
    return b;
  }

  void add(const std::string& entry) {
    if (entry.empty()) return;
    if (entry.back() == '*') {
      prefixes_.push_back(entry.substr(0, entry.size() - 1));
      return;
    }
    std::size_t slash = entry.find('/');
    if (slash == std::string::npos) {
      names_.insert(entry);
    } else {
      exact_.insert(entry);
    }
  }

  bool blocked(const std::string& functor, std::size_t arity) const {
    if (names_.count(functor)) return true;
    if (exact_.count(functor + "/" + std::to_string(arity))) return true;
    for (const std::string& p : prefixes_)
      if (functor.compare(0, p.size(), p) == 0) return true;
    return false;
  }

  bool empty() const {
    return names_.empty() && exact_.empty() && prefixes_.empty();
  }

 private:
  std::set<std::string> names_;
  std::set<std::string> exact_;
  std::vector<std::string> prefixes_;
};

struct CorpusLoad {
  std::vector<CaseInstance> cases;
  std::map<std::string, int> split_counts;
  std::vector<std::string> warnings;
};

namespace detail {

inline Answer parse_answer_json(const Json& j, const SplitTag& split,
                                const std::string& id) {
  if (!j.is_object() || !j.contains("kind") || !j.contains("value"))
    throw CorpusError("case " + id + ": answer must be {kind, value}");
  std::string kind = j.at("kind").get<std::string>();
  if (kind == "entailment") {
    if (!split.is_entailment_task())
      throw CorpusError("case " + id +
                        ": entailment answer on a numeric split");
    std::string v = j.at("value").get<std::string>();
    if (v != "Entailment" && v != "Contradiction")
      throw CorpusError("case " + id + ": entailment value must be "
                        "Entailment or Contradiction, got '" + v + "'");
    return Answer::entailment(v == "Entailment");
  }
  if (kind == "numeric") {
    if (!split.is_numeric_task())
      throw CorpusError("case " + id +
                        ": numeric answer on an entailment split");
    BigInt v;
    if (j.at("value").is_number_integer())
      v = BigInt(j.at("value").get<std::int64_t>());
    else if (j.at("value").is_string())
      v = BigInt::from_string(j.at("value").get<std::string>());
    else
      throw CorpusError("case " + id + ": numeric value must be an integer");
    if (v.is_negative())
      throw CorpusError("case " + id + ": numeric answer must be >= 0");
    return Answer::numeric(std::move(v));
  }
  throw CorpusError("case " + id + ": unknown answer kind '" + kind + "'");
}

}  // namespace detail

inline CaseInstance case_from_json(const Json& rec) {
  for (const char* field : {"id", "split", "text", "facts_pl", "query_pl",
                            "answer"})
    if (!rec.contains(field))
      throw CorpusError(std::string("record missing field '") + field + "'");
  std::string id = rec.at("id").get<std::string>();
  SplitTag split = SplitTag::parse(rec.at("split").get<std::string>());
  Program facts;
  try {
    facts = parse_program(rec.at("facts_pl").get<std::string>(), id);
  } catch (const ParseError& e) {
    throw CorpusError("case " + id + ": facts_pl: " + e.what());
  }
  for (const Clause& c : facts.clauses)
    if (!c.is_fact())
      throw CorpusError("case " + id +
                        ": gold facts may not contain rules (offending head " +
                        c.head.indicator() + ")");
  Term query = [&] {
    try {
      return parse_query(rec.at("query_pl").get<std::string>());
    } catch (const ParseError& e) {
      throw CorpusError("case " + id + ": query_pl: " + e.what());
    }
  }();
  CaseInstance inst{id,
                    split,
                    rec.at("text").get<std::string>(),
                    std::move(facts),
                    std::move(query),
                    detail::parse_answer_json(rec.at("answer"), split, id),
                    Provenance::kOriginal,
                    {}};
  if (rec.contains("provenance") &&
      rec.at("provenance").get<std::string>() == "generated")
    inst.provenance = Provenance::kGenerated;
  if (rec.contains("tags"))
    for (const auto& t : rec.at("tags"))
      inst.tags.push_back(t.get<std::string>());
  return inst;
}

inline Json case_to_json(const CaseInstance& c) {
  Json j;
  j["id"] = c.id;
  j["split"] = c.split.name();
  j["text"] = c.text;
  j["facts_pl"] = render_program(c.gold_facts);
  j["query_pl"] = render_term(c.query);
  j["answer"] = c.answer.to_json();
  j["provenance"] =
      c.provenance == Provenance::kGenerated ? "generated" : "original";
  j["tags"] = c.tags;
  return j;
}

/// Loads a line-delimited case file. Facts and queries are parsed eagerly;
/// all record errors are collected before failing. When `expect_sara_totals`
/// is set the loader warns unless the corpus has the full 276-entailment /
/// 100-numeric shape.
inline CorpusLoad load_cases(const std::string& path,
                             bool expect_sara_totals = false) {
  CorpusLoad out;
  std::istringstream in(read_file(path));
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> errors;
  std::set<std::string> seen_ids;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line.find_first_not_of(" \t\r") == std::string::npos)
      continue;
    try {
      Json rec = Json::parse(line);
      CaseInstance inst = case_from_json(rec);
      if (!seen_ids.insert(inst.id).second)
        throw CorpusError("duplicate case id '" + inst.id + "'");
      out.split_counts[inst.split.name()]++;
      out.cases.push_back(std::move(inst));
    } catch (const std::exception& e) {
      errors.push_back(path + ":" + std::to_string(line_no) + ": " +
                       e.what());
    }
  }
  if (!errors.empty()) {
    std::string joined;
    for (const auto& e : errors) joined += e + "\n";
    throw CorpusError("case file invalid (" + std::to_string(errors.size()) +
                      " bad records):\n" + joined);
  }
  if (expect_sara_totals) {
    int entailment = 0, numeric = 0;
    for (const auto& c : out.cases)
      (c.split.is_numeric_task() ? numeric : entailment)++;
    if (entailment != 276)
      out.warnings.push_back("expected 276 entailment instances, found " +
                             std::to_string(entailment));
    if (numeric != 100)
      out.warnings.push_back("expected 100 numeric instances, found " +
                             std::to_string(numeric));
  }
  return out;
}

/// Composes statutes + case facts into a frozen KB ready for the query.
/// Statute clauses come first; the query itself is NOT inserted (it is the
/// solve goal). A case fact whose functor collides with a blocklisted
/// computed predicate raises AlignmentError unless the case is tagged
/// `asserts_conclusion`.
inline KnowledgeBase compose_program(const StatuteKB& statutes,
                                     const CaseInstance& case_instance,
                                     const Blocklist& blocklist) {
  if (!case_instance.has_tag("asserts_conclusion")) {
    for (const Clause& c : case_instance.gold_facts.clauses) {
      if (blocklist.blocked(c.head.name(), c.head.arity()))
        throw AlignmentError("case " + case_instance.id +
                             " asserts computed predicate " +
                             c.head.indicator() +
                             " (tag asserts_conclusion to allow)");
    }
  }
  KnowledgeBase kb(statutes.ruleset_id);
  kb.consult(statutes.program);
  kb.consult(case_instance.gold_facts);
  kb.freeze();
  return kb;
}

}  // namespace taxlog

#endif  // TAXLOG_CORPUS_HPP_
