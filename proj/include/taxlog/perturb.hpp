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

#ifndef TAXLOG_PERTURB_HPP_
#define TAXLOG_PERTURB_HPP_

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "taxlog/corpus.hpp"
#include "taxlog/engine.hpp"
#include "taxlog/harness.hpp"
#include "taxlog/rng.hpp"

namespace taxlog {

/// Which integer literals may be rescaled. Dollar amounts are eligible at
/// or above the floor; year-like values (1900-2100) are excluded by
/// default because a +-30% change to a year is nonsensical. Small
/// structural constants (rates, divisors) stay untouched via the floor.
struct NumericPolicy {
  BigInt min_eligible_amount = BigInt(1000);
  bool perturb_years = false;
  int year_shift_max = 2;
  BigInt year_low = BigInt(1900);
  BigInt year_high = BigInt(2100);

  bool year_like(const BigInt& v) const {
    return year_low <= v && v <= year_high;
  }
  bool eligible_amount(const BigInt& v) const {
    return !year_like(v) && v >= min_eligible_amount;
  }

  Json to_json() const {
    Json j;
    j["min_eligible_amount"] = min_eligible_amount.to_string();
    j["perturb_years"] = perturb_years;
    j["year_shift_max"] = year_shift_max;
    return j;
  }
};

/// Perturbation parameters. Scale and offset draws happen on a per-mille
/// grid so every derived value is exact integer arithmetic: a scale draw k
/// in [700, 1300] means multiplying by k/1000.
struct PerturbationSpec {
  double scale_min = 0.7;
  double scale_max = 1.3;
  double delta_min = 0.01;
  double delta_max = 0.05;
  std::uint64_t seed = 0;
  NumericPolicy policy;

  int scale_permille_min() const {
    return static_cast<int>(scale_min * 1000.0 + 0.5);
  }
  int scale_permille_max() const {
    return static_cast<int>(scale_max * 1000.0 + 0.5);
  }
  int delta_permille_min() const {
    return static_cast<int>(delta_min * 1000.0 + 0.5);
  }
  int delta_permille_max() const {
    return static_cast<int>(delta_max * 1000.0 + 0.5);
  }

  Json to_json() const {
    Json j;
    j["scale_range"] = {scale_min, scale_max};
    j["delta_range"] = {delta_min, delta_max};
    j["seed"] = seed;
    j["policy"] = policy.to_json();
    return j;
  }
};

namespace detail {

inline BigInt rescale(const BigInt& value, int permille) {
  return div_round_half_up(value * BigInt(permille), BigInt(1000));
}

/// One scale draw that provably changes the value (resamples collisions).
inline BigInt draw_rescaled(const BigInt& old_value,
                            const PerturbationSpec& spec, Rng& rng) {
  for (int attempt = 0; attempt < 64; ++attempt) {
    int k = static_cast<int>(rng.next_in_range(spec.scale_permille_min(),
                                               spec.scale_permille_max()));
    if (k == 1000) continue;
    BigInt candidate = rescale(old_value, k);
    if (!(candidate == old_value)) return candidate;
  }
  // tiny values can round back onto themselves for many draws; force a
  // minimal change in the direction of the last draw
  return old_value + BigInt(1);
}

struct LiteralSite {
  std::size_t clause_index;
  std::size_t goal_index;  // 0 = head
  std::vector<std::size_t> arg_path;
  BigInt value;
};

inline void collect_int_sites(const Term& t, std::size_t clause_index,
                              std::size_t goal_index,
                              std::vector<std::size_t>& path,
                              std::vector<LiteralSite>& out) {
  if (t.is_int()) {
    out.push_back(LiteralSite{clause_index, goal_index, path, t.int_value()});
    return;
  }
  if (t.is_compound()) {
    for (std::size_t i = 0; i < t.arity(); ++i) {
      path.push_back(i);
      collect_int_sites(t.args()[i], clause_index, goal_index, path, out);
      path.pop_back();
    }
  }
}

inline std::vector<LiteralSite> program_int_sites(const Program& p) {
  std::vector<LiteralSite> sites;
  for (std::size_t ci = 0; ci < p.clauses.size(); ++ci) {
    std::vector<std::size_t> path;
    collect_int_sites(p.clauses[ci].head, ci, 0, path, sites);
    for (std::size_t gi = 0; gi < p.clauses[ci].body.size(); ++gi)
      collect_int_sites(p.clauses[ci].body[gi], ci, gi + 1, path, sites);
  }
  return sites;
}

inline std::string path_label(const LiteralSite& site) {
  std::string s = std::to_string(site.clause_index) + ":" +
                  std::to_string(site.goal_index);
  for (std::size_t p : site.arg_path) s += "." + std::to_string(p);
  return s;
}

}  // namespace detail

struct RulePerturbationOutcome {
  StatuteKB kb;                      // ruleset_id "r_prime"
  std::vector<std::string> warnings;
  bool bracket_resorted = false;
};

/// Builds r' from r: every eligible integer literal is independently
/// rescaled by a seeded draw, recorded in the substitution map. Bracket
/// threshold chains that come out non-monotone are re-sorted (and
/// flagged) so the schedule stays well-formed. Structure is otherwise
/// untouched; applying the returned map to r reproduces r' exactly.
inline RulePerturbationOutcome perturb_rule_numbers(
    const StatuteKB& r, const PerturbationSpec& spec) {
  RulePerturbationOutcome out;
  std::vector<SubstitutionEntry> entries;
  std::vector<detail::LiteralSite> sites =
      detail::program_int_sites(r.program);
  for (const auto& site : sites) {
    if (spec.policy.eligible_amount(site.value)) {
      Rng rng = Rng::derive(spec.seed, "rule:" + detail::path_label(site));
      BigInt fresh = detail::draw_rescaled(site.value, spec, rng);
      entries.push_back(SubstitutionEntry{site.clause_index, site.goal_index,
                                          site.arg_path, site.value, fresh});
    } else if (spec.policy.perturb_years && spec.policy.year_like(site.value)) {
      Rng rng = Rng::derive(spec.seed, "year:" + detail::path_label(site));
      std::int64_t shift = 0;
      while (shift == 0)
        shift = rng.next_in_range(-spec.policy.year_shift_max,
                                  spec.policy.year_shift_max);
      entries.push_back(SubstitutionEntry{site.clause_index, site.goal_index,
                                          site.arg_path, site.value,
                                          site.value + BigInt(shift)});
    }
  }
  if (entries.empty())
    out.warnings.push_back("no eligible numeric literals; r' equals r");

  // threshold-chain repair: per predicate, the first `X =< N` / `X < N`
  // comparison of each clause forms the bracket chain; values must be
  // nondecreasing in clause order
  std::map<std::string, std::vector<std::size_t>> chains;  // pred -> entry idx
  for (std::size_t ei = 0; ei < entries.size(); ++ei) {
    const SubstitutionEntry& e = entries[ei];
    if (e.goal_index == 0) continue;
    const Clause& clause = r.program.clauses[e.clause_index];
    const Term& goal = clause.body[e.goal_index - 1];
    bool is_threshold = (goal.name() == "=<" || goal.name() == "<") &&
                        goal.arity() == 2 && e.arg_path.size() == 1 &&
                        e.arg_path[0] == 1;
    bool first_comparison = true;
    for (std::size_t gi = 0; gi + 1 < e.goal_index; ++gi) {
      const Term& earlier = clause.body[gi];
      if ((earlier.name() == "=<" || earlier.name() == "<") &&
          earlier.arity() == 2)
        first_comparison = false;
    }
    if (is_threshold && first_comparison)
      chains[clause.head.indicator()].push_back(ei);
  }
  for (auto& [pred, idxs] : chains) {
    if (idxs.size() < 2) continue;
    std::vector<BigInt> values;
    for (std::size_t ei : idxs) values.push_back(entries[ei].new_value);
    bool monotone = true;
    for (std::size_t i = 1; i < values.size(); ++i)
      if (values[i] < values[i - 1]) monotone = false;
    if (!monotone) {
      std::sort(values.begin(), values.end());
      for (std::size_t i = 0; i < idxs.size(); ++i)
        entries[idxs[i]].new_value = values[i];
      out.bracket_resorted = true;
      out.warnings.push_back("re-sorted bracket thresholds of " + pred);
    }
  }

  Program perturbed = apply_substitution_map(r.program, entries);
  out.kb = StatuteKB{std::move(perturbed), "r_prime", std::move(entries)};
  return out;
}

// ---------------------------------------------------------------------------
// Aligned text rewriting

namespace detail {

struct NumberSpan {
  std::size_t begin;
  std::size_t length;
  std::string digits;  // commas stripped
  bool grouped;
};

/// Maximal digit runs, consuming ",ddd" group extensions only when they
/// follow the conventional 3-digit pattern.
inline std::vector<NumberSpan> find_number_spans(const std::string& text) {
  std::vector<NumberSpan> spans;
  std::size_t i = 0;
  auto is_digit = [&](std::size_t k) {
    return k < text.size() && text[k] >= '0' && text[k] <= '9';
  };
  while (i < text.size()) {
    if (!is_digit(i)) {
      ++i;
      continue;
    }
    NumberSpan span{i, 0, "", false};
    std::size_t j = i;
    while (is_digit(j)) span.digits.push_back(text[j++]);
    while (j + 3 < text.size() && text[j] == ',' && is_digit(j + 1) &&
           is_digit(j + 2) && is_digit(j + 3) && !is_digit(j + 4)) {
      span.digits += text.substr(j + 1, 3);
      span.grouped = true;
      j += 4;
    }
    // allow a trailing ",ddd" at end of text
    if (j + 3 == text.size() && text[j] == ',' && is_digit(j + 1) &&
        is_digit(j + 2) && is_digit(j + 3)) {
      span.digits += text.substr(j + 1, 3);
      span.grouped = true;
      j += 4;
    }
    span.length = j - i;
    spans.push_back(std::move(span));
    i = j;
  }
  return spans;
}

inline std::string format_grouped(const BigInt& value) {
  std::string digits = value.to_string();
  std::string out;
  int run = 0;
  for (std::size_t i = digits.size(); i-- > 0;) {
    if (digits[i] == '-') {
      out.insert(out.begin(), '-');
      continue;
    }
    if (run == 3) {
      out.insert(out.begin(), ',');
      run = 0;
    }
    out.insert(out.begin(), digits[i]);
    ++run;
  }
  return out;
}

/// Replaces every numeric span equal to old_value with new_value in the
/// same style (grouped forms stay grouped). Returns the replacement count.
inline std::size_t replace_value_in_text(std::string& text,
                                         const BigInt& old_value,
                                         const BigInt& new_value) {
  std::string old_digits = old_value.to_string();
  std::vector<NumberSpan> spans = find_number_spans(text);
  std::size_t replaced = 0;
  for (std::size_t k = spans.size(); k-- > 0;) {  // right to left keeps offsets
    const NumberSpan& span = spans[k];
    if (span.digits != old_digits) continue;
    std::string replacement = span.grouped ? format_grouped(new_value)
                                           : new_value.to_string();
    text.replace(span.begin, span.length, replacement);
    ++replaced;
  }
  return replaced;
}

}  // namespace detail

struct CasePerturbation {
  CaseInstance item;
  std::vector<SubstitutionEntry> map;
  bool text_desync = false;  // a mapped value had no matching text span
};

/// Rescales the case's dollar amounts, one seeded draw per distinct value
/// so the natural-language text can be rewritten unambiguously. The answer
/// is left pending regeneration (tag `answer_pending`).
inline CasePerturbation perturb_case_numbers(const CaseInstance& original,
                                             const PerturbationSpec& spec) {
  std::vector<detail::LiteralSite> sites =
      detail::program_int_sites(original.gold_facts);
  std::vector<BigInt> distinct;
  for (const auto& site : sites) {
    if (!spec.policy.eligible_amount(site.value)) continue;
    bool seen = false;
    for (const auto& v : distinct) seen = seen || v == site.value;
    if (!seen) distinct.push_back(site.value);
  }
  if (distinct.empty())
    throw CorpusError("case " + original.id + ": nothing to perturb");

  std::map<std::string, BigInt> replacement;
  for (const auto& value : distinct) {
    Rng rng = Rng::derive(spec.seed,
                          "case:" + original.id + ":" + value.to_string());
    replacement.emplace(value.to_string(),
                        detail::draw_rescaled(value, spec, rng));
  }

  CasePerturbation out{original, {}, false};
  for (const auto& site : sites) {
    auto it = replacement.find(site.value.to_string());
    if (it == replacement.end()) continue;
    out.map.push_back(SubstitutionEntry{site.clause_index, site.goal_index,
                                        site.arg_path, site.value,
                                        it->second});
  }
  out.item.gold_facts =
      apply_substitution_map(original.gold_facts, out.map);
  for (const auto& value : distinct) {
    const BigInt& fresh = replacement.at(value.to_string());
    std::size_t hits =
        detail::replace_value_in_text(out.item.text, value, fresh);
    if (hits == 0) out.text_desync = true;
  }
  out.item.provenance = Provenance::kGenerated;
  out.item.tags.push_back("answer_pending");
  return out;
}

// ---------------------------------------------------------------------------
// Answer regeneration and negatives

namespace detail {

inline void drop_tag(CaseInstance& c, const std::string& tag) {
  c.tags.erase(std::remove(c.tags.begin(), c.tags.end(), tag), c.tags.end());
}

/// Path of the claim amount inside an entailment-numeric query: the last
/// integer argument by position.
inline std::optional<std::vector<std::size_t>> claim_amount_path(
    const Term& query) {
  std::optional<std::vector<std::size_t>> found;
  std::vector<std::size_t> path;
  std::function<void(const Term&)> walk = [&](const Term& t) {
    if (t.is_int()) found = path;
    if (t.is_compound())
      for (std::size_t i = 0; i < t.arity(); ++i) {
        path.push_back(i);
        walk(t.args()[i]);
        path.pop_back();
      }
  };
  walk(query);
  return found;
}

inline Term replace_path(const Term& t, const std::vector<std::size_t>& path,
                         std::size_t depth, const Term& value) {
  if (depth == path.size()) return value;
  std::vector<Term> args = t.args();
  args[path[depth]] = replace_path(args[path[depth]], path, depth + 1, value);
  return Term::compound(t.name(), std::move(args));
}

}  // namespace detail

struct DropLog {
  std::vector<std::pair<std::string, std::string>> drops;  // id, reason

  void drop(const std::string& id, const std::string& reason) {
    drops.emplace_back(id, reason);
  }
  Json to_json() const {
    Json j = Json::array();
    for (const auto& [id, reason] : drops)
      j.push_back({{"id", id}, {"reason", reason}});
    return j;
  }
};

/// Recomputes the answer by executing the composed program under the given
/// ruleset. Numeric cases get the solver value; entailment-numeric cases
/// get their positive claim rebuilt with the recomputed amount (query and
/// text); plain entailment cases are solver-verified unchanged. Returns
/// nullopt (logged) when the solver abstains or the rebuild desyncs.
inline std::optional<CaseInstance> regenerate_answer(
    const StatuteKB& statutes, CaseInstance c, const Blocklist& blocklist,
    const SolveConfig& cfg, DropLog* log) {
  auto fail = [&](const std::string& reason) -> std::optional<CaseInstance> {
    if (log != nullptr) log->drop(c.id, reason);
    return std::nullopt;
  };
  if (c.split.base == SplitBase::kN) {
    Prediction p = solve_numeric(statutes, c, blocklist, cfg);
    if (p.outcome != Prediction::Outcome::kValue)
      return fail("numeric regeneration abstained: " + p.note);
    c.answer = Answer::numeric(p.value);
    detail::drop_tag(c, "answer_pending");
    return c;
  }
  if (c.split.base == SplitBase::kEn) {
    auto amount_path = detail::claim_amount_path(c.query);
    if (!amount_path)
      return fail("entailment-numeric query has no integer claim amount");
    const Term& old_amount_term = detail::term_at(c.query, *amount_path);
    BigInt old_amount = old_amount_term.int_value();
    // recompute the correct amount with the claim slot opened up
    CaseInstance probe = c;
    probe.query = detail::replace_path(c.query, *amount_path, 0,
                                       Term::var("_", 1000000001));
    probe.tags.clear();
    Prediction p = solve_numeric(statutes, probe, blocklist, cfg);
    if (p.outcome != Prediction::Outcome::kValue)
      return fail("claim regeneration abstained: " + p.note);
    if (!(p.value == old_amount)) {
      std::size_t hits =
          detail::replace_value_in_text(c.text, old_amount, p.value);
      if (hits == 0) return fail("claim amount not found in text");
      c.query = detail::replace_path(c.query, *amount_path, 0,
                                     Term::integer(p.value));
    }
    c.answer = Answer::entailment(true);
    detail::drop_tag(c, "answer_pending");
    return c;
  }
  // Ee: nothing numeric changes; verify the stored label still holds
  Prediction p = decide_entailment(statutes, c, blocklist, cfg);
  bool holds =
      (p.outcome == Prediction::Outcome::kEntailment && c.answer.entailed) ||
      (p.outcome == Prediction::Outcome::kContradiction &&
       !c.answer.entailed);
  if (!holds) return fail("entailment label no longer verifies");
  detail::drop_tag(c, "answer_pending");
  return c;
}

/// Builds a Contradiction twin of a positive entailment-numeric case by
/// offsetting the true amount by 1-5% (seeded), rebuilding claim text and
/// query, and verifying non-derivability with the solver. Resamples the
/// offset up to 8 times before dropping the item.
inline std::optional<CaseInstance> make_negative_query(
    const CaseInstance& positive, const StatuteKB& statutes,
    const Blocklist& blocklist, const PerturbationSpec& spec,
    const SolveConfig& cfg, DropLog* log) {
  auto fail = [&](const std::string& reason) -> std::optional<CaseInstance> {
    if (log != nullptr) log->drop(positive.id, reason);
    return std::nullopt;
  };
  auto amount_path = detail::claim_amount_path(positive.query);
  if (!amount_path) return fail("no integer claim amount in query");
  BigInt truth = detail::term_at(positive.query, *amount_path).int_value();
  if (truth.is_zero() || truth.is_negative())
    return fail("offset undefined at zero truth");

  Rng rng = Rng::derive(spec.seed, "neg:" + positive.id);
  for (int attempt = 0; attempt < 8; ++attempt) {
    int delta = static_cast<int>(rng.next_in_range(
        spec.delta_permille_min(), spec.delta_permille_max()));
    bool upward = rng.next_in_range(0, 1) == 1;
    BigInt offset_value =
        detail::rescale(truth, 1000 + (upward ? delta : -delta));
    if (offset_value == truth)
      offset_value = truth + (upward ? BigInt(1) : BigInt(-1));
    if (offset_value.is_negative()) offset_value = truth + BigInt(1);

    CaseInstance negative = positive;
    negative.query = detail::replace_path(positive.query, *amount_path, 0,
                                          Term::integer(offset_value));
    std::size_t hits =
        detail::replace_value_in_text(negative.text, truth, offset_value);
    if (hits == 0) return fail("claim amount not found in text");
    negative.answer = Answer::entailment(false);
    negative.provenance = Provenance::kGenerated;

    // solver check: the offset claim must be finitely non-derivable
    try {
      KnowledgeBase kb = compose_program(statutes, negative, blocklist);
      SolveConfig one = cfg;
      one.max_solutions = 1;
      SolveOutcome out = solve(kb, negative.query, one);
      if (out.no_solution()) return negative;
      if (out.exhausted()) return fail("negative check exhausted the solver");
      // offset accidentally landed on a derivable amount; resample
    } catch (const std::exception& e) {
      return fail(std::string("negative check failed: ") + e.what());
    }
  }
  return fail("could not find a non-derivable offset in 8 attempts");
}

// ---------------------------------------------------------------------------
// Split assembly

enum class CaseOp { kNone, kNumeric, kParaphrase };

inline CaseOp case_op_from_name(const std::string& name) {
  if (name == "none") return CaseOp::kNone;
  if (name == "numeric") return CaseOp::kNumeric;
  if (name == "paraphrase") return CaseOp::kParaphrase;
  throw CorpusError("unknown case op: " + name);
}

using ParaphraseSource =
    std::function<std::optional<std::string>(const CaseInstance&)>;

/// Paraphrases from a pre-generated file {"<case_id>": "paraphrased text"}.
inline ParaphraseSource paraphrase_file_source(const std::string& path) {
  auto table = std::make_shared<std::map<std::string, std::string>>();
  Json j = Json::parse(read_file(path));
  for (auto it = j.begin(); it != j.end(); ++it)
    table->emplace(it.key(), it.value().get<std::string>());
  return [table](const CaseInstance& c) -> std::optional<std::string> {
    auto it = table->find(c.id);
    if (it == table->end()) return std::nullopt;
    return it->second;
  };
}

struct SplitResult {
  std::string split_name;
  std::vector<CaseInstance> items;
  StatuteKB ruleset;  // the ruleset the split's answers were derived under
  Json manifest;
};

/// Emits one of the seven generated corpus rows: {N, En} x {rule change,
/// case numeric change, both} plus the Ee paraphrase split. Every emitted
/// item's label is solver-verified under the split's own ruleset;
/// entailment-numeric splits come out as balanced positive/negative pairs.
inline SplitResult assemble_split(const std::vector<CaseInstance>& base_cases,
                                  const StatuteKB& statutes_r,
                                  SplitBase target_base,
                                  RuleVariant kb_choice, CaseOp case_op,
                                  const PerturbationSpec& spec,
                                  const Blocklist& blocklist,
                                  const SolveConfig& solve_cfg = {},
                                  ParaphraseSource paraphrase = nullptr,
                                  std::string source_corpus_hash = "") {
  // the combination must be one of the generated corpus rows
  if (target_base == SplitBase::kEe) {
    if (case_op != CaseOp::kParaphrase || kb_choice != RuleVariant::kOriginal)
      throw CorpusError(
          "Ee admits only the paraphrase split under the original rules");
  } else {
    if (case_op == CaseOp::kParaphrase)
      throw CorpusError("paraphrase applies to the Ee base only");
    if (kb_choice == RuleVariant::kOriginal && case_op == CaseOp::kNone)
      throw CorpusError(
          "original rules with unchanged cases is not a generated split");
  }

  CaseVariant case_variant =
      case_op == CaseOp::kNumeric ? CaseVariant::kNumericChanged
      : case_op == CaseOp::kParaphrase ? CaseVariant::kParaphrased
                                       : CaseVariant::kOriginal;
  SplitTag tag{target_base, kb_choice, case_variant};
  std::string split_name = tag.name();

  RulePerturbationOutcome rule_outcome;
  const StatuteKB* active = &statutes_r;
  if (kb_choice == RuleVariant::kRPrime) {
    rule_outcome = perturb_rule_numbers(statutes_r, spec);
    active = &rule_outcome.kb;
  }

  DropLog log;
  std::vector<CaseInstance> selected;
  for (const CaseInstance& c : base_cases)
    if (c.split.base == target_base &&
        c.split.case_variant == CaseVariant::kOriginal &&
        c.split.rule_variant == RuleVariant::kOriginal)
      selected.push_back(c);
  std::sort(selected.begin(), selected.end(),
            [](const CaseInstance& a, const CaseInstance& b) {
              return a.id < b.id;
            });

  std::vector<CaseInstance> items;
  for (const CaseInstance& source : selected) {
    CaseInstance working = source;
    if (case_op == CaseOp::kNumeric) {
      try {
        CasePerturbation perturbed = perturb_case_numbers(source, spec);
        if (perturbed.text_desync) {
          log.drop(source.id, "text_desync");
          continue;
        }
        working = std::move(perturbed.item);
      } catch (const CorpusError& e) {
        log.drop(source.id, e.what());
        continue;
      }
    } else if (case_op == CaseOp::kParaphrase) {
      if (!paraphrase) {
        log.drop(source.id, "no paraphrase source configured");
        continue;
      }
      auto text = paraphrase(source);
      if (!text) {
        log.drop(source.id, "no paraphrase available");
        continue;
      }
      working.text = *text;
      working.provenance = Provenance::kGenerated;
    }
    working.split = tag;

    if (target_base == SplitBase::kEn) {
      auto positive = regenerate_answer(*active, working, blocklist,
                                        solve_cfg, &log);
      if (!positive) continue;
      auto negative = make_negative_query(*positive, *active, blocklist,
                                          spec, solve_cfg, &log);
      if (!negative) {
        log.drop(source.id, "pair dropped to keep positives and negatives "
                            "balanced");
        continue;
      }
      positive->id = source.id + "__" + tag.name() + "__pos";
      negative->id = source.id + "__" + tag.name() + "__neg";
      positive->provenance = Provenance::kGenerated;
      items.push_back(std::move(*positive));
      items.push_back(std::move(*negative));
    } else {
      auto regenerated = regenerate_answer(*active, working, blocklist,
                                           solve_cfg, &log);
      if (!regenerated) continue;
      regenerated->id = source.id + "__" + tag.name();
      regenerated->provenance = Provenance::kGenerated;
      items.push_back(std::move(*regenerated));
    }
  }

  SplitResult result;
  result.split_name = split_name;
  result.items = std::move(items);
  result.ruleset = active == &statutes_r ? statutes_r : rule_outcome.kb;

  Json manifest;
  manifest["split"] = result.split_name;
  manifest["seed"] = spec.seed;
  manifest["spec"] = spec.to_json();
  manifest["ruleset_id"] = result.ruleset.ruleset_id;
  manifest["source_corpus_hash"] = source_corpus_hash;
  manifest["emitted"] = result.items.size();
  manifest["drops"] = log.to_json();
  manifest["bracket_resorted"] = rule_outcome.bracket_resorted;
  Json warn = Json::array();
  for (const auto& w : rule_outcome.warnings) warn.push_back(w);
  manifest["warnings"] = warn;
  if (!result.ruleset.substitution_map.empty()) {
    Json subs = Json::array();
    for (const auto& e : result.ruleset.substitution_map) {
      Json s;
      s["clause"] = e.clause_index;
      s["goal"] = e.goal_index;
      s["arg_path"] = e.arg_path;
      s["old"] = e.old_value.to_string();
      s["new"] = e.new_value.to_string();
      subs.push_back(s);
    }
    manifest["substitution_map"] = subs;
  }
  result.manifest = std::move(manifest);
  return result;
}

/// The split name an (base, kb_choice, case_op) combination produces, for
/// CLI validation before doing any work.
inline std::string split_name_for(SplitBase base, RuleVariant rule,
                                  CaseOp op) {
  CaseVariant cv = op == CaseOp::kNumeric ? CaseVariant::kNumericChanged
                   : op == CaseOp::kParaphrase ? CaseVariant::kParaphrased
                                               : CaseVariant::kOriginal;
  return SplitTag{base, rule, cv}.name();
}

}  // namespace taxlog

#endif  // TAXLOG_PERTURB_HPP_
