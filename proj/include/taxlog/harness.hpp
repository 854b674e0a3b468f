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

#ifndef TAXLOG_HARNESS_HPP_
#define TAXLOG_HARNESS_HPP_

#include <algorithm>
#include <chrono>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "taxlog/corpus.hpp"
#include "taxlog/engine.hpp"
#include "taxlog/llm.hpp"
#include "taxlog/metrics.hpp"

namespace taxlog {

enum class EvalMode { kGoldFacts, kLlmTranslated, kDirectQa };

inline EvalMode eval_mode_from_name(const std::string& name) {
  if (name == "gold_facts") return EvalMode::kGoldFacts;
  if (name == "llm_translated") return EvalMode::kLlmTranslated;
  if (name == "direct_qa") return EvalMode::kDirectQa;
  throw CorpusError("unknown eval mode: " + name);
}

inline std::string eval_mode_name(EvalMode m) {
  switch (m) {
    case EvalMode::kGoldFacts: return "gold_facts";
    case EvalMode::kLlmTranslated: return "llm_translated";
    case EvalMode::kDirectQa: return "direct_qa";
  }
  return "";
}

namespace detail {

inline void collect_var_paths(
    const Term& t, std::vector<std::size_t>& path,
    std::vector<std::pair<std::vector<std::size_t>, std::string>>& out) {
  if (t.is_var()) {
    out.emplace_back(path, t.name());
    return;
  }
  if (t.is_compound()) {
    for (std::size_t i = 0; i < t.arity(); ++i) {
      path.push_back(i);
      collect_var_paths(t.args()[i], path, out);
      path.pop_back();
    }
  }
}

// Answer slot: the last unbound variable by position, overridable with an
// `answer_var:NAME` case tag. Returned as an argument path so anonymous
// variables work too.
inline std::optional<std::vector<std::size_t>> answer_slot_path(
    const Term& query, const std::vector<std::string>& tags) {
  std::optional<std::string> want;
  for (const auto& tag : tags)
    if (tag.rfind("answer_var:", 0) == 0) want = tag.substr(11);
  std::vector<std::size_t> path;
  std::vector<std::pair<std::vector<std::size_t>, std::string>> vars;
  collect_var_paths(query, path, vars);
  if (want) {
    for (const auto& [p, name] : vars)
      if (name == *want) return p;
    return std::nullopt;
  }
  if (vars.empty()) return std::nullopt;
  return vars.back().first;
}

inline const Term& term_at(const Term& t, const std::vector<std::size_t>& path,
                           std::size_t depth = 0) {
  if (depth == path.size()) return t;
  return term_at(t.args()[path[depth]], path, depth + 1);
}

}  // namespace detail

/// Entailment decision over a composed program: a proof means Entailment,
/// finite failure means Contradiction, a depth-bounded search that cannot
/// certify failure abstains.
inline Prediction decide_entailment(const StatuteKB& statutes,
                                    const CaseInstance& c,
                                    const Blocklist& blocklist,
                                    const SolveConfig& cfg = {}) {
  try {
    KnowledgeBase kb = compose_program(statutes, c, blocklist);
    SolveConfig one = cfg;
    one.max_solutions = 1;
    SolveOutcome out = solve(kb, c.query, one);
    if (out.exhausted())
      return Prediction::abstain(c.id, AbstainReason::kResourceExhausted,
                                 "max_depth " +
                                     std::to_string(cfg.max_depth) + " hit");
    Prediction p = Prediction::entailment(c.id, out.has_solutions());
    if (out.no_solution() && !kb.defines(c.query.name(), c.query.arity()) &&
        !is_reserved_functor(c.query.name()))
      p.note = "query predicate " + c.query.indicator() +
               " is undefined (finite failure)";
    return p;
  } catch (const AlignmentError& e) {
    return Prediction::abstain(c.id, AbstainReason::kParseFailure, e.what());
  } catch (const EvalError& e) {
    return Prediction::abstain(c.id, AbstainReason::kParseFailure, e.what());
  }
}

/// Numeric task: binds the answer slot and reports its integer value.
/// No derivation or a non-numeric slot abstains as parse_failure;
/// exhausted search abstains as resource_exhausted. Distinct values across
/// solutions attach a multiplicity warning.
inline Prediction solve_numeric(const StatuteKB& statutes,
                                const CaseInstance& c,
                                const Blocklist& blocklist,
                                const SolveConfig& cfg = {}) {
  auto slot = detail::answer_slot_path(c.query, c.tags);
  if (!slot)
    return Prediction::abstain(c.id, AbstainReason::kParseFailure,
                               "query has no answer slot variable");
  try {
    KnowledgeBase kb = compose_program(statutes, c, blocklist);
    SolveConfig few = cfg;
    few.max_solutions = 4;  // enough to detect multiplicity
    SolveOutcome out = solve(kb, c.query, few);
    if (out.exhausted())
      return Prediction::abstain(c.id, AbstainReason::kResourceExhausted,
                                 "max_depth " +
                                     std::to_string(cfg.max_depth) + " hit");
    if (out.no_solution())
      return Prediction::abstain(c.id, AbstainReason::kParseFailure,
                                 "no derivation");
    const Term& bound =
        detail::term_at(out.solutions[0].resolved_query, *slot);
    if (!bound.is_int())
      return Prediction::abstain(c.id, AbstainReason::kParseFailure,
                                 "answer slot bound to non-numeric term " +
                                     render_term(bound));
    Prediction p = Prediction::numeric(c.id, bound.int_value());
    for (std::size_t i = 1; i < out.solutions.size(); ++i) {
      const Term& other =
          detail::term_at(out.solutions[i].resolved_query, *slot);
      if (!other.is_int() || !(other.int_value() == bound.int_value())) {
        p.note = "multiple distinct derived values; reporting the first";
        break;
      }
    }
    return p;
  } catch (const AlignmentError& e) {
    return Prediction::abstain(c.id, AbstainReason::kParseFailure, e.what());
  } catch (const EvalError& e) {
    return Prediction::abstain(c.id, AbstainReason::kParseFailure, e.what());
  }
}

// ---------------------------------------------------------------------------
// Full split runs

struct RunConfig {
  EvalMode mode = EvalMode::kGoldFacts;
  SolveConfig solve;
  int jobs = 1;
  std::string dataset_name = "SARA";
  std::string statute_text;  // natural-language statutes for direct QA
  std::string events_pl;     // reference code for translation prompts
  std::string utils_pl;
};

/// The question/claim sentence handed to prompts: everything after the
/// last "Claim:" marker, or the trailing sentence for question-style cases.
inline std::string question_of(const CaseInstance& c) {
  std::size_t claim = c.text.rfind("Claim:");
  if (claim != std::string::npos)
    return detail::trim(c.text.substr(claim + 6));
  std::size_t last_stop = c.text.rfind(". ");
  if (last_stop != std::string::npos)
    return detail::trim(c.text.substr(last_stop + 2));
  return c.text;
}

namespace detail {

inline Prediction run_one_case(const StatuteKB& statutes,
                               const CaseInstance& c,
                               const Blocklist& blocklist,
                               const RunConfig& run, Provider* provider,
                               const TemplateSet* templates) {
  bool numeric = c.split.is_numeric_task();
  switch (run.mode) {
    case EvalMode::kGoldFacts:
      return numeric ? solve_numeric(statutes, c, blocklist, run.solve)
                     : decide_entailment(statutes, c, blocklist, run.solve);
    case EvalMode::kLlmTranslated: {
      auto started = std::chrono::steady_clock::now();
      Prediction p = [&]() -> Prediction {
        try {
          Program facts = translate_case(
              *provider, *templates, run.events_pl, run.utils_pl, c.text,
              question_of(c), numeric, blocklist,
              c.has_tag("asserts_conclusion"));
          CaseInstance translated = c;
          translated.gold_facts = std::move(facts);
          return numeric
                     ? solve_numeric(statutes, translated, blocklist,
                                     run.solve)
                     : decide_entailment(statutes, translated, blocklist,
                                         run.solve);
        } catch (const TranslationError& e) {
          return Prediction::abstain(c.id, AbstainReason::kParseFailure,
                                     e.what());
        } catch (const ProviderError& e) {
          return Prediction::abstain(c.id, AbstainReason::kProviderError,
                                     e.what());
        }
      }();
      if (provider != nullptr && !provider->deterministic())
        p.latency_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                           std::chrono::steady_clock::now() - started)
                           .count();
      return p;
    }
    case EvalMode::kDirectQa: {
      auto started = std::chrono::steady_clock::now();
      Prediction p = [&]() -> Prediction {
        try {
          DirectAnswer ans =
              direct_qa(*provider, *templates, run.statute_text, c.text,
                        question_of(c), numeric);
          return numeric ? Prediction::numeric(c.id, ans.value)
                         : Prediction::entailment(c.id, ans.entailed);
        } catch (const ProviderError& e) {
          return Prediction::abstain(c.id, AbstainReason::kProviderError,
                                     e.what());
        }
      }();
      if (provider != nullptr && !provider->deterministic())
        p.latency_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                           std::chrono::steady_clock::now() - started)
                           .count();
      return p;
    }
  }
  return Prediction::abstain(c.id, AbstainReason::kProviderError,
                             "unreachable mode");
}

}  // namespace detail

struct RunResult {
  std::vector<Prediction> predictions;  // ordered by case id
  std::vector<std::pair<std::string, Answer>> golds;  // aligned with above
  MetricsReport metrics;

  Json to_json() const {
    Json j;
    j["metrics"] = metrics.to_json();
    j["cases"] = Json::array();
    for (std::size_t i = 0; i < predictions.size(); ++i) {
      Json row = predictions[i].to_json();
      if (!row.contains("abstain_reason")) row["abstain_reason"] = nullptr;
      row["gold"] = golds[i].second.to_json();
      row["correct"] = prediction_correct(predictions[i], golds[i].second);
      j["cases"].push_back(row);
    }
    return j;
  }
};

/// Runs a whole split. Cases run independently (optionally in parallel);
/// the report is a deterministic fold ordered by case id regardless of
/// completion order. Provider failures become abstentions, never aborts.
inline RunResult run_split(const StatuteKB& statutes,
                           std::vector<CaseInstance> cases,
                           const Blocklist& blocklist, const RunConfig& run,
                           Provider* provider = nullptr,
                           const TemplateSet* templates = nullptr) {
  if (run.mode != EvalMode::kGoldFacts &&
      (provider == nullptr || templates == nullptr))
    throw ProviderError(eval_mode_name(run.mode) +
                        " mode requires a provider and templates");
  std::sort(cases.begin(), cases.end(),
            [](const CaseInstance& a, const CaseInstance& b) {
              return a.id < b.id;
            });
  std::vector<Prediction> preds;
  preds.reserve(cases.size());
  int jobs = std::max(1, run.jobs);
  if (jobs == 1 || cases.size() < 2) {
    for (const auto& c : cases)
      preds.push_back(detail::run_one_case(statutes, c, blocklist, run,
                                           provider, templates));
  } else {
    std::vector<std::optional<Prediction>> slots(cases.size());
    std::vector<std::thread> workers;
    std::size_t stride = static_cast<std::size_t>(jobs);
    for (std::size_t w = 0; w < stride; ++w) {
      workers.emplace_back([&, w] {
        for (std::size_t i = w; i < cases.size(); i += stride)
          slots[i] = detail::run_one_case(statutes, cases[i], blocklist, run,
                                          provider, templates);
      });
    }
    for (auto& t : workers) t.join();
    for (auto& s : slots) preds.push_back(std::move(*s));
  }
  std::vector<std::pair<std::string, Answer>> golds;
  golds.reserve(cases.size());
  for (const auto& c : cases) golds.emplace_back(c.id, c.answer);
  MetricsReport metrics = score_run(preds, golds);
  return RunResult{std::move(preds), std::move(golds), metrics};
}

}  // namespace taxlog

#endif  // TAXLOG_HARNESS_HPP_
