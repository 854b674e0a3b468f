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

#ifndef TAXLOG_QUIZ_HPP_
#define TAXLOG_QUIZ_HPP_

#include <array>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "taxlog/corpus.hpp"
#include "taxlog/harness.hpp"
#include "taxlog/rng.hpp"

namespace taxlog {

inline const std::string kNoneOptionText = "None of the provided options.";

inline char position_letter(int pos) { return static_cast<char>('A' + pos); }
inline int position_index(char letter) {
  if (letter >= 'a' && letter <= 'e') return letter - 'a';
  if (letter >= 'A' && letter <= 'E') return letter - 'A';
  throw CorpusError(std::string("bad quiz position letter: ") + letter);
}

/// One five-option membership quiz item. In a BDQ all of A-D are
/// perturbations and the correct answer is E; in a BCQ exactly one of A-D
/// is the verbatim original instance.
struct QuizItem {
  std::string id;
  std::array<std::string, 5> options;   // E is always the none-option text
  std::optional<int> original_position; // 0..3 for BCQ, nullopt for BDQ
  std::string source_case_id;

  Json to_json() const {
    Json j;
    j["id"] = id;
    j["options"] = options;
    if (original_position)
      j["original_position"] = std::string(1, position_letter(
                                                  *original_position));
    else
      j["original_position"] = nullptr;
    j["source_case_id"] = source_case_id;
    return j;
  }

  static QuizItem from_json(const Json& j) {
    QuizItem item;
    item.id = j.at("id").get<std::string>();
    const auto& opts = j.at("options");
    if (!opts.is_array() || opts.size() != 5)
      throw CorpusError("quiz item " + item.id + " must have 5 options");
    for (std::size_t i = 0; i < 5; ++i)
      item.options[i] = opts[i].get<std::string>();
    if (!j.at("original_position").is_null())
      item.original_position = position_index(
          j.at("original_position").get<std::string>()[0]);
    item.source_case_id = j.at("source_case_id").get<std::string>();
    return item;
  }
};

struct QuizResponse {
  std::string item_id;
  int chosen;                            // 0..4
  std::optional<int> original_position;  // copied from the item for scoring

  Json to_json() const {
    Json j;
    j["item_id"] = item_id;
    j["chosen"] = std::string(1, position_letter(chosen));
    if (original_position)
      j["original_position"] = std::string(1, position_letter(
                                                  *original_position));
    else
      j["original_position"] = nullptr;
    return j;
  }

  static QuizResponse from_json(const Json& j) {
    QuizResponse r;
    r.item_id = j.at("item_id").get<std::string>();
    r.chosen = position_index(j.at("chosen").get<std::string>()[0]);
    if (j.contains("original_position") &&
        !j.at("original_position").is_null())
      r.original_position = position_index(
          j.at("original_position").get<std::string>()[0]);
    return r;
  }
};

/// The quiz option text for a case: the instance rendered the way the quiz
/// presents it (narrative, question/claim, answer label).
inline std::string quiz_instance_text(const CaseInstance& c) {
  std::string narrative = c.text;
  std::size_t claim = narrative.rfind("Claim:");
  std::string question = question_of(c);
  if (claim != std::string::npos) {
    narrative = narrative.substr(0, claim);
    while (!narrative.empty() &&
           (narrative.back() == ' ' || narrative.back() == '\n'))
      narrative.pop_back();
  }
  std::string answer;
  if (c.answer.kind == Answer::Kind::kEntailment)
    answer = c.answer.entailed ? "Entailment" : "Contradiction";
  else
    answer = c.answer.value.to_string();
  return "Text: " + narrative + "\nQuestion: " + question +
         "\nAnswer: " + answer;
}

/// Supplies >= 4 distinct meaning-preserving variants of a case's quiz
/// instance text, or nullopt when none are available.
class VariantSource {
 public:
  virtual ~VariantSource() = default;
  virtual std::optional<std::vector<std::string>> variants_for(
      const CaseInstance& c) = 0;
};

/// Pre-generated variants: {"<case_id>": ["v1", "v2", "v3", "v4"], ...}
class FileVariantSource : public VariantSource {
 public:
  static FileVariantSource load(const std::string& path) {
    FileVariantSource s;
    Json j = Json::parse(read_file(path));
    for (auto it = j.begin(); it != j.end(); ++it) {
      std::vector<std::string> vs;
      for (const auto& v : it.value()) vs.push_back(v.get<std::string>());
      s.variants_.emplace(it.key(), std::move(vs));
    }
    return s;
  }

  std::optional<std::vector<std::string>> variants_for(
      const CaseInstance& c) override {
    auto it = variants_.find(c.id);
    if (it == variants_.end()) return std::nullopt;
    return it->second;
  }

 private:
  std::map<std::string, std::vector<std::string>> variants_;
};

/// BDQ construction: options A-D are the four perturbations in a
/// seed-determined order, E is the fixed none-option. Items with missing,
/// duplicate, or original-equal variants are skipped with a warning.
inline std::vector<QuizItem> build_bdq(
    const std::vector<CaseInstance>& cases, VariantSource& source,
    std::uint64_t seed, std::vector<std::string>* warnings = nullptr) {
  std::vector<QuizItem> items;
  auto warn = [&](const std::string& msg) {
    if (warnings != nullptr) warnings->push_back(msg);
  };
  for (const CaseInstance& c : cases) {
    auto variants = source.variants_for(c);
    if (!variants || variants->size() < 4) {
      warn("case " + c.id + ": fewer than 4 variants, item skipped");
      continue;
    }
    std::string original = quiz_instance_text(c);
    std::vector<std::string> distinct;
    for (const std::string& v : *variants) {
      if (v == original) {
        distinct.clear();
        break;
      }
      bool dup = false;
      for (const std::string& d : distinct) dup = dup || d == v;
      if (!dup) distinct.push_back(v);
    }
    if (distinct.size() < 4) {
      warn("case " + c.id +
           ": variants not distinct from each other and the original, "
           "item skipped");
      continue;
    }
    distinct.resize(4);
    Rng rng = Rng::derive(seed, "bdq:" + c.id);
    rng.shuffle(distinct);
    QuizItem item;
    item.id = "bdq__" + c.id;
    for (int i = 0; i < 4; ++i) item.options[i] = distinct[i];
    item.options[4] = kNoneOptionText;
    item.original_position = std::nullopt;
    item.source_case_id = c.id;
    items.push_back(std::move(item));
  }
  return items;
}

/// Positional bias profile over a BDQ run. non_preferred holds the
/// substantive positions (A-D) selected strictly below chance (1/5); a
/// rate of exactly 0.2 is NOT non-preferred.
struct PositionProfile {
  std::array<double, 5> rate{};
  std::size_t n_items = 0;
  std::vector<int> non_preferred;

  Json to_json() const {
    Json j;
    Json rates;
    for (int p = 0; p < 5; ++p)
      rates[std::string(1, position_letter(p))] = rate[p];
    j["selection_rate"] = rates;
    j["n_items"] = n_items;
    Json np = Json::array();
    for (int p : non_preferred)
      np.push_back(std::string(1, position_letter(p)));
    j["non_preferred"] = np;
    return j;
  }
};

inline PositionProfile position_bias(
    const std::vector<QuizResponse>& responses) {
  if (responses.empty())
    throw CorpusError("position_bias requires at least one response");
  PositionProfile profile;
  profile.n_items = responses.size();
  for (const QuizResponse& r : responses) {
    if (r.chosen < 0 || r.chosen > 4)
      throw CorpusError("quiz response out of range for " + r.item_id);
    profile.rate[r.chosen] += 1.0;
  }
  for (double& r : profile.rate) r /= static_cast<double>(responses.size());
  for (int p = 0; p < 4; ++p)
    if (profile.rate[p] < 0.2) profile.non_preferred.push_back(p);
  return profile;
}

/// BCQ construction: one split per non-preferred position, replacing the
/// perturbation at that position with the verbatim original. When no
/// position is non-preferred, all four positions are used as fallback
/// splits (flagged to the caller).
inline std::map<int, std::vector<QuizItem>> build_bcq(
    const std::vector<QuizItem>& bdq_items, const PositionProfile& profile,
    const std::function<std::string(const std::string&)>& original_text_of,
    bool* used_fallback = nullptr, std::vector<std::string>* warnings = nullptr) {
  std::vector<int> positions = profile.non_preferred;
  bool fallback = positions.empty();
  if (fallback) {
    positions = {0, 1, 2, 3};
    if (warnings != nullptr)
      warnings->push_back(
          "no non-preferred position found; building all four splits");
  }
  if (used_fallback != nullptr) *used_fallback = fallback;
  std::map<int, std::vector<QuizItem>> splits;
  for (int pos : positions) {
    std::vector<QuizItem> split;
    split.reserve(bdq_items.size());
    for (const QuizItem& bdq : bdq_items) {
      QuizItem item = bdq;
      item.id = "bcq" + std::string(1, position_letter(pos)) + "__" +
                bdq.source_case_id;
      item.options[pos] = original_text_of(bdq.source_case_id);
      item.original_position = pos;
      split.push_back(std::move(item));
    }
    splits.emplace(pos, std::move(split));
  }
  return splits;
}

/// Fraction of BCQ responses selecting the original's position.
inline double bcq_accuracy(const std::vector<QuizResponse>& responses) {
  if (responses.empty())
    throw CorpusError("bcq_accuracy requires at least one response");
  std::size_t hits = 0;
  for (const QuizResponse& r : responses) {
    if (!r.original_position)
      throw CorpusError("BCQ response without original_position: " +
                        r.item_id);
    if (r.chosen == *r.original_position) ++hits;
  }
  return static_cast<double>(hits) / responses.size();
}

/// Chance-adjusted agreement: (p_o - p_e) / (1 - p_e). Undefined (nullopt)
/// at p_e = 1; negative values mean below-chance selection.
inline std::optional<double> kappa(double p_o, double p_e) {
  if (p_o < 0.0 || p_o > 1.0)
    throw std::invalid_argument("kappa: p_o out of [0,1]");
  if (p_e < 0.0 || p_e > 1.0)
    throw std::invalid_argument("kappa: p_e out of [0,1]");
  if (p_e == 1.0) return std::nullopt;
  return (p_o - p_e) / (1.0 - p_e);
}

struct PositionRecord {
  int position;
  double p_o;  // BCQ accuracy with the original at this position
  double p_e;  // BDQ selection rate of this position
  std::optional<double> kappa_value;
  std::size_t n_items = 0;
};

/// Contamination estimates. min_contamination is the lowest kappa across
/// non-preferred positions (the conservative bound); max_contamination the
/// highest kappa across all splits; headline_kappa is kappa at the
/// best-performing split (argmax p_o).
struct ContaminationReport {
  std::vector<PositionRecord> records;
  std::optional<double> min_contamination;
  std::optional<double> max_contamination;
  std::optional<int> best_position;
  std::optional<double> headline_kappa;
  bool non_preferred_fallback = false;
  std::uint64_t seed = 0;
  PositionProfile bdq_profile;

  Json to_json() const {
    Json j;
    j["seed"] = seed;
    j["bdq_profile"] = bdq_profile.to_json();
    j["positions"] = Json::array();
    for (const auto& rec : records) {
      Json r;
      r["position"] = std::string(1, position_letter(rec.position));
      r["p_o"] = rec.p_o;
      r["p_e"] = rec.p_e;
      if (rec.kappa_value)
        r["kappa"] = *rec.kappa_value;
      else
        r["kappa"] = nullptr;
      r["n_items"] = rec.n_items;
      j["positions"].push_back(r);
    }
    auto opt = [](const std::optional<double>& v) {
      return v ? Json(*v) : Json(nullptr);
    };
    j["min_contamination"] = opt(min_contamination);
    j["max_contamination"] = opt(max_contamination);
    j["headline_kappa"] = opt(headline_kappa);
    j["best_position"] =
        best_position ? Json(std::string(1, position_letter(*best_position)))
                      : Json(nullptr);
    j["non_preferred_fallback"] = non_preferred_fallback;
    return j;
  }
};

/// Folds per-position BCQ accuracies and the BDQ profile into the final
/// report. Each position's kappa uses that position's own BDQ rate as p_e;
/// the headline figure additionally reports kappa at the best split.
inline ContaminationReport contamination_summary(
    const PositionProfile& bdq_profile,
    const std::map<int, std::pair<double, std::size_t>>& bcq_results,
    bool used_fallback = false) {
  ContaminationReport report;
  report.bdq_profile = bdq_profile;
  report.non_preferred_fallback = used_fallback;
  for (const auto& [pos, acc_n] : bcq_results) {
    PositionRecord rec;
    rec.position = pos;
    rec.p_o = acc_n.first;
    rec.p_e = bdq_profile.rate[pos];
    rec.kappa_value = kappa(rec.p_o, rec.p_e);
    rec.n_items = acc_n.second;
    report.records.push_back(rec);
  }
  bool is_non_preferred_set[4] = {false, false, false, false};
  for (int p : bdq_profile.non_preferred) is_non_preferred_set[p] = true;
  for (const auto& rec : report.records) {
    if (!rec.kappa_value) continue;
    bool counts_for_min = used_fallback || is_non_preferred_set[rec.position];
    if (counts_for_min &&
        (!report.min_contamination ||
         *rec.kappa_value < *report.min_contamination))
      report.min_contamination = rec.kappa_value;
    if (!report.max_contamination ||
        *rec.kappa_value > *report.max_contamination)
      report.max_contamination = rec.kappa_value;
  }
  // best split by observed accuracy; ties resolved by lowest position
  const PositionRecord* best = nullptr;
  for (const auto& rec : report.records)
    if (best == nullptr || rec.p_o > best->p_o) best = &rec;
  if (best != nullptr) {
    report.best_position = best->position;
    report.headline_kappa = best->kappa_value;
  }
  return report;
}

// ---------------------------------------------------------------------------
// Simulated responders for offline calibration of the audit pipeline.

enum class ResponderKind { kMemorizer, kUniform, kAntiOriginal };

inline ResponderKind responder_from_name(const std::string& name) {
  if (name == "memorizer") return ResponderKind::kMemorizer;
  if (name == "uniform") return ResponderKind::kUniform;
  if (name == "anti") return ResponderKind::kAntiOriginal;
  throw CorpusError("unknown responder: " + name +
                    " (expected memorizer|uniform|anti)");
}

/// One simulated answer. The memorizer picks the verbatim original when
/// present and E otherwise; the uniform responder picks any of the five at
/// random; the anti-original responder never picks the original.
inline int simulate_response(ResponderKind kind, const QuizItem& item,
                             Rng& rng) {
  switch (kind) {
    case ResponderKind::kMemorizer:
      return item.original_position ? *item.original_position : 4;
    case ResponderKind::kUniform:
      return static_cast<int>(rng.next_in_range(0, 4));
    case ResponderKind::kAntiOriginal: {
      if (!item.original_position)
        return static_cast<int>(rng.next_in_range(0, 3));
      int pick = static_cast<int>(rng.next_in_range(0, 2));
      for (int p = 0; p < 4; ++p) {
        if (p == *item.original_position) continue;
        if (pick == 0) return p;
        --pick;
      }
      return 4;  // unreachable: three non-original positions always exist
    }
  }
  return 4;
}

}  // namespace taxlog

#endif  // TAXLOG_QUIZ_HPP_
