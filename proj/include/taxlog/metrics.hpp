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

#ifndef TAXLOG_METRICS_HPP_
#define TAXLOG_METRICS_HPP_

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "taxlog/corpus.hpp"

namespace taxlog {

enum class AbstainReason { kParseFailure, kResourceExhausted, kProviderError };

inline std::string abstain_reason_name(AbstainReason r) {
  switch (r) {
    case AbstainReason::kParseFailure: return "parse_failure";
    case AbstainReason::kResourceExhausted: return "resource_exhausted";
    case AbstainReason::kProviderError: return "provider_error";
  }
  return "";
}

/// One model/solver output for one case. Abstain is a deliberate
/// non-answer and carries exactly one reason.
struct Prediction {
  enum class Outcome { kEntailment, kContradiction, kValue, kAbstain };

  std::string case_id;
  Outcome outcome;
  BigInt value;                  // for kValue
  AbstainReason abstain_reason;  // for kAbstain
  std::string note;
  std::int64_t latency_ms = 0;

  static Prediction entailment(std::string id, bool entailed) {
    Prediction p;
    p.case_id = std::move(id);
    p.outcome = entailed ? Outcome::kEntailment : Outcome::kContradiction;
    return p;
  }
  static Prediction numeric(std::string id, BigInt v) {
    Prediction p;
    p.case_id = std::move(id);
    p.outcome = Outcome::kValue;
    p.value = std::move(v);
    return p;
  }
  static Prediction abstain(std::string id, AbstainReason reason,
                            std::string note = "") {
    Prediction p;
    p.case_id = std::move(id);
    p.outcome = Outcome::kAbstain;
    p.abstain_reason = reason;
    p.note = std::move(note);
    return p;
  }

  bool abstained() const { return outcome == Outcome::kAbstain; }

  Json to_json() const {
    Json j;
    j["id"] = case_id;
    switch (outcome) {
      case Outcome::kEntailment: j["outcome"] = "Entailment"; break;
      case Outcome::kContradiction: j["outcome"] = "Contradiction"; break;
      case Outcome::kValue:
        j["outcome"] = "Value";
        if (auto v = value.to_int64())
          j["value"] = *v;
        else
          j["value"] = value.to_string();
        break;
      case Outcome::kAbstain:
        j["outcome"] = "Abstain";
        j["abstain_reason"] = abstain_reason_name(abstain_reason);
        break;
    }
    if (!note.empty()) j["note"] = note;
    j["latency_ms"] = latency_ms;
    return j;
  }
};

/// Aggregate scores. Acc covers entailment items, EM/M10 numeric items,
/// Err counts incorrect answers among the non-abstained of both kinds.
/// Abstentions count as not-correct for Acc/EM/M10 but are excluded from
/// Err's denominator. Metrics over an empty subset report 0.
struct MetricsReport {
  double acc = 0.0;
  double em = 0.0;
  double m10 = 0.0;
  double err = 0.0;
  struct Counts {
    std::size_t total = 0;
    std::size_t correct = 0;
    std::size_t incorrect = 0;
    std::size_t abstained = 0;
  } counts;
  std::size_t entailment_total = 0;
  std::size_t numeric_total = 0;

  Json to_json() const {
    Json j;
    j["acc"] = acc;
    j["em"] = em;
    j["m10"] = m10;
    j["err"] = err;
    j["counts"] = {{"total", counts.total},
                   {"correct", counts.correct},
                   {"incorrect", counts.incorrect},
                   {"abstained", counts.abstained}};
    j["entailment_total"] = entailment_total;
    j["numeric_total"] = numeric_total;
    return j;
  }

  std::string summary_line() const {
    char buf[96];
    std::snprintf(buf, sizeof(buf), "Acc %.3f  EM %.3f  M10 %.3f  Err %.3f",
                  acc, em, m10, err);
    return buf;
  }
};

/// Exact-integer check for "within 10% of truth": 10*|pred - truth| <=
/// truth. With truth = 0 the only hit is pred = 0.
inline bool within_ten_percent(const BigInt& pred, const BigInt& truth) {
  if (truth.is_zero()) return pred.is_zero();
  return BigInt(10) * (pred - truth).abs() <= truth;
}

inline bool prediction_correct(const Prediction& pred, const Answer& gold) {
  if (pred.abstained()) return false;
  if (gold.kind == Answer::Kind::kEntailment) {
    if (gold.entailed) return pred.outcome == Prediction::Outcome::kEntailment;
    return pred.outcome == Prediction::Outcome::kContradiction;
  }
  return pred.outcome == Prediction::Outcome::kValue &&
         pred.value == gold.value;
}

/// Scores a run. Predictions and golds must be aligned by case id; any
/// mismatch aborts scoring.
inline MetricsReport score_run(
    const std::vector<Prediction>& preds,
    const std::vector<std::pair<std::string, Answer>>& golds) {
  if (preds.size() != golds.size())
    throw CorpusError("score_run: prediction/gold length mismatch (" +
                      std::to_string(preds.size()) + " vs " +
                      std::to_string(golds.size()) + ")");
  MetricsReport r;
  std::size_t acc_hits = 0, em_hits = 0, m10_hits = 0;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    const Prediction& p = preds[i];
    const Answer& gold = golds[i].second;
    if (p.case_id != golds[i].first)
      throw CorpusError("score_run: id mismatch at index " +
                        std::to_string(i) + ": '" + p.case_id + "' vs '" +
                        golds[i].first + "'");
    ++r.counts.total;
    bool correct = prediction_correct(p, gold);
    if (p.abstained())
      ++r.counts.abstained;
    else if (correct)
      ++r.counts.correct;
    else
      ++r.counts.incorrect;
    if (gold.kind == Answer::Kind::kEntailment) {
      ++r.entailment_total;
      if (correct) ++acc_hits;
    } else {
      ++r.numeric_total;
      if (correct) ++em_hits;
      if (!p.abstained() && p.outcome == Prediction::Outcome::kValue &&
          within_ten_percent(p.value, gold.value))
        ++m10_hits;
    }
  }
  if (r.entailment_total > 0)
    r.acc = static_cast<double>(acc_hits) / r.entailment_total;
  if (r.numeric_total > 0) {
    r.em = static_cast<double>(em_hits) / r.numeric_total;
    r.m10 = static_cast<double>(m10_hits) / r.numeric_total;
  }
  std::size_t answered = r.counts.total - r.counts.abstained;
  r.err = answered == 0
              ? 0.0
              : static_cast<double>(r.counts.incorrect) / answered;
  return r;
}

}  // namespace taxlog

#endif  // TAXLOG_METRICS_HPP_
