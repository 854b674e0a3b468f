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

#include "taxlog/quiz.hpp"

#include <doctest.h>

#include <cmath>
#include <map>
#include <string>

using namespace taxlog;

namespace {

const std::string kDataDir = std::string(TAXLOG_REPO_DIR) + "/data";

std::vector<CaseInstance> bundled_cases() {
  return load_cases(kDataDir + "/corpus/mini_cases.jsonl").cases;
}

std::map<std::string, std::string> originals_of(
    const std::vector<CaseInstance>& cases) {
  std::map<std::string, std::string> m;
  for (const auto& c : cases) m.emplace(c.id, quiz_instance_text(c));
  return m;
}

}  // namespace

TEST_CASE("kappa: 20-point grid against hand-computed oracle values") {
  struct Row {
    double p_o, p_e, expected;
  };
  // expected values computed independently with exact rational arithmetic
  static const Row grid[20] = {
      {0.2, 0.2, 0},
      {1.0, 0.1, 1},
      {0.73, 0.2, 0.66249999999999998},
      {0.61, 0.05, 0.58947368421052626},
      {0.5, 0.25, 0.33333333333333331},
      {0.0, 0.2, -0.25},
      {0.9, 0.5, 0.80000000000000004},
      {0.75, 0.5, 0.5},
      {0.6, 0.6, 0},
      {1.0, 0.0, 1},
      {0.0, 0.0, 0},
      {0.05, 0.25, -0.26666666666666666},
      {0.335, 0.2, 0.16875000000000001},
      {0.48, 0.2, 0.34999999999999998},
      {0.95, 0.19, 0.93827160493827155},
      {0.64, 0.04, 0.625},
      {0.3, 0.1, 0.22222222222222221},
      {0.825, 0.3, 0.75},
      {0.415, 0.165, 0.29940119760479039},
      {0.99, 0.9, 0.90000000000000002},
  };
  for (const Row& row : grid) {
    auto k = kappa(row.p_o, row.p_e);
    REQUIRE(k.has_value());
    CHECK(std::abs(*k - row.expected) <= 1e-12);
  }
  // kappa(p, p) = 0 and kappa(1, p) = 1 for every grid p_e < 1
  for (const Row& row : grid) {
    CHECK(std::abs(*kappa(row.p_e, row.p_e)) <= 1e-12);
    CHECK(std::abs(*kappa(1.0, row.p_e) - 1.0) <= 1e-12);
  }
}

TEST_CASE("kappa edge cases") {
  CHECK(!kappa(0.5, 1.0).has_value());  // undefined, reported null
  CHECK(*kappa(0.0, 0.5) < 0.0);        // below chance is negative
  CHECK_THROWS_AS(kappa(1.5, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(kappa(0.5, -0.1), std::invalid_argument);
}

TEST_CASE("kappa monotonicity in p_o at fixed p_e") {
  for (double pe : {0.0, 0.1, 0.2, 0.5, 0.9}) {
    double prev = -1e18;
    for (int i = 0; i <= 20; ++i) {
      double k = *kappa(i * 0.05, pe);
      CHECK(k > prev);
      prev = k;
    }
  }
}

TEST_CASE("kappa depends only on p_o and the replaced position's p_e") {
  // relabeling distractor positions cannot change the value
  CHECK(*kappa(0.7, 0.15) == *kappa(0.7, 0.15));
  PositionProfile profile;
  profile.rate = {0.15, 0.25, 0.3, 0.1, 0.2};
  profile.n_items = 100;
  profile.non_preferred = {0, 3};
  std::map<int, std::pair<double, std::size_t>> results{{0, {0.7, 100}},
                                                        {3, {0.7, 100}}};
  ContaminationReport rep = contamination_summary(profile, results);
  // same p_o, different p_e: kappas differ only through p_e
  CHECK(rep.records[0].kappa_value ==
        kappa(0.7, profile.rate[0]));
  CHECK(rep.records[1].kappa_value ==
        kappa(0.7, profile.rate[3]));
}

TEST_CASE("quiz_instance_text framing") {
  auto cases = bundled_cases();
  for (const auto& c : cases) {
    if (c.id != "ee09") continue;
    std::string t = quiz_instance_text(c);
    CHECK(t ==
          "Text: Alice is entitled to an exemption under section 151(b) "
          "during the year 2015. No other taxpayer is entitled to a "
          "deduction for Alice during 2015.\n"
          "Question: Alice's exemption amount under section 151(d)(1) is "
          "equal to $0.\n"
          "Answer: Contradiction");
  }
}

TEST_CASE("build_bdq: deterministic seeded ordering, none-option fixed") {
  auto cases = bundled_cases();
  auto source = FileVariantSource::load(kDataDir + "/quiz/bdq_variants.json");
  std::vector<std::string> warnings;
  auto items = build_bdq(cases, source, 7, &warnings);
  CHECK(items.size() == 10);  // variants are bundled for 10 cases
  CHECK(warnings.size() == cases.size() - 10);
  auto originals = originals_of(cases);
  for (const auto& item : items) {
    CHECK(item.options[4] == kNoneOptionText);
    CHECK(!item.original_position.has_value());
    for (int i = 0; i < 4; ++i)
      CHECK(item.options[i] != originals.at(item.source_case_id));
  }
  // same seed, same bytes; different seed, different order somewhere
  auto again = build_bdq(cases, source, 7, nullptr);
  REQUIRE(again.size() == items.size());
  for (std::size_t i = 0; i < items.size(); ++i)
    CHECK(again[i].to_json().dump() == items[i].to_json().dump());
  auto other = build_bdq(cases, source, 8, nullptr);
  bool any_difference = false;
  for (std::size_t i = 0; i < items.size(); ++i)
    any_difference =
        any_difference ||
        other[i].to_json().dump() != items[i].to_json().dump();
  CHECK(any_difference);
}

TEST_CASE("build_bdq skips items whose variants collide with the original") {
  auto cases = bundled_cases();
  CaseInstance target = cases[0];
  class BadSource : public VariantSource {
   public:
    std::optional<std::vector<std::string>> variants_for(
        const CaseInstance& c) override {
      std::string original = quiz_instance_text(c);
      return std::vector<std::string>{original, "v1", "v2", "v3"};
    }
  } bad;
  std::vector<std::string> warnings;
  auto items = build_bdq({target}, bad, 1, &warnings);
  CHECK(items.empty());
  REQUIRE(warnings.size() == 1);
}

TEST_CASE("position_bias examples") {
  // all-E run: every substantive position is non-preferred
  std::vector<QuizResponse> all_e;
  for (int i = 0; i < 50; ++i)
    all_e.push_back(QuizResponse{"i" + std::to_string(i), 4, std::nullopt});
  PositionProfile p = position_bias(all_e);
  CHECK(p.rate[4] == 1.0);
  CHECK(p.non_preferred == std::vector<int>{0, 1, 2, 3});

  // 60% A / 40% E: B, C, D are non-preferred
  std::vector<QuizResponse> skew;
  for (int i = 0; i < 60; ++i)
    skew.push_back(QuizResponse{"a" + std::to_string(i), 0, std::nullopt});
  for (int i = 0; i < 40; ++i)
    skew.push_back(QuizResponse{"e" + std::to_string(i), 4, std::nullopt});
  PositionProfile p2 = position_bias(skew);
  CHECK(p2.non_preferred == std::vector<int>{1, 2, 3});

  CHECK_THROWS_AS(position_bias({}), CorpusError);
}

TEST_CASE("uniform responder over many items sits near chance") {
  Rng rng(4242);
  std::vector<QuizResponse> responses;
  for (int i = 0; i < 1000; ++i) {
    QuizItem item;
    item.id = "u" + std::to_string(i);
    responses.push_back(QuizResponse{
        item.id, simulate_response(ResponderKind::kUniform, item, rng),
        std::nullopt});
  }
  PositionProfile p = position_bias(responses);
  for (int pos = 0; pos < 5; ++pos) CHECK(std::abs(p.rate[pos] - 0.2) < 0.05);
}

TEST_CASE("build_bcq places the original at each non-preferred position") {
  auto cases = bundled_cases();
  auto source = FileVariantSource::load(kDataDir + "/quiz/bdq_variants.json");
  auto bdq = build_bdq(cases, source, 7, nullptr);
  auto originals = originals_of(cases);
  PositionProfile profile;
  profile.rate = {0.5, 0.3, 0.1, 0.05, 0.05};
  profile.n_items = 100;
  profile.non_preferred = {2, 3};
  bool fallback = true;
  auto splits = build_bcq(bdq, profile,
                          [&](const std::string& id) { return originals.at(id); },
                          &fallback);
  CHECK(!fallback);
  REQUIRE(splits.size() == 2);
  for (int pos : {2, 3}) {
    REQUIRE(splits.count(pos) == 1);
    for (const auto& item : splits.at(pos)) {
      CHECK(item.original_position == pos);
      CHECK(item.options[static_cast<std::size_t>(pos)] ==
            originals.at(item.source_case_id));
      CHECK(item.options[4] == kNoneOptionText);  // E text never changes
      // exactly one option equals the original
      int hits = 0;
      for (int i = 0; i < 4; ++i)
        if (item.options[i] == originals.at(item.source_case_id)) ++hits;
      CHECK(hits == 1);
    }
  }
}

TEST_CASE("build_bcq falls back to all four positions with a warning") {
  auto cases = bundled_cases();
  auto source = FileVariantSource::load(kDataDir + "/quiz/bdq_variants.json");
  auto bdq = build_bdq(cases, source, 7, nullptr);
  auto originals = originals_of(cases);
  PositionProfile profile;
  profile.rate = {0.25, 0.25, 0.25, 0.25, 0.0};
  profile.n_items = 100;  // nothing below 0.2: ties at 0.2 are excluded too
  bool fallback = false;
  std::vector<std::string> warnings;
  auto splits = build_bcq(bdq, profile,
                          [&](const std::string& id) { return originals.at(id); },
                          &fallback, &warnings);
  CHECK(fallback);
  CHECK(splits.size() == 4);
  CHECK(warnings.size() == 1);
}

TEST_CASE("contamination summary: single split worked example") {
  PositionProfile profile;
  profile.rate = {0.05, 0.4, 0.3, 0.05, 0.2};
  profile.n_items = 200;
  profile.non_preferred = {0, 3};
  std::map<int, std::pair<double, std::size_t>> results{{0, {0.61, 200}}};
  ContaminationReport rep = contamination_summary(profile, results);
  REQUIRE(rep.records.size() == 1);
  // kappa = (0.61 - 0.05) / 0.95
  CHECK(std::abs(*rep.min_contamination - 0.58947368421052626) <= 1e-12);
  CHECK(rep.min_contamination == rep.max_contamination);
  CHECK(rep.best_position == 0);
  CHECK(rep.headline_kappa == rep.max_contamination);
}

TEST_CASE("simulated responder sandwich at small scale") {
  auto cases = bundled_cases();
  auto source = FileVariantSource::load(kDataDir + "/quiz/bdq_variants.json");
  auto bdq = build_bdq(cases, source, 11, nullptr);
  auto originals = originals_of(cases);

  auto run_pipeline = [&](ResponderKind kind, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<QuizResponse> bdq_responses;
    for (const auto& item : bdq)
      bdq_responses.push_back(
          QuizResponse{item.id, simulate_response(kind, item, rng),
                       item.original_position});
    PositionProfile profile = position_bias(bdq_responses);
    bool fallback = false;
    auto splits = build_bcq(bdq, profile,
                            [&](const std::string& id) { return originals.at(id); },
                            &fallback);
    std::map<int, std::pair<double, std::size_t>> results;
    for (const auto& [pos, items] : splits) {
      std::vector<QuizResponse> rs;
      for (const auto& item : items)
        rs.push_back(QuizResponse{item.id,
                                  simulate_response(kind, item, rng),
                                  item.original_position});
      results.emplace(pos, std::make_pair(bcq_accuracy(rs), rs.size()));
    }
    return contamination_summary(profile, results, fallback);
  };

  ContaminationReport memorizer =
      run_pipeline(ResponderKind::kMemorizer, 101);
  REQUIRE(memorizer.min_contamination.has_value());
  CHECK(*memorizer.min_contamination == 1.0);  // p_o = 1 at every split

  ContaminationReport anti = run_pipeline(ResponderKind::kAntiOriginal, 103);
  REQUIRE(anti.max_contamination.has_value());
  CHECK(*anti.max_contamination < 0.0);  // p_o = 0, p_e > 0
}

TEST_CASE("quiz item and response json round trip") {
  QuizItem item;
  item.id = "bcqC__en01";
  item.options = {"a", "b", "c", "d", kNoneOptionText};
  item.original_position = 2;
  item.source_case_id = "en01";
  QuizItem back = QuizItem::from_json(item.to_json());
  CHECK(back.to_json().dump() == item.to_json().dump());
  CHECK(back.original_position == 2);

  QuizResponse r{"bcqC__en01", 4, 2};
  QuizResponse rback = QuizResponse::from_json(r.to_json());
  CHECK(rback.chosen == 4);
  CHECK(rback.original_position == 2);
}
