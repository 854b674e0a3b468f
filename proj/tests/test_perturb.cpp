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

#include "taxlog/perturb.hpp"

#include <doctest.h>

#include <set>
#include <string>

using namespace taxlog;

namespace {

const std::string kDataDir = std::string(TAXLOG_REPO_DIR) + "/data";

struct Fixture {
  StatuteKB statutes = load_statutes(kDataDir + "/statutes/mini_statutes.pl");
  Blocklist blocklist = Blocklist::load(kDataDir + "/statutes/blocklist.txt");
  CorpusLoad corpus = load_cases(kDataDir + "/corpus/mini_cases.jsonl");

  const CaseInstance& by_id(const std::string& id) const {
    for (const auto& c : corpus.cases)
      if (c.id == id) return c;
    throw std::runtime_error("no such case " + id);
  }
};

void check_label_sound(const StatuteKB& ruleset, const Blocklist& blocklist,
                       const CaseInstance& item) {
  KnowledgeBase kb = compose_program(ruleset, item, blocklist);
  SolveOutcome out = solve(kb, item.query);
  REQUIRE(!out.exhausted());
  if (item.answer.kind == Answer::Kind::kEntailment) {
    CHECK(out.has_solutions() == item.answer.entailed);
  } else {
    REQUIRE(out.has_solutions());
    const Term& slot = out.solutions[0].resolved_query.args().back();
    REQUIRE(slot.is_int());
    CHECK(slot.int_value() == item.answer.value);
  }
}

}  // namespace

TEST_CASE("number span scanning and styled replacement") {
  using taxlog::detail::find_number_spans;
  using taxlog::detail::replace_value_in_text;
  std::string text =
      "Alice was paid $70,000 on June 15, 2014 and received 6000 plus "
      "$6,000 more; totals: 76,000.";
  auto spans = find_number_spans(text);
  std::vector<std::string> digits;
  for (const auto& s : spans) digits.push_back(s.digits);
  CHECK(digits == std::vector<std::string>{"70000", "15", "2014", "6000",
                                           "6000", "76000"});
  CHECK(spans[0].grouped);
  CHECK(!spans[3].grouped);
  CHECK(spans[4].grouped);
  CHECK(spans[5].grouped);

  std::string rewritten = text;
  std::size_t hits =
      replace_value_in_text(rewritten, BigInt(6000), BigInt(7200));
  CHECK(hits == 2);
  CHECK(rewritten.find("received 7200 plus") != std::string::npos);
  CHECK(rewritten.find("$7,200 more") != std::string::npos);
  // only whole spans match: 70,000 was not touched
  CHECK(rewritten.find("$70,000") != std::string::npos);
}

TEST_CASE("grouped formatting") {
  using taxlog::detail::format_grouped;
  CHECK(format_grouped(BigInt(0)) == "0");
  CHECK(format_grouped(BigInt(999)) == "999");
  CHECK(format_grouped(BigInt(1000)) == "1,000");
  CHECK(format_grouped(BigInt(76543210)) == "76,543,210");
}

TEST_CASE("rule perturbation rescales exactly the eligible literals") {
  Fixture f;
  PerturbationSpec spec;
  spec.seed = 42;
  RulePerturbationOutcome r_prime = perturb_rule_numbers(f.statutes, spec);
  CHECK(r_prime.kb.ruleset_id == "r_prime");
  // eligible sites in the bundled statutes; years, sub-1000 rates, and the
  // year-ambiguous $2000 bracket base (inside the 1900-2100 window) are
  // conservatively excluded
  CHECK(r_prime.kb.substitution_map.size() == 10);
  std::multiset<std::string> olds;
  for (const auto& e : r_prime.kb.substitution_map) {
    CHECK(!(e.old_value == e.new_value));
    olds.insert(e.old_value.to_string());
    // +-30% bound
    CHECK(e.new_value * BigInt(10) >= e.old_value * BigInt(7) - BigInt(10));
    CHECK(e.new_value * BigInt(10) <= e.old_value * BigInt(13) + BigInt(10));
  }
  CHECK(olds == std::multiset<std::string>{"12000", "20000", "20000", "4000",
                                           "4050", "4050", "50000", "50000",
                                           "6000", "8000"});
  // structure is byte-identical apart from the mapped literals
  CHECK(r_prime.kb.program.clauses.size() == f.statutes.program.clauses.size());
  CHECK(render_program(apply_substitution_map(
            f.statutes.program, r_prime.kb.substitution_map)) ==
        render_program(r_prime.kb.program));
}

TEST_CASE("rule perturbation is seed-deterministic") {
  Fixture f;
  PerturbationSpec spec;
  spec.seed = 42;
  auto a = perturb_rule_numbers(f.statutes, spec);
  auto b = perturb_rule_numbers(f.statutes, spec);
  CHECK(render_program(a.kb.program) == render_program(b.kb.program));
  spec.seed = 43;
  auto c = perturb_rule_numbers(f.statutes, spec);
  CHECK(render_program(a.kb.program) != render_program(c.kb.program));
}

TEST_CASE("rule perturbation with nothing eligible warns and returns r") {
  StatuteKB tiny{parse_program("rate(30). year(2015)."), "r", {}};
  PerturbationSpec spec;
  spec.seed = 1;
  auto out = perturb_rule_numbers(tiny, spec);
  CHECK(out.kb.substitution_map.empty());
  CHECK(render_program(out.kb.program) == render_program(tiny.program));
  REQUIRE(out.warnings.size() == 1);
}

TEST_CASE("year shifting is available behind the policy switch") {
  StatuteKB tiny{parse_program("threshold(2016, 5000)."), "r", {}};
  PerturbationSpec spec;
  spec.seed = 9;
  spec.policy.perturb_years = true;
  auto out = perturb_rule_numbers(tiny, spec);
  REQUIRE(out.kb.substitution_map.size() == 2);
  for (const auto& e : out.kb.substitution_map) {
    if (e.old_value == BigInt(2016)) {
      BigInt shift = (e.new_value - e.old_value).abs();
      CHECK(shift >= BigInt(1));
      CHECK(shift <= BigInt(2));
    }
  }
}

TEST_CASE("bracket threshold chains stay monotone (re-sorted when needed)") {
  // thresholds close enough that +-30% draws can invert them
  StatuteKB kb{parse_program(
                   "b(X, T) :- X =< 30000, !, T is 1000.\n"
                   "b(X, T) :- X =< 33000, !, T is 2000.\n"
                   "b(X, T) :- T is 3000.\n"),
               "r",
               {}};
  bool saw_resort = false;
  for (std::uint64_t seed = 1; seed <= 200; ++seed) {
    PerturbationSpec spec;
    spec.seed = seed;
    auto out = perturb_rule_numbers(kb, spec);
    // read the two thresholds back out of r'
    const Term& t1 = out.kb.program.clauses[0].body[0].args()[1];
    const Term& t2 = out.kb.program.clauses[1].body[0].args()[1];
    REQUIRE(t1.is_int());
    REQUIRE(t2.is_int());
    CHECK(t1.int_value() <= t2.int_value());
    saw_resort = saw_resort || out.bracket_resorted;
    if (out.bracket_resorted) {
      // the map must still reproduce r' exactly after the repair
      CHECK(render_program(apply_substitution_map(
                kb.program, out.kb.substitution_map)) ==
            render_program(out.kb.program));
    }
  }
  CHECK(saw_resort);  // the repair path actually fired somewhere in 200 seeds
}

TEST_CASE("case perturbation rewrites facts and text in lockstep") {
  Fixture f;
  PerturbationSpec spec;
  spec.seed = 7;
  CasePerturbation p = perturb_case_numbers(f.by_id("n01"), spec);
  CHECK(!p.text_desync);
  CHECK(p.item.provenance == Provenance::kGenerated);
  CHECK(p.item.has_tag("answer_pending"));
  REQUIRE(p.map.size() == 2);  // 70000 and 6000
  // alignment: every mapped new value appears in the rewritten text and in
  // the rendered facts
  std::string rendered = render_program(p.item.gold_facts);
  for (const auto& e : p.map) {
    CHECK(rendered.find(e.new_value.to_string()) != std::string::npos);
    bool in_text =
        p.item.text.find(taxlog::detail::format_grouped(e.new_value)) !=
            std::string::npos ||
        p.item.text.find(e.new_value.to_string()) != std::string::npos;
    CHECK(in_text);
  }
  // determinism
  CasePerturbation q = perturb_case_numbers(f.by_id("n01"), spec);
  CHECK(q.item.text == p.item.text);
  CHECK(render_program(q.item.gold_facts) == rendered);
}

TEST_CASE("case with no eligible numerals refuses to perturb") {
  Fixture f;
  PerturbationSpec spec;
  spec.seed = 7;
  CHECK_THROWS_AS(perturb_case_numbers(f.by_id("n10"), spec), CorpusError);
}

TEST_CASE("text desync is detected") {
  Fixture f;
  CaseInstance c = f.by_id("n05");
  c.text = "Eve collected some income during 2015.";  // amount missing
  PerturbationSpec spec;
  spec.seed = 3;
  CasePerturbation p = perturb_case_numbers(c, spec);
  CHECK(p.text_desync);
}

TEST_CASE("regenerate_answer reproduces gold answers under r") {
  Fixture f;
  for (const auto& id : {"n01", "n05", "n10"}) {
    CaseInstance c = f.by_id(id);
    DropLog log;
    auto out = regenerate_answer(f.statutes, c, f.blocklist, {}, &log);
    REQUIRE(out.has_value());
    CHECK(out->answer.value == f.by_id(id).answer.value);
  }
}

TEST_CASE("seed-42 rule change flips at least one fixture answer") {
  Fixture f;
  PerturbationSpec spec;
  spec.seed = 42;
  auto r_prime = perturb_rule_numbers(f.statutes, spec);
  int changed = 0;
  for (const auto& c : f.corpus.cases) {
    if (!c.split.is_numeric_task()) continue;
    DropLog log;
    auto out = regenerate_answer(r_prime.kb, c, f.blocklist, {}, &log);
    REQUIRE(out.has_value());
    if (!(out->answer.value == c.answer.value)) ++changed;
  }
  CHECK(changed >= 1);
}

TEST_CASE("make_negative_query produces verified contradictions") {
  Fixture f;
  PerturbationSpec spec;
  spec.seed = 5;
  const CaseInstance& en01 = f.by_id("en01");  // truth 14000
  DropLog log;
  auto neg = make_negative_query(en01, f.statutes, f.blocklist, spec, {},
                                 &log);
  REQUIRE(neg.has_value());
  CHECK(!neg->answer.entailed);
  BigInt truth(14000);
  BigInt claimed = neg->query.args().back().int_value();
  BigInt diff = (claimed - truth).abs();
  CHECK(diff > BigInt(0));
  // |V' - V| / V <= 0.05 + 1/V  <=>  20 * |V' - V| <= V + 20
  CHECK(BigInt(20) * diff <= truth + BigInt(20));
  // text was rewritten to the offset amount
  CHECK(neg->text.find(taxlog::detail::format_grouped(claimed)) !=
        std::string::npos);
  check_label_sound(f.statutes, f.blocklist, *neg);
}

TEST_CASE("make_negative_query skips zero-truth claims") {
  Fixture f;
  PerturbationSpec spec;
  spec.seed = 5;
  DropLog log;
  auto neg = make_negative_query(f.by_id("en07"), f.statutes, f.blocklist,
                                 spec, {}, &log);
  CHECK(!neg.has_value());
  REQUIRE(log.drops.size() == 1);
}

TEST_CASE("tiny truths get the minimum offset of one dollar") {
  // V=10: a 1-5% offset rounds back to 10, so the difference is bumped to 1
  StatuteKB kb{parse_program("owes(p, 10)."), "r", {}};
  Blocklist empty;
  CaseInstance c{"tiny",
                 SplitTag::parse("En"),
                 "The amount is 10. Claim: p owes 10.",
                 parse_program(""),
                 parse_query("owes(p, 10)"),
                 Answer::entailment(true),
                 Provenance::kOriginal,
                 {}};
  PerturbationSpec spec;
  spec.seed = 1;
  DropLog log;
  auto neg = make_negative_query(c, kb, empty, spec, {}, &log);
  REQUIRE(neg.has_value());
  BigInt claimed = neg->query.args().back().int_value();
  CHECK((claimed - BigInt(10)).abs() == BigInt(1));
}

TEST_CASE("assemble_split rejects combinations outside the corpus rows") {
  Fixture f;
  PerturbationSpec spec;
  spec.seed = 11;
  CHECK_THROWS_AS(
      assemble_split(f.corpus.cases, f.statutes, SplitBase::kEe,
                     RuleVariant::kOriginal, CaseOp::kNumeric, spec,
                     f.blocklist),
      CorpusError);
  CHECK_THROWS_AS(
      assemble_split(f.corpus.cases, f.statutes, SplitBase::kN,
                     RuleVariant::kOriginal, CaseOp::kNone, spec,
                     f.blocklist),
      CorpusError);
  CHECK_THROWS_AS(
      assemble_split(f.corpus.cases, f.statutes, SplitBase::kN,
                     RuleVariant::kOriginal, CaseOp::kParaphrase, spec,
                     f.blocklist),
      CorpusError);
}

TEST_CASE("assemble_split N_r: rule change with original cases") {
  Fixture f;
  PerturbationSpec spec;
  spec.seed = 42;
  SplitResult split =
      assemble_split(f.corpus.cases, f.statutes, SplitBase::kN,
                     RuleVariant::kRPrime, CaseOp::kNone, spec, f.blocklist);
  CHECK(split.split_name == "N_r");
  CHECK(split.ruleset.ruleset_id == "r_prime");
  CHECK(split.items.size() == 12);  // every N base regenerates
  for (const auto& item : split.items) {
    CHECK(item.split.name() == "N_r");
    CHECK(item.provenance == Provenance::kGenerated);
    check_label_sound(split.ruleset, f.blocklist, item);
  }
}

TEST_CASE("assemble_split En_c: balanced verified pairs") {
  Fixture f;
  PerturbationSpec spec;
  spec.seed = 7;
  SplitResult split =
      assemble_split(f.corpus.cases, f.statutes, SplitBase::kEn,
                     RuleVariant::kOriginal, CaseOp::kNumeric, spec,
                     f.blocklist);
  CHECK(split.split_name == "En_c");
  CHECK(split.items.size() % 2 == 0);
  CHECK(split.items.size() >= 20);  // a few drops allowed, most pairs emit
  std::size_t pos = 0, neg = 0;
  for (const auto& item : split.items) {
    CHECK(item.split.name() == "En_c");
    (item.answer.entailed ? pos : neg)++;
    check_label_sound(split.ruleset, f.blocklist, item);
  }
  CHECK(pos == neg);
}

TEST_CASE("assemble_split N_rc: both perturbations compose") {
  Fixture f;
  PerturbationSpec spec;
  spec.seed = 13;
  SplitResult split =
      assemble_split(f.corpus.cases, f.statutes, SplitBase::kN,
                     RuleVariant::kRPrime, CaseOp::kNumeric, spec,
                     f.blocklist);
  CHECK(split.split_name == "N_rc");
  // n10 has nothing to perturb and is dropped
  CHECK(split.items.size() == 11);
  for (const auto& item : split.items)
    check_label_sound(split.ruleset, f.blocklist, item);
  bool n10_dropped = false;
  for (const auto& d : split.manifest.at("drops"))
    n10_dropped = n10_dropped || d.at("id").get<std::string>() == "n10";
  CHECK(n10_dropped);
}

TEST_CASE("assemble_split Ee_c: paraphrase keeps logic and answers") {
  Fixture f;
  PerturbationSpec spec;
  spec.seed = 3;
  auto paraphrase =
      paraphrase_file_source(kDataDir + "/paraphrase/paraphrases.json");
  SplitResult split =
      assemble_split(f.corpus.cases, f.statutes, SplitBase::kEe,
                     RuleVariant::kOriginal, CaseOp::kParaphrase, spec,
                     f.blocklist, {}, paraphrase);
  CHECK(split.split_name == "Ee_c");
  CHECK(split.items.size() == 10);
  for (const auto& item : split.items) {
    const CaseInstance& original = f.by_id(
        item.id.substr(0, item.id.find("__")));
    CHECK(item.text != original.text);
    CHECK(render_program(item.gold_facts) ==
          render_program(original.gold_facts));
    CHECK(render_term(item.query) == render_term(original.query));
    CHECK(item.answer.entailed == original.answer.entailed);
    check_label_sound(split.ruleset, f.blocklist, item);
  }
}

TEST_CASE("assemble_split is byte-deterministic at a fixed seed") {
  Fixture f;
  PerturbationSpec spec;
  spec.seed = 99;
  auto render_split = [&](const SplitResult& s) {
    std::string out = s.manifest.dump();
    for (const auto& item : s.items) out += case_to_json(item).dump() + "\n";
    return out;
  };
  auto a = assemble_split(f.corpus.cases, f.statutes, SplitBase::kEn,
                          RuleVariant::kRPrime, CaseOp::kNumeric, spec,
                          f.blocklist);
  auto b = assemble_split(f.corpus.cases, f.statutes, SplitBase::kEn,
                          RuleVariant::kRPrime, CaseOp::kNumeric, spec,
                          f.blocklist);
  CHECK(render_split(a) == render_split(b));
}
