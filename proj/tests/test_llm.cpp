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

#include "taxlog/llm.hpp"

#include <doctest.h>

#include <atomic>
#include <cstdlib>
#include <string>
#include <thread>

using namespace taxlog;

namespace {

const std::string kDataDir = std::string(TAXLOG_REPO_DIR) + "/data";

TemplateSet templates() { return TemplateSet::load(kDataDir + "/templates"); }

Blocklist blocklist() {
  return Blocklist::load(kDataDir + "/statutes/blocklist.txt");
}

}  // namespace

TEST_CASE("template rendering fills placeholders and keeps JSON braces") {
  auto set = templates();
  auto rendered = set.get("quiz").render({{"split_name", "entailment"},
                                          {"dataset_name", "SARA"},
                                          {"option_a", "AAA"},
                                          {"option_b", "BBB"},
                                          {"option_c", "CCC"},
                                          {"option_d", "DDD"}});
  CHECK(rendered.system_text.find("the entailment split of the") !=
        std::string::npos);
  CHECK(rendered.system_text.find("SARA dataset") != std::string::npos);
  // the literal JSON example survives rendering untouched
  CHECK(rendered.system_text.find("{\"answer\": \"X\"}") != std::string::npos);
  CHECK(rendered.user_text.find("A) AAA") != std::string::npos);
  CHECK(rendered.user_text.find("E) None of the provided options.") !=
        std::string::npos);
}

TEST_CASE("unfilled placeholders fail rendering") {
  auto set = templates();
  CHECK_THROWS_AS(set.get("quiz").render({{"split_name", "entailment"}}),
                  TemplateError);
  CHECK_THROWS_AS(set.get("to_facts_numeric")
                      .render({{"case_text", "t"}, {"question", "q"}}),
                  TemplateError);  // {{EVENTS_PL}}/{{UTILS_PL}} missing
}

TEST_CASE("rendered quiz prompt byte-matches the frozen fixture") {
  auto set = templates();
  auto variants = Json::parse(
      read_file(kDataDir + "/quiz/bdq_variants.json"));
  const auto& vs = variants.at("ee09");
  auto rendered = set.get("quiz").render(
      {{"split_name", "entailment"},
       {"dataset_name", "SARA"},
       {"option_a", vs[0].get<std::string>()},
       {"option_b", vs[1].get<std::string>()},
       {"option_c", vs[2].get<std::string>()},
       {"option_d", vs[3].get<std::string>()}});
  CHECK(rendered.system_text ==
        read_file(std::string(TAXLOG_REPO_DIR) +
                  "/tests/fixtures/quiz_rendered.system.txt"));
  CHECK(rendered.user_text ==
        read_file(std::string(TAXLOG_REPO_DIR) +
                  "/tests/fixtures/quiz_rendered.user.txt"));
}

TEST_CASE("mock provider: rule order, default, and failure") {
  MockProvider mock;
  mock.add_rule("alpha", "first");
  mock.add_rule("beta", "second");
  CHECK(mock.complete("sys", "has alpha and beta") == "first");
  CHECK(mock.complete("beta only", "") == "second");
  CHECK_THROWS_AS(mock.complete("nothing", "matches"), ProviderError);
  mock.set_default("fallback");
  CHECK(mock.complete("nothing", "matches") == "fallback");
  CHECK(mock.deterministic());
}

TEST_CASE("mock provider loads the bundled canned map") {
  auto provider = MockProvider::from_file(kDataDir +
                                          "/mock/mock_responses.json");
  std::string quiz = provider.complete(
      "You are provided with a five-choice quiz.", "A) x");
  CHECK(quiz == "{\"answer\": \"E\"}");
}

TEST_CASE("direct_qa strict and lenient parsing") {
  auto set = templates();
  MockProvider mock;
  mock.set_default(
      R"({"reasoning": "applied brackets", "final_answer": 14000, "confidence": 0.9})");
  DirectAnswer ans = direct_qa(mock, set, "statute", "case", "q", true);
  CHECK(ans.value == BigInt(14000));
  CHECK(ans.confidence == 0.9);

  // lenient pass: JSON embedded in prose
  MockProvider chatty;
  chatty.set_default(
      "Sure! Here is my analysis:\n"
      R"({"reasoning": "x", "final_answer": "Entailment", "confidence": 0.8})"
      "\nHope that helps.");
  DirectAnswer verdict = direct_qa(chatty, set, "s", "c", "q", false);
  CHECK(verdict.entailed);
}

TEST_CASE("direct_qa contract violations") {
  auto set = templates();
  MockProvider bad;
  bad.set_default("I think the answer is 14000.");
  CHECK_THROWS_AS(direct_qa(bad, set, "s", "c", "q", true), ProviderError);

  MockProvider dollar;
  dollar.set_default(
      R"({"reasoning": "x", "final_answer": "$14,000", "confidence": 0.9})");
  CHECK_THROWS_AS(direct_qa(dollar, set, "s", "c", "q", true), ProviderError);

  MockProvider wrong_word;
  wrong_word.set_default(
      R"({"reasoning": "x", "final_answer": "entailed", "confidence": 0.9})");
  CHECK_THROWS_AS(direct_qa(wrong_word, set, "s", "c", "q", false),
                  ProviderError);

  MockProvider overconfident;
  overconfident.set_default(
      R"({"reasoning": "x", "final_answer": 1, "confidence": 1.5})");
  CHECK_THROWS_AS(direct_qa(overconfident, set, "s", "c", "q", true),
                  ProviderError);
}

TEST_CASE("take_quiz letter parsing") {
  auto set = templates();
  std::array<std::string, 4> options{"a", "b", "c", "d"};
  MockProvider e_mock;
  e_mock.set_default(R"({"answer": "E"})");
  CHECK(take_quiz(e_mock, set, options, "entailment", "SARA") == 'E');

  MockProvider lower;
  lower.set_default(R"({"answer": "c"})");
  CHECK(take_quiz(lower, set, options, "entailment", "SARA") == 'C');

  MockProvider prose;
  prose.set_default("The answer is B");
  CHECK(!take_quiz(prose, set, options, "entailment", "SARA").has_value());

  MockProvider out_of_range;
  out_of_range.set_default(R"({"answer": "F"})");
  CHECK(!take_quiz(out_of_range, set, options, "entailment", "SARA")
             .has_value());
}

TEST_CASE("translate_case accepts fenced facts and rejects rules") {
  auto set = templates();
  Blocklist block = blocklist();
  std::string events = read_file(kDataDir + "/reference/events.pl");
  std::string utils = read_file(kDataDir + "/reference/utils.pl");

  MockProvider fenced;
  fenced.set_default("```prolog\nincome_(e1). agent_(e1, alice). "
                     "amount_(e1, 50000).\n```");
  Program p = translate_case(fenced, set, events, utils, "Alice earned "
                             "$50,000.", "How much?", true, block);
  CHECK(p.clauses.size() == 3);

  MockProvider ruley;
  ruley.set_default("s151(alice) :- true.");
  CHECK_THROWS_AS(translate_case(ruley, set, events, utils, "t", "q", false,
                                 block),
                  TranslationError);

  MockProvider garbage;
  garbage.set_default("no prolog here ):");
  try {
    translate_case(garbage, set, events, utils, "t", "q", false, block);
    FAIL("expected TranslationError");
  } catch (const TranslationError& e) {
    CHECK(e.raw_response() == "no prolog here ):");  // kept for audit
  }
}

TEST_CASE("translate_case blocklist handling") {
  auto set = templates();
  Blocklist block = blocklist();
  MockProvider conclusion;
  conclusion.set_default("s151(alice, 2015, 4000).");
  CHECK_THROWS_AS(translate_case(conclusion, set, "", "", "t", "q", false,
                                 block),
                  TranslationError);
  // allowed when the case states the conclusion explicitly
  Program p = translate_case(conclusion, set, "", "", "t", "q", false, block,
                             /*asserts_conclusion=*/true);
  CHECK(p.clauses.size() == 1);
}

TEST_CASE("protected span extraction") {
  using taxlog::detail::protected_spans;
  auto spans = protected_spans(
      "Alice paid $1,000 (35% of the base) under Section 152(c)(1) on "
      "2015-01-01 in 2015.");
  CHECK(spans == std::vector<std::string>{"$1,000", "35%", "Section 152(c)(1)",
                                          "2015-01-01", "2015"});
}

TEST_CASE("generate_perturbations validation") {
  auto set = templates();
  std::string original = "Alice paid $1,000 for childcare in 2015.";

  auto respond_with = [](const Json& variants) {
    Json j;
    j["perturbations"] = variants;
    MockProvider m;
    m.set_default(j.dump());
    return m;
  };
  auto variant = [](const std::string& text) {
    return Json{{"text", text}, {"changes", Json::array()}};
  };

  MockProvider good = respond_with(Json::array(
      {variant("Alice paid $1,000 for child care in 2015."),
       variant("Alice spent $1,000 for childcare in 2015."),
       variant("Alice paid $1,000 for childcare during 2015."),
       variant("Alice remitted $1,000 for childcare in 2015.")}));
  auto variants = generate_perturbations(good, set, original);
  CHECK(variants.size() == 4);

  // numeral audit: altering "$1,000" is rejected
  MockProvider altered = respond_with(Json::array(
      {variant("Alice paid $1,200 for child care in 2015."),
       variant("Alice spent $1,000 for childcare in 2015."),
       variant("Alice paid $1,000 for childcare during 2015."),
       variant("Alice remitted $1,000 for childcare in 2015.")}));
  CHECK_THROWS_AS(generate_perturbations(altered, set, original),
                  TranslationError);

  // cardinality
  MockProvider three = respond_with(Json::array(
      {variant("Alice paid $1,000 for child care in 2015."),
       variant("Alice spent $1,000 for childcare in 2015."),
       variant("Alice paid $1,000 for childcare during 2015.")}));
  CHECK_THROWS_AS(generate_perturbations(three, set, original),
                  TranslationError);

  // byte-equal to the original
  MockProvider echo = respond_with(Json::array(
      {variant(original),
       variant("Alice spent $1,000 for childcare in 2015."),
       variant("Alice paid $1,000 for childcare during 2015."),
       variant("Alice remitted $1,000 for childcare in 2015.")}));
  CHECK_THROWS_AS(generate_perturbations(echo, set, original),
                  TranslationError);

  // duplicates
  MockProvider dup = respond_with(Json::array(
      {variant("Alice spent $1,000 for childcare in 2015."),
       variant("Alice spent $1,000 for childcare in 2015."),
       variant("Alice paid $1,000 for childcare during 2015."),
       variant("Alice remitted $1,000 for childcare in 2015.")}));
  CHECK_THROWS_AS(generate_perturbations(dup, set, original),
                  TranslationError);
}

// ---------------------------------------------------------------------------
// HTTP transport against a local server

namespace {

struct LocalServer {
  httplib::Server server;
  std::thread thread;
  int port = 0;
  std::atomic<int> hits{0};

  explicit LocalServer(
      std::function<void(const httplib::Request&, httplib::Response&, int)>
          handler) {
    server.Post("/v1/chat/completions",
                [this, handler](const httplib::Request& req,
                                httplib::Response& res) {
                  handler(req, res, ++hits);
                });
    port = server.bind_to_any_port("127.0.0.1");
    thread = std::thread([this] { server.listen_after_bind(); });
    server.wait_until_ready();
  }

  ~LocalServer() {
    server.stop();
    thread.join();
  }

  ProviderConfig config() const {
    ProviderConfig cfg;
    cfg.kind = "http";
    cfg.endpoint = "http://127.0.0.1:" + std::to_string(port) +
                   "/v1/chat/completions";
    cfg.model = "test-model";
    cfg.api_key_env = "TAXLOG_TEST_KEY";
    cfg.max_retries = 2;
    cfg.backoff_ms = 1;
    return cfg;
  }
};

std::string ok_body(const std::string& content) {
  Json j;
  j["choices"] = Json::array({{{"message", {{"content", content}}}}});
  return j.dump();
}

}  // namespace

TEST_CASE("http provider round trip with bearer auth") {
  setenv("TAXLOG_TEST_KEY", "sk-test-secret-123", 1);
  std::string seen_auth, seen_model;
  LocalServer server([&](const httplib::Request& req, httplib::Response& res,
                         int) {
    seen_auth = req.get_header_value("Authorization");
    seen_model = Json::parse(req.body).at("model").get<std::string>();
    res.set_content(ok_body("hello from server"), "application/json");
  });
  HttpProvider provider(server.config());
  std::vector<Json> audit_log;
  provider.set_audit_sink([&](const Json& e) { audit_log.push_back(e); });
  CHECK(provider.complete("sys", "user") == "hello from server");
  CHECK(seen_auth == "Bearer sk-test-secret-123");
  CHECK(seen_model == "test-model");
  CHECK(!provider.deterministic());
  // the audit entry records the exchange but never the key
  REQUIRE(audit_log.size() == 1);
  CHECK(audit_log[0].at("response") == "hello from server");
  CHECK(audit_log[0].dump().find("sk-test-secret-123") == std::string::npos);
}

TEST_CASE("http provider retries transient failures then succeeds") {
  LocalServer server([&](const httplib::Request&, httplib::Response& res,
                         int hit) {
    if (hit <= 2) {
      res.status = 503;
      res.set_content("overloaded", "text/plain");
    } else {
      res.set_content(ok_body("third time works"), "application/json");
    }
  });
  HttpProvider provider(server.config());  // max_retries = 2 -> 3 attempts
  CHECK(provider.complete("s", "u") == "third time works");
  CHECK(server.hits == 3);
}

TEST_CASE("http provider gives up after exhausting retries") {
  LocalServer server([&](const httplib::Request&, httplib::Response& res,
                         int) {
    res.status = 500;
    res.set_content("boom", "text/plain");
  });
  HttpProvider provider(server.config());
  CHECK_THROWS_AS(provider.complete("s", "u"), ProviderError);
  CHECK(server.hits == 3);  // 1 + 2 retries
}

TEST_CASE("http provider fails fast on non-retryable status") {
  LocalServer server([&](const httplib::Request&, httplib::Response& res,
                         int) {
    res.status = 400;
    res.set_content("bad request", "text/plain");
  });
  HttpProvider provider(server.config());
  CHECK_THROWS_AS(provider.complete("s", "u"), ProviderError);
  CHECK(server.hits == 1);
}

TEST_CASE("secret hygiene: the key never reaches serialized artifacts") {
  setenv("TAXLOG_TEST_KEY", "sk-test-secret-123", 1);
  ProviderConfig cfg;
  cfg.kind = "http";
  cfg.endpoint = "http://127.0.0.1:1/v1/chat/completions";
  cfg.api_key_env = "TAXLOG_TEST_KEY";
  std::string serialized = cfg.to_json().dump();
  CHECK(serialized.find("sk-test-secret-123") == std::string::npos);
  CHECK(serialized.find("TAXLOG_TEST_KEY") != std::string::npos);
}

TEST_CASE("make_provider dispatch") {
  ProviderConfig mock_cfg;
  mock_cfg.kind = "mock";
  mock_cfg.mock_responses_path = kDataDir + "/mock/mock_responses.json";
  auto p = make_provider(mock_cfg);
  CHECK(p->deterministic());
  ProviderConfig bad;
  bad.kind = "carrier-pigeon";
  CHECK_THROWS_AS(make_provider(bad), ProviderError);
}
