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

#ifndef TAXLOG_LLM_HPP_
#define TAXLOG_LLM_HPP_

#include <array>
#include <chrono>
#include <cstdlib>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <regex>
#include <semaphore>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <json.hpp>

#include "taxlog/corpus.hpp"
#include "taxlog/errors.hpp"
#include "taxlog/parser.hpp"

namespace taxlog {

class TemplateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Provider configuration and transports

struct ProviderConfig {
  std::string kind = "mock";  // "mock" | "http"
  std::string endpoint;       // e.g. http://127.0.0.1:8080/v1/chat/completions
  std::string model;
  std::string api_key_env = "TAXLOG_API_KEY";
  int max_retries = 3;        // additional attempts after the first
  int request_timeout_s = 60;
  int backoff_ms = 250;       // doubled per retry
  int concurrent_cap = 4;
  double temperature = 0.0;
  std::string mock_responses_path;

  /// Serialized form never contains key material, only the env var name.
  Json to_json() const {
    Json j;
    j["kind"] = kind;
    j["endpoint"] = endpoint;
    j["model"] = model;
    j["api_key_env"] = api_key_env;
    j["max_retries"] = max_retries;
    j["request_timeout_s"] = request_timeout_s;
    j["concurrent_cap"] = concurrent_cap;
    j["temperature"] = temperature;
    if (!mock_responses_path.empty())
      j["mock_responses_path"] = mock_responses_path;
    return j;
  }
};

/// Chat-completion transport: one system + one user message in, raw
/// assistant text out.
class Provider {
 public:
  virtual ~Provider() = default;
  virtual std::string complete(const std::string& system_text,
                               const std::string& user_text) = 0;
  /// Deterministic providers report zero latency so offline reports are
  /// byte-reproducible.
  virtual bool deterministic() const { return false; }

  /// Audit sink for raw responses and usage metadata. Entries never
  /// contain key material.
  void set_audit_sink(std::function<void(const Json&)> sink) {
    audit_ = std::move(sink);
  }

 protected:
  void audit(const Json& entry) {
    if (audit_) audit_(entry);
  }

 private:
  std::function<void(const Json&)> audit_;
};

/// Offline provider: first matching substring rule wins; optional default.
/// Rules file: {"rules": [{"if_contains": "...", "respond": "..."}],
/// "default": "..."}.
class MockProvider : public Provider {
 public:
  MockProvider() = default;

  static MockProvider from_file(const std::string& path) {
    return MockProvider(Json::parse(read_file(path)));
  }

  explicit MockProvider(const Json& spec) {
    if (spec.contains("rules"))
      for (const auto& rule : spec.at("rules"))
        rules_.emplace_back(rule.at("if_contains").get<std::string>(),
                            rule.at("respond").get<std::string>());
    if (spec.contains("default"))
      default_ = spec.at("default").get<std::string>();
  }

  void add_rule(std::string if_contains, std::string respond) {
    rules_.emplace_back(std::move(if_contains), std::move(respond));
  }
  void set_default(std::string respond) { default_ = std::move(respond); }

  std::string complete(const std::string& system_text,
                       const std::string& user_text) override {
    std::string haystack = system_text + "\n" + user_text;
    for (const auto& [needle, response] : rules_)
      if (haystack.find(needle) != std::string::npos) {
        audit({{"provider", "mock"},
               {"matched", needle},
               {"response", response}});
        return response;
      }
    if (default_) {
      audit({{"provider", "mock"}, {"matched", ""}, {"response", *default_}});
      return *default_;
    }
    throw ProviderError("mock provider has no response for this prompt");
  }

  bool deterministic() const override { return true; }

 private:
  std::vector<std::pair<std::string, std::string>> rules_;
  std::optional<std::string> default_;
};

namespace detail {

struct ParsedEndpoint {
  std::string host_port;  // scheme://host:port
  std::string path;
};

inline ParsedEndpoint parse_endpoint(const std::string& endpoint) {
  std::size_t scheme = endpoint.find("://");
  if (scheme == std::string::npos)
    throw ProviderError("endpoint must include scheme: " + endpoint);
  std::size_t path_start = endpoint.find('/', scheme + 3);
  if (path_start == std::string::npos)
    return {endpoint, "/v1/chat/completions"};
  return {endpoint.substr(0, path_start), endpoint.substr(path_start)};
}

}  // namespace detail

}  // namespace taxlog

// cpp-httplib is pulled in only for the HTTP transport.
#include <httplib.h>

namespace taxlog {

/// Bearer-auth chat-completion client with exponential backoff and a
/// process-wide concurrency cap. The API key is read from the environment
/// at request time and never stored or serialized.
class HttpProvider : public Provider {
 public:
  explicit HttpProvider(ProviderConfig cfg)
      : cfg_(std::move(cfg)),
        limiter_(std::make_unique<std::counting_semaphore<1024>>(
            std::max(1, cfg_.concurrent_cap))) {}

  std::string complete(const std::string& system_text,
                       const std::string& user_text) override {
    limiter_->acquire();
    struct Release {
      std::counting_semaphore<1024>* s;
      ~Release() { s->release(); }
    } release{limiter_.get()};

    auto [host, path] = detail::parse_endpoint(cfg_.endpoint);
    Json body;
    body["model"] = cfg_.model;
    body["temperature"] = cfg_.temperature;
    body["messages"] = Json::array(
        {{{"role", "system"}, {"content", system_text}},
         {{"role", "user"}, {"content", user_text}}});
    std::string payload = body.dump();

    std::string last_error;
    for (int attempt = 0; attempt <= cfg_.max_retries; ++attempt) {
      if (attempt > 0)
        std::this_thread::sleep_for(std::chrono::milliseconds(
            static_cast<std::int64_t>(cfg_.backoff_ms) << (attempt - 1)));
      httplib::Client client(host);
      client.set_connection_timeout(cfg_.request_timeout_s);
      client.set_read_timeout(cfg_.request_timeout_s);
      httplib::Headers headers;
      const char* key = std::getenv(cfg_.api_key_env.c_str());
      if (key != nullptr && key[0] != '\0')
        headers.emplace("Authorization", std::string("Bearer ") + key);
      auto res = client.Post(path, headers, payload, "application/json");
      if (!res) {
        last_error = "connection failure";
        continue;
      }
      if (res->status == 429 || res->status >= 500) {
        last_error = "http status " + std::to_string(res->status);
        continue;
      }
      if (res->status != 200)
        throw ProviderError("provider rejected request: http " +
                            std::to_string(res->status));
      try {
        Json reply = Json::parse(res->body);
        std::string content = reply.at("choices").at(0).at("message")
                                  .at("content").get<std::string>();
        Json entry;
        entry["provider"] = "http";
        entry["model"] = cfg_.model;
        entry["attempts"] = attempt + 1;
        entry["prompt_chars"] = system_text.size() + user_text.size();
        entry["response"] = content;
        if (reply.contains("usage")) entry["usage"] = reply.at("usage");
        audit(entry);
        return content;
      } catch (const std::exception& e) {
        throw ProviderError(std::string("malformed provider response: ") +
                            e.what());
      }
    }
    throw ProviderError("provider unreachable after " +
                        std::to_string(cfg_.max_retries + 1) +
                        " attempts (" + last_error + ")");
  }

 private:
  ProviderConfig cfg_;
  std::unique_ptr<std::counting_semaphore<1024>> limiter_;
};

inline std::unique_ptr<Provider> make_provider(const ProviderConfig& cfg) {
  if (cfg.kind == "mock") {
    auto mock = std::make_unique<MockProvider>(
        cfg.mock_responses_path.empty()
            ? MockProvider()
            : MockProvider::from_file(cfg.mock_responses_path));
    return mock;
  }
  if (cfg.kind == "http") return std::make_unique<HttpProvider>(cfg);
  throw ProviderError("unknown provider kind: " + cfg.kind);
}

// ---------------------------------------------------------------------------
// Prompt templates

inline const std::vector<std::string>& template_ids() {
  static const std::vector<std::string> ids = {
      "quiz",          "dcq_perturb",     "direct_numeric",
      "direct_entail", "to_facts_entail", "to_facts_numeric"};
  return ids;
}

struct PromptTemplate {
  std::string id;
  std::string system_text;
  std::string user_text;

  struct Rendered {
    std::string system_text;
    std::string user_text;
  };

  /// Fills {placeholder} and {{FILE_PL}} slots. Rendering fails when any
  /// known placeholder remains unfilled.
  Rendered render(const std::map<std::string, std::string>& vars) const {
    Rendered out{system_text, user_text};
    for (const auto& [name, value] : vars) {
      std::string pattern = (name == "EVENTS_PL" || name == "UTILS_PL")
                                ? "{{" + name + "}}"
                                : "{" + name + "}";
      replace_all(out.system_text, pattern, value);
      replace_all(out.user_text, pattern, value);
    }
    check_filled(out.system_text);
    check_filled(out.user_text);
    return out;
  }

 private:
  static void replace_all(std::string& text, const std::string& pattern,
                          const std::string& value) {
    std::size_t pos = 0;
    while ((pos = text.find(pattern, pos)) != std::string::npos) {
      text.replace(pos, pattern.size(), value);
      pos += value.size();
    }
  }

  void check_filled(const std::string& text) const {
    static const std::vector<std::string> known = {
        "{split_name}",  "{dataset_name}", "{option_a}",     "{option_b}",
        "{option_c}",    "{option_d}",     "{statute_text}", "{case_text}",
        "{question}",    "{text}",         "{{EVENTS_PL}}",  "{{UTILS_PL}}"};
    for (const auto& p : known)
      if (text.find(p) != std::string::npos)
        throw TemplateError("template " + id + ": unfilled placeholder " + p);
  }
};

class TemplateSet {
 public:
  static TemplateSet load(const std::string& dir) {
    TemplateSet set;
    for (const std::string& id : template_ids()) {
      PromptTemplate t;
      t.id = id;
      t.system_text = read_file(dir + "/" + id + ".system.txt");
      t.user_text = read_file(dir + "/" + id + ".user.txt");
      set.templates_.emplace(id, std::move(t));
    }
    return set;
  }

  const PromptTemplate& get(const std::string& id) const {
    auto it = templates_.find(id);
    if (it == templates_.end())
      throw TemplateError("unknown template id: " + id);
    return it->second;
  }

 private:
  std::map<std::string, PromptTemplate> templates_;
};

// ---------------------------------------------------------------------------
// Response parsing helpers

namespace detail {

inline std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

/// Strips markdown code fences (``` or ```prolog) around a block.
inline std::string strip_code_fences(const std::string& raw) {
  std::string s = trim(raw);
  if (s.compare(0, 3, "```") != 0) return s;
  std::size_t first_nl = s.find('\n');
  if (first_nl == std::string::npos) return s;
  std::size_t closing = s.rfind("```");
  if (closing <= first_nl) return s;
  return trim(s.substr(first_nl + 1, closing - first_nl - 1));
}

/// First balanced JSON object in free text (the one lenient pass allowed
/// before giving up on a response).
inline std::optional<std::string> first_json_object(const std::string& text) {
  std::size_t start = text.find('{');
  if (start == std::string::npos) return std::nullopt;
  int depth = 0;
  bool in_string = false;
  for (std::size_t i = start; i < text.size(); ++i) {
    char c = text[i];
    if (in_string) {
      if (c == '\\')
        ++i;
      else if (c == '"')
        in_string = false;
      continue;
    }
    if (c == '"') in_string = true;
    else if (c == '{') ++depth;
    else if (c == '}') {
      --depth;
      if (depth == 0) return text.substr(start, i - start + 1);
    }
  }
  return std::nullopt;
}

inline std::optional<Json> parse_json_lenient(const std::string& text) {
  try {
    return Json::parse(trim(text));
  } catch (const std::exception&) {
  }
  if (auto obj = first_json_object(text)) {
    try {
      return Json::parse(*obj);
    } catch (const std::exception&) {
    }
  }
  return std::nullopt;
}

/// Ordered protected spans (amounts, percents, citations, bare numerals and
/// dates). Perturbed variants must preserve this sequence exactly.
inline std::vector<std::string> protected_spans(const std::string& text) {
  static const std::regex pattern(
      R"((\$[0-9][0-9,]*(\.[0-9]+)?)|([0-9]+(\.[0-9]+)?%)|([Ss]ection\s+[0-9]+[A-Za-z0-9()]*)|(§\s*[0-9]+[A-Za-z0-9()]*)|([0-9][0-9,/\-]*[0-9]|[0-9]))");
  std::vector<std::string> spans;
  auto begin = std::sregex_iterator(text.begin(), text.end(), pattern);
  for (auto it = begin; it != std::sregex_iterator(); ++it)
    spans.push_back(it->str());
  return spans;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// High-level operations

struct DirectAnswer {
  std::string reasoning;
  bool numeric_task;
  bool entailed = false;  // entailment task
  BigInt value;           // numeric task
  double confidence = 0.0;
};

/// Case-to-facts translation. The response must be Prolog facts only; any
/// rule, parse failure, or blocklisted assertion rejects the translation
/// (the raw response rides along for audit).
inline Program translate_case(Provider& provider, const TemplateSet& templates,
                              const std::string& events_pl,
                              const std::string& utils_pl,
                              const std::string& case_text,
                              const std::string& question, bool numeric_task,
                              const Blocklist& blocklist,
                              bool asserts_conclusion = false) {
  const PromptTemplate& tmpl =
      templates.get(numeric_task ? "to_facts_numeric" : "to_facts_entail");
  auto rendered = tmpl.render({{"EVENTS_PL", events_pl},
                               {"UTILS_PL", utils_pl},
                               {"case_text", case_text},
                               {"question", question}});
  std::string raw = provider.complete(rendered.system_text,
                                      rendered.user_text);
  std::string cleaned = detail::strip_code_fences(raw);
  Program program;
  try {
    program = parse_program(cleaned, "llm-translation");
  } catch (const ParseError& e) {
    throw TranslationError(std::string("translated facts do not parse: ") +
                               e.what(),
                           raw);
  }
  for (const Clause& c : program.clauses) {
    if (!c.is_fact())
      throw TranslationError(
          "translator emitted a rule for " + c.head.indicator() +
              " (facts only)",
          raw);
    if (!asserts_conclusion &&
        blocklist.blocked(c.head.name(), c.head.arity()))
      throw TranslationError(
          "translator asserted computed predicate " + c.head.indicator(),
          raw);
  }
  return program;
}

/// Direct QA: strict JSON contract {reasoning, final_answer, confidence}.
/// One lenient extraction pass is allowed; anything else is a
/// ProviderError which the harness maps to Abstain(provider_error).
inline DirectAnswer direct_qa(Provider& provider, const TemplateSet& templates,
                              const std::string& statute_text,
                              const std::string& case_text,
                              const std::string& question, bool numeric_task) {
  const PromptTemplate& tmpl =
      templates.get(numeric_task ? "direct_numeric" : "direct_entail");
  auto rendered = tmpl.render({{"statute_text", statute_text},
                               {"case_text", case_text},
                               {"question", question}});
  std::string raw = provider.complete(rendered.system_text,
                                      rendered.user_text);
  auto parsed = detail::parse_json_lenient(raw);
  if (!parsed || !parsed->is_object())
    throw ProviderError("direct QA response is not a JSON object");
  const Json& j = *parsed;
  if (!j.contains("reasoning") || !j.contains("final_answer") ||
      !j.contains("confidence"))
    throw ProviderError("direct QA response missing required fields");
  DirectAnswer out;
  out.numeric_task = numeric_task;
  out.reasoning = j.at("reasoning").is_string()
                      ? j.at("reasoning").get<std::string>()
                      : j.at("reasoning").dump();
  if (!j.at("confidence").is_number())
    throw ProviderError("confidence must be a number");
  out.confidence = j.at("confidence").get<double>();
  if (out.confidence < 0.0 || out.confidence > 1.0)
    throw ProviderError("confidence out of [0,1]");
  if (numeric_task) {
    if (!j.at("final_answer").is_number_integer())
      throw ProviderError(
          "numeric final_answer must be a bare integer, got " +
          j.at("final_answer").dump());
    out.value = BigInt(j.at("final_answer").get<std::int64_t>());
  } else {
    if (!j.at("final_answer").is_string())
      throw ProviderError("entailment final_answer must be a string");
    std::string v = j.at("final_answer").get<std::string>();
    if (v != "Entailment" && v != "Contradiction")
      throw ProviderError(
          "entailment final_answer must be exactly Entailment or "
          "Contradiction, got '" + v + "'");
    out.entailed = v == "Entailment";
  }
  return out;
}

/// Quiz administration: expects {"answer": "X"}. A response that does not
/// parse to a single letter A-E is a non-response (nullopt) and is excluded
/// from quiz denominators.
inline std::optional<char> take_quiz(Provider& provider,
                                     const TemplateSet& templates,
                                     const std::array<std::string, 4>& options,
                                     const std::string& split_name,
                                     const std::string& dataset_name) {
  auto rendered = templates.get("quiz").render({{"split_name", split_name},
                                                {"dataset_name", dataset_name},
                                                {"option_a", options[0]},
                                                {"option_b", options[1]},
                                                {"option_c", options[2]},
                                                {"option_d", options[3]}});
  std::string raw = provider.complete(rendered.system_text,
                                      rendered.user_text);
  std::string trimmed = detail::trim(raw);
  // strict contract: the whole response is the JSON object
  Json j;
  try {
    j = Json::parse(trimmed);
  } catch (const std::exception&) {
    return std::nullopt;
  }
  if (!j.is_object() || !j.contains("answer") || !j.at("answer").is_string())
    return std::nullopt;
  std::string a = j.at("answer").get<std::string>();
  if (a.size() != 1) return std::nullopt;
  char c = a[0];
  if (c >= 'a' && c <= 'e') c = static_cast<char>(c - 'a' + 'A');
  if (c < 'A' || c > 'E') return std::nullopt;
  return c;
}

struct PerturbationVariant {
  std::string text;
  std::vector<std::string> changes;
};

/// Four word-level perturbations of `text`, validated against the strict
/// spans contract: exactly four, all distinct, none byte-equal to the
/// input, numerals/dates/citations untouched. Validation failures throw
/// TranslationError (raw response attached) so quiz builders can skip the
/// item with a warning.
inline std::vector<PerturbationVariant> generate_perturbations(
    Provider& provider, const TemplateSet& templates,
    const std::string& text) {
  auto rendered = templates.get("dcq_perturb").render({{"text", text}});
  std::string raw = provider.complete(rendered.system_text,
                                      rendered.user_text);
  auto parsed = detail::parse_json_lenient(raw);
  if (!parsed || !parsed->contains("perturbations") ||
      !parsed->at("perturbations").is_array())
    throw TranslationError("perturbation response is not valid JSON", raw);
  const Json& arr = parsed->at("perturbations");
  if (arr.size() != 4)
    throw TranslationError("expected exactly 4 perturbations, got " +
                               std::to_string(arr.size()),
                           raw);
  std::vector<PerturbationVariant> variants;
  std::vector<std::string> original_spans = detail::protected_spans(text);
  for (const auto& item : arr) {
    if (!item.contains("text"))
      throw TranslationError("perturbation missing text field", raw);
    PerturbationVariant v;
    v.text = item.at("text").get<std::string>();
    if (item.contains("changes"))
      for (const auto& ch : item.at("changes"))
        v.changes.push_back(ch.get<std::string>());
    if (v.text == text)
      throw TranslationError("perturbation identical to the original", raw);
    for (const auto& other : variants)
      if (other.text == v.text)
        throw TranslationError("duplicate perturbation variant", raw);
    if (detail::protected_spans(v.text) != original_spans)
      throw TranslationError(
          "perturbation altered a protected span (numeral/date/citation)",
          raw);
    variants.push_back(std::move(v));
  }
  return variants;
}

}  // namespace taxlog

#endif  // TAXLOG_LLM_HPP_
