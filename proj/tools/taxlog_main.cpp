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

// taxlog: statutory-reasoning toolkit CLI.
//
// Subcommands: solve, eval, quiz build|run|report, gen. Exit codes: 0 for
// any decided outcome, 2 when the solver abstains, 1 for usage/parse
// errors. Seeded runs are byte-reproducible under the mock provider.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "taxlog/corpus.hpp"
#include "taxlog/engine.hpp"
#include "taxlog/harness.hpp"
#include "taxlog/llm.hpp"
#include "taxlog/metrics.hpp"
#include "taxlog/perturb.hpp"
#include "taxlog/quiz.hpp"
#include "taxlog/sha256.hpp"

namespace fs = std::filesystem;
using namespace taxlog;

namespace {

constexpr int kExitDecided = 0;
constexpr int kExitUsage = 1;
constexpr int kExitAbstain = 2;

// Tracks files written by the current run so an aborting error can remove
// partial outputs.
class OutputTracker {
 public:
  void write(const std::string& path, const std::string& content) {
    fs::create_directories(fs::path(path).parent_path());
    write_file(path, content);
    written_.push_back(path);
  }

  void discard_all() {
    for (const auto& p : written_) std::remove(p.c_str());
    written_.clear();
  }

 private:
  std::vector<std::string> written_;
};

struct ProviderOptions {
  std::string provider = "mock";
  std::string endpoint;
  std::string model;
  std::string api_key_env = "TAXLOG_API_KEY";
  std::string mock_responses;
  int max_retries = 3;
  int jobs = 1;

  void add_flags(CLI::App* cmd) {
    cmd->add_option("--provider", provider, "Provider kind: mock or http");
    cmd->add_option("--endpoint", endpoint, "Chat-completion endpoint URL");
    cmd->add_option("--model", model, "Model name");
    cmd->add_option("--api-key-env", api_key_env,
                    "Environment variable holding the API key");
    cmd->add_option("--mock-responses", mock_responses,
                    "Canned response map for the mock provider");
    cmd->add_option("--max-retries", max_retries, "Retry budget per request");
  }

  ProviderConfig config() const {
    ProviderConfig cfg;
    cfg.kind = provider;
    cfg.endpoint = endpoint;
    cfg.model = model;
    cfg.api_key_env = api_key_env;
    cfg.max_retries = max_retries;
    cfg.concurrent_cap = jobs;
    cfg.mock_responses_path = mock_responses;
    return cfg;
  }
};

Json base_manifest(const std::string& command, std::uint64_t seed) {
  Json m;
  m["tool"] = "taxlog";
  m["command"] = command;
  m["seed"] = seed;
  return m;
}

std::string jsonl_of_cases(const std::vector<CaseInstance>& cases) {
  std::string out;
  for (const auto& c : cases) out += case_to_json(c).dump() + "\n";
  return out;
}

std::string jsonl_of_items(const std::vector<QuizItem>& items) {
  std::string out;
  for (const auto& item : items) out += item.to_json().dump() + "\n";
  return out;
}

std::string jsonl_of_responses(const std::vector<QuizResponse>& responses) {
  std::string out;
  for (const auto& r : responses) out += r.to_json().dump() + "\n";
  return out;
}

std::vector<QuizItem> read_quiz_file(const std::string& path) {
  std::vector<QuizItem> items;
  std::istringstream in(read_file(path));
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    items.push_back(QuizItem::from_json(Json::parse(line)));
  }
  return items;
}

std::vector<QuizResponse> read_response_file(const std::string& path) {
  std::vector<QuizResponse> responses;
  std::istringstream in(read_file(path));
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    responses.push_back(QuizResponse::from_json(Json::parse(line)));
  }
  return responses;
}

// ---------------------------------------------------------------------------

struct SolveArgs {
  std::string statutes;
  std::string facts;
  std::string query;
  std::string blocklist;
  std::string out_dir;
  std::string ruleset;
  int max_depth = 4096;
};

int run_solve(const SolveArgs& args) {
  StatuteKB statutes = load_statutes(args.statutes);
  if (!args.ruleset.empty()) statutes.ruleset_id = args.ruleset;
  Program facts;
  if (!args.facts.empty()) {
    std::string text = read_file(args.facts);
    facts = parse_program(text, args.facts);
    for (const Clause& c : facts.clauses)
      if (!c.is_fact())
        throw CorpusError(args.facts + ": facts file may not contain rules");
  }
  Blocklist blocklist;
  if (!args.blocklist.empty()) blocklist = Blocklist::load(args.blocklist);
  if (!blocklist.empty()) {
    for (const Clause& c : facts.clauses)
      if (blocklist.blocked(c.head.name(), c.head.arity()))
        throw AlignmentError("facts assert computed predicate " +
                             c.head.indicator());
  }
  Term goal = parse_query(args.query);

  KnowledgeBase kb(statutes.ruleset_id);
  kb.consult(statutes.program);
  kb.consult(facts);
  kb.freeze();

  SolveConfig cfg;
  cfg.max_depth = args.max_depth;
  cfg.max_solutions = 1;
  SolveOutcome out = solve(kb, goal, cfg);

  int exit_code = kExitDecided;
  std::string printed;
  if (out.exhausted()) {
    printed = "Abstain: resource_exhausted (max_depth " +
              std::to_string(args.max_depth) + ")";
    exit_code = kExitAbstain;
  } else if (out.no_solution()) {
    printed = "Contradiction";
  } else if (out.solutions[0].bindings.empty()) {
    printed = "Entailment";
  } else {
    for (const auto& [name, value] : out.solutions[0].bindings)
      printed += name + " = " + render_term(value) + "\n";
    printed.pop_back();
  }
  std::cout << printed << "\n";

  if (!args.out_dir.empty()) {
    OutputTracker files;
    Json manifest = base_manifest("solve", 0);
    manifest["statutes"] = args.statutes;
    manifest["ruleset_id"] = statutes.ruleset_id;
    manifest["facts"] = args.facts;
    manifest["query"] = args.query;
    manifest["max_depth"] = args.max_depth;
    manifest["outcome"] = printed;
    files.write(args.out_dir + "/manifest.json", manifest.dump(2) + "\n");
  }
  return exit_code;
}

// ---------------------------------------------------------------------------

struct EvalArgs {
  std::string statutes;
  std::string cases;
  std::string blocklist;
  std::string ruleset;
  std::string mode = "gold_facts";
  std::string templates;
  std::string events_pl;
  std::string utils_pl;
  std::string statute_text;
  std::string out_dir;
  std::uint64_t seed = 0;
  int max_depth = 4096;
  bool expect_sara = false;
  ProviderOptions provider;
};

int run_eval(const EvalArgs& args, OutputTracker& files) {
  StatuteKB statutes = load_statutes(args.statutes);
  if (!args.ruleset.empty()) statutes.ruleset_id = args.ruleset;
  Blocklist blocklist = Blocklist::load(args.blocklist);
  CorpusLoad corpus = load_cases(args.cases, args.expect_sara);
  for (const auto& w : corpus.warnings)
    std::cerr << "warning: " << w << "\n";

  RunConfig run;
  run.mode = eval_mode_from_name(args.mode);
  run.solve.max_depth = args.max_depth;
  run.jobs = args.provider.jobs;
  if (!args.events_pl.empty()) run.events_pl = read_file(args.events_pl);
  if (!args.utils_pl.empty()) run.utils_pl = read_file(args.utils_pl);
  run.statute_text = args.statute_text.empty()
                         ? read_file(args.statutes)
                         : read_file(args.statute_text);

  std::unique_ptr<Provider> provider;
  std::optional<TemplateSet> templates;
  if (run.mode != EvalMode::kGoldFacts) {
    provider = make_provider(args.provider.config());
    templates = TemplateSet::load(args.templates);
  }

  RunResult result =
      run_split(statutes, corpus.cases, blocklist, run, provider.get(),
                templates ? &*templates : nullptr);

  Json report = result.to_json();
  files.write(args.out_dir + "/report.json", report.dump(2) + "\n");
  Json manifest = base_manifest("eval", args.seed);
  manifest["statutes"] = args.statutes;
  manifest["ruleset_id"] = statutes.ruleset_id;
  manifest["cases"] = args.cases;
  manifest["blocklist"] = args.blocklist;
  manifest["mode"] = args.mode;
  manifest["max_depth"] = args.max_depth;
  manifest["jobs"] = args.provider.jobs;
  manifest["cases_sha256"] = sha256_hex(read_file(args.cases));
  if (run.mode != EvalMode::kGoldFacts)
    manifest["provider"] = args.provider.config().to_json();
  files.write(args.out_dir + "/manifest.json", manifest.dump(2) + "\n");

  std::cout << result.metrics.summary_line() << "\n";
  return kExitDecided;
}

// ---------------------------------------------------------------------------

struct QuizBuildArgs {
  std::string kind = "bdq";
  std::string cases;
  std::string variants;
  std::string bdq_file;
  std::string bdq_responses;
  std::string out;      // bdq: one file
  std::string out_dir;  // bcq: one file per split
  std::uint64_t seed = 0;
  ProviderOptions provider;
  std::string templates;
};

int run_quiz_build(const QuizBuildArgs& args, OutputTracker& files) {
  CorpusLoad corpus = load_cases(args.cases);
  if (args.kind == "bdq") {
    std::vector<std::string> warnings;
    std::unique_ptr<VariantSource> source;
    std::unique_ptr<Provider> provider;
    std::optional<TemplateSet> templates;
    if (!args.variants.empty()) {
      source = std::make_unique<FileVariantSource>(
          FileVariantSource::load(args.variants));
    } else {
      provider = make_provider(args.provider.config());
      templates = TemplateSet::load(args.templates);
      class ProviderVariants : public VariantSource {
       public:
        ProviderVariants(Provider& p, const TemplateSet& t)
            : provider_(p), templates_(t) {}
        std::optional<std::vector<std::string>> variants_for(
            const CaseInstance& c) override {
          try {
            auto vs = generate_perturbations(provider_, templates_,
                                             quiz_instance_text(c));
            std::vector<std::string> texts;
            for (auto& v : vs) texts.push_back(std::move(v.text));
            return texts;
          } catch (const std::exception&) {
            return std::nullopt;
          }
        }

       private:
        Provider& provider_;
        const TemplateSet& templates_;
      };
      source = std::make_unique<ProviderVariants>(*provider, *templates);
    }
    std::vector<QuizItem> items =
        build_bdq(corpus.cases, *source, args.seed, &warnings);
    for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
    files.write(args.out, jsonl_of_items(items));
    Json manifest = base_manifest("quiz build bdq", args.seed);
    manifest["cases"] = args.cases;
    manifest["variants"] = args.variants;
    manifest["items"] = items.size();
    manifest["skipped"] = warnings.size();
    files.write(args.out + ".manifest.json", manifest.dump(2) + "\n");
    std::cout << "bdq items: " << items.size() << " (skipped "
              << warnings.size() << ")\n";
    return kExitDecided;
  }
  if (args.kind == "bcq") {
    std::vector<QuizItem> bdq = read_quiz_file(args.bdq_file);
    PositionProfile profile =
        position_bias(read_response_file(args.bdq_responses));
    std::map<std::string, std::string> originals;
    for (const auto& c : corpus.cases)
      originals.emplace(c.id, quiz_instance_text(c));
    bool fallback = false;
    std::vector<std::string> warnings;
    auto splits = build_bcq(
        bdq, profile,
        [&](const std::string& id) { return originals.at(id); }, &fallback,
        &warnings);
    for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
    for (const auto& [pos, items] : splits) {
      std::string path = args.out_dir + "/bcq_" +
                         std::string(1, position_letter(pos)) + ".jsonl";
      files.write(path, jsonl_of_items(items));
    }
    Json manifest = base_manifest("quiz build bcq", args.seed);
    manifest["bdq"] = args.bdq_file;
    manifest["bdq_responses"] = args.bdq_responses;
    manifest["bdq_profile"] = profile.to_json();
    manifest["fallback_all_positions"] = fallback;
    files.write(args.out_dir + "/bcq_manifest.json", manifest.dump(2) + "\n");
    std::cout << "bcq splits: " << splits.size()
              << (fallback ? " (fallback: no non-preferred position)" : "")
              << "\n";
    return kExitDecided;
  }
  throw CorpusError("quiz build --kind must be bdq or bcq");
}

struct QuizRunArgs {
  std::string quiz;
  std::string responder = "uniform";
  std::string out;
  std::string split_name = "entailment";
  std::string dataset_name = "SARA";
  std::uint64_t seed = 0;
  ProviderOptions provider;
  std::string templates;
};

int run_quiz_run(const QuizRunArgs& args, OutputTracker& files) {
  std::vector<QuizItem> items = read_quiz_file(args.quiz);
  std::vector<QuizResponse> responses;
  std::size_t non_responses = 0;
  if (args.responder == "provider") {
    auto provider = make_provider(args.provider.config());
    TemplateSet templates = TemplateSet::load(args.templates);
    for (const auto& item : items) {
      std::array<std::string, 4> options{item.options[0], item.options[1],
                                         item.options[2], item.options[3]};
      std::optional<char> letter;
      try {
        letter = take_quiz(*provider, templates, options, args.split_name,
                           args.dataset_name);
      } catch (const ProviderError&) {
        letter = std::nullopt;
      }
      if (!letter) {
        ++non_responses;
        continue;
      }
      responses.push_back(QuizResponse{item.id, position_index(*letter),
                                       item.original_position});
    }
  } else {
    ResponderKind kind = responder_from_name(args.responder);
    for (const auto& item : items) {
      Rng rng = Rng::derive(args.seed, "resp:" + item.id);
      responses.push_back(QuizResponse{
          item.id, simulate_response(kind, item, rng),
          item.original_position});
    }
  }
  files.write(args.out, jsonl_of_responses(responses));
  Json manifest = base_manifest("quiz run", args.seed);
  manifest["quiz"] = args.quiz;
  manifest["responder"] = args.responder;
  manifest["responses"] = responses.size();
  manifest["non_responses"] = non_responses;
  files.write(args.out + ".manifest.json", manifest.dump(2) + "\n");
  std::cout << "responses: " << responses.size() << " (non-responses "
            << non_responses << ")\n";
  return kExitDecided;
}

struct QuizReportArgs {
  std::string bdq_responses;
  std::vector<std::string> bcq_responses;
  std::string out;
  std::uint64_t seed = 0;
};

int run_quiz_report(const QuizReportArgs& args, OutputTracker& files) {
  PositionProfile profile =
      position_bias(read_response_file(args.bdq_responses));
  std::map<int, std::pair<double, std::size_t>> results;
  for (const auto& path : args.bcq_responses) {
    std::vector<QuizResponse> rs = read_response_file(path);
    if (rs.empty()) throw CorpusError("empty BCQ response file: " + path);
    if (!rs[0].original_position)
      throw CorpusError(path + " is not a BCQ response file");
    results[*rs[0].original_position] =
        std::make_pair(bcq_accuracy(rs), rs.size());
  }
  bool fallback = profile.non_preferred.empty();
  ContaminationReport report =
      contamination_summary(profile, results, fallback);
  report.seed = args.seed;
  if (!args.out.empty())
    files.write(args.out, report.to_json().dump(2) + "\n");
  auto fmt = [](const std::optional<double>& v) {
    if (!v) return std::string("n/a");
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4f", *v);
    return std::string(buf);
  };
  std::cout << "min_contamination " << fmt(report.min_contamination)
            << "  max_contamination " << fmt(report.max_contamination)
            << "  headline_kappa " << fmt(report.headline_kappa) << "\n";
  return kExitDecided;
}

// ---------------------------------------------------------------------------

struct GenArgs {
  std::string split;
  std::string statutes;
  std::string cases;
  std::string blocklist;
  std::string paraphrase_file;
  std::string out_dir;
  std::uint64_t seed = 0;
  int max_depth = 4096;
  double scale_min = 0.7, scale_max = 1.3;
  double delta_min = 0.01, delta_max = 0.05;
};

int run_gen(const GenArgs& args, OutputTracker& files) {
  SplitTag tag = SplitTag::parse(args.split);
  if (tag.rule_variant == RuleVariant::kOriginal &&
      tag.case_variant == CaseVariant::kOriginal)
    throw CorpusError("--split must name a generated row, not an original");
  CaseOp op = tag.case_variant == CaseVariant::kNumericChanged
                  ? CaseOp::kNumeric
              : tag.case_variant == CaseVariant::kParaphrased
                  ? CaseOp::kParaphrase
                  : CaseOp::kNone;

  StatuteKB statutes = load_statutes(args.statutes);
  Blocklist blocklist = Blocklist::load(args.blocklist);
  CorpusLoad corpus = load_cases(args.cases);

  PerturbationSpec spec;
  spec.seed = args.seed;
  spec.scale_min = args.scale_min;
  spec.scale_max = args.scale_max;
  spec.delta_min = args.delta_min;
  spec.delta_max = args.delta_max;

  SolveConfig solve_cfg;
  solve_cfg.max_depth = args.max_depth;

  ParaphraseSource paraphrase = nullptr;
  if (op == CaseOp::kParaphrase) {
    if (args.paraphrase_file.empty())
      throw CorpusError("paraphrase split requires --paraphrase-file");
    paraphrase = paraphrase_file_source(args.paraphrase_file);
  }

  SplitResult result = assemble_split(
      corpus.cases, statutes, tag.base, tag.rule_variant, op, spec,
      blocklist, solve_cfg, paraphrase, sha256_hex(read_file(args.cases)));

  files.write(args.out_dir + "/split_" + result.split_name + ".jsonl",
              jsonl_of_cases(result.items));
  if (result.ruleset.ruleset_id == "r_prime")
    files.write(args.out_dir + "/rprime.pl",
                render_program(result.ruleset.program));
  Json manifest = result.manifest;
  manifest["statutes"] = args.statutes;
  manifest["cases"] = args.cases;
  files.write(args.out_dir + "/manifest.json", manifest.dump(2) + "\n");
  std::cout << "split " << result.split_name << ": " << result.items.size()
            << " items, " << manifest.at("drops").size() << " drops\n";
  return kExitDecided;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"taxlog: execute tax-law cases as logic programs, audit "
               "benchmark contamination, generate perturbed test splits"};
  app.require_subcommand(1);

  SolveArgs solve_args;
  CLI::App* solve_cmd = app.add_subcommand(
      "solve", "Solve one query against statutes plus case facts");
  solve_cmd->add_option("--statutes", solve_args.statutes, "Statute .pl file")
      ->required();
  solve_cmd->add_option("--facts", solve_args.facts, "Case facts .pl file");
  solve_cmd->add_option("--query", solve_args.query, "Goal to solve")
      ->required();
  solve_cmd->add_option("--blocklist", solve_args.blocklist,
                        "Computed-predicate blocklist");
  solve_cmd->add_option("--ruleset", solve_args.ruleset,
                        "Ruleset label recorded in the manifest (r, r_prime)");
  solve_cmd->add_option("--max-depth", solve_args.max_depth,
                        "Resolution depth bound");
  solve_cmd->add_option("--out", solve_args.out_dir,
                        "Directory for the run manifest");

  EvalArgs eval_args;
  CLI::App* eval_cmd =
      app.add_subcommand("eval", "Run a split end-to-end and score it");
  eval_cmd->add_option("--statutes", eval_args.statutes, "Statute .pl file")
      ->required();
  eval_cmd->add_option("--cases", eval_args.cases, "Case JSONL file")
      ->required();
  eval_cmd->add_option("--blocklist", eval_args.blocklist, "Blocklist file")
      ->required();
  eval_cmd->add_option("--ruleset", eval_args.ruleset,
                       "Ruleset label recorded in the report (r, r_prime)");
  eval_cmd->add_option("--mode", eval_args.mode,
                       "gold_facts | llm_translated | direct_qa");
  eval_cmd->add_option("--templates", eval_args.templates,
                       "Prompt template directory");
  eval_cmd->add_option("--events", eval_args.events_pl,
                       "events.pl reference code for translation prompts");
  eval_cmd->add_option("--utils", eval_args.utils_pl,
                       "utils.pl reference code for translation prompts");
  eval_cmd->add_option("--statute-text", eval_args.statute_text,
                       "Statute text file for direct QA prompts");
  eval_cmd->add_option("--out", eval_args.out_dir, "Output directory")
      ->required();
  eval_cmd->add_option("--seed", eval_args.seed, "Run seed (echoed)");
  eval_cmd->add_option("--max-depth", eval_args.max_depth,
                       "Resolution depth bound");
  eval_cmd->add_option("--jobs", eval_args.provider.jobs,
                       "Parallel case workers");
  eval_cmd->add_flag("--expect-sara", eval_args.expect_sara,
                     "Warn unless corpus totals match 276/100");
  eval_args.provider.add_flags(eval_cmd);

  CLI::App* quiz_cmd =
      app.add_subcommand("quiz", "Contamination quizzes (BDQ/BCQ)");
  quiz_cmd->require_subcommand(1);

  QuizBuildArgs qb;
  CLI::App* quiz_build_cmd =
      quiz_cmd->add_subcommand("build", "Build BDQ or BCQ quiz files");
  quiz_build_cmd->add_option("--kind", qb.kind, "bdq | bcq");
  quiz_build_cmd->add_option("--cases", qb.cases, "Case JSONL file")
      ->required();
  quiz_build_cmd->add_option("--variants", qb.variants,
                             "Pre-generated variants JSON (bdq)");
  quiz_build_cmd->add_option("--bdq", qb.bdq_file, "BDQ quiz file (bcq)");
  quiz_build_cmd->add_option("--bdq-responses", qb.bdq_responses,
                             "BDQ responses for the bias profile (bcq)");
  quiz_build_cmd->add_option("--out", qb.out, "Output quiz file (bdq)");
  quiz_build_cmd->add_option("--out-dir", qb.out_dir,
                             "Output directory (bcq)");
  quiz_build_cmd->add_option("--seed", qb.seed, "Option-order seed");
  quiz_build_cmd->add_option("--templates", qb.templates,
                             "Template directory (provider variants)");
  qb.provider.add_flags(quiz_build_cmd);

  QuizRunArgs qr;
  CLI::App* quiz_run_cmd =
      quiz_cmd->add_subcommand("run", "Administer a quiz file");
  quiz_run_cmd->add_option("--quiz", qr.quiz, "Quiz JSONL file")->required();
  quiz_run_cmd->add_option("--responder", qr.responder,
                           "memorizer | uniform | anti | provider");
  quiz_run_cmd->add_option("--out", qr.out, "Responses output file")
      ->required();
  quiz_run_cmd->add_option("--seed", qr.seed, "Responder seed");
  quiz_run_cmd->add_option("--split-name", qr.split_name,
                           "Split name rendered into the quiz prompt");
  quiz_run_cmd->add_option("--dataset-name", qr.dataset_name,
                           "Dataset name rendered into the quiz prompt");
  quiz_run_cmd->add_option("--templates", qr.templates,
                           "Template directory (provider responder)");
  qr.provider.add_flags(quiz_run_cmd);

  QuizReportArgs qrep;
  CLI::App* quiz_report_cmd = quiz_cmd->add_subcommand(
      "report", "Compute contamination from BDQ/BCQ responses");
  quiz_report_cmd
      ->add_option("--bdq", qrep.bdq_responses, "BDQ responses file")
      ->required();
  quiz_report_cmd
      ->add_option("--bcq", qrep.bcq_responses,
                   "BCQ responses file (repeat per split)")
      ->required();
  quiz_report_cmd->add_option("--out", qrep.out, "Report JSON path");
  quiz_report_cmd->add_option("--seed", qrep.seed, "Seed echoed in report");

  GenArgs gen_args;
  CLI::App* gen_cmd =
      app.add_subcommand("gen", "Generate a perturbed test split");
  gen_cmd->add_option("--split", gen_args.split,
                      "N_r | N_c | N_rc | En_r | En_c | En_rc | Ee_c")
      ->required();
  gen_cmd->add_option("--statutes", gen_args.statutes, "Statute .pl file")
      ->required();
  gen_cmd->add_option("--cases", gen_args.cases, "Base case JSONL file")
      ->required();
  gen_cmd->add_option("--blocklist", gen_args.blocklist, "Blocklist file")
      ->required();
  gen_cmd->add_option("--paraphrase-file", gen_args.paraphrase_file,
                      "Pre-generated paraphrases (Ee_c)");
  gen_cmd->add_option("--out", gen_args.out_dir, "Output directory")
      ->required();
  gen_cmd->add_option("--seed", gen_args.seed, "Generation seed");
  gen_cmd->add_option("--max-depth", gen_args.max_depth,
                      "Resolution depth bound");
  gen_cmd->add_option("--scale-min", gen_args.scale_min,
                      "Lower rescale bound");
  gen_cmd->add_option("--scale-max", gen_args.scale_max,
                      "Upper rescale bound");
  gen_cmd->add_option("--delta-min", gen_args.delta_min,
                      "Lower negative-offset bound");
  gen_cmd->add_option("--delta-max", gen_args.delta_max,
                      "Upper negative-offset bound");

  CLI11_PARSE(app, argc, argv);

  OutputTracker files;
  try {
    if (solve_cmd->parsed()) return run_solve(solve_args);
    if (eval_cmd->parsed()) return run_eval(eval_args, files);
    if (quiz_build_cmd->parsed()) return run_quiz_build(qb, files);
    if (quiz_run_cmd->parsed()) return run_quiz_run(qr, files);
    if (quiz_report_cmd->parsed()) return run_quiz_report(qrep, files);
    if (gen_cmd->parsed()) return run_gen(gen_args, files);
  } catch (const std::exception& e) {
    files.discard_all();  // no partial outputs on aborting errors
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
