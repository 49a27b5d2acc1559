#include <chrono>
#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "vclemma/agent/agent.hpp"
#include "vclemma/bench/bench.hpp"
#include "vclemma/core/manifest.hpp"
#include "vclemma/core/transcript.hpp"
#include "vclemma/llm/client.hpp"
#include "vclemma/offline/bundle.hpp"
#include "vclemma/prover/coqtop_backend.hpp"
#include "vclemma/prover/mock_backend.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace vclemma;

namespace {

struct LlmOptions {
  std::string config_path;
  std::string cassette;
  bool record = false;
  std::string model = "gpt-5.2-2025-12-11";
};

void add_llm_options(CLI::App* cmd, LlmOptions& opts) {
  cmd->add_option("--llm-config", opts.config_path,
                  "endpoint config JSON (required for live or recorded runs)");
  cmd->add_option("--cassette", opts.cassette,
                  "recorded exchange file; replayed unless --record is given");
  cmd->add_flag("--record", opts.record,
                "talk to the live endpoint and record onto --cassette");
  cmd->add_option("--model", opts.model, "model id for replayed cassettes");
}

// Replay a cassette, record through the live endpoint, or go straight to it.
std::shared_ptr<ChatBackend> make_chat_backend(const LlmOptions& opts,
                                               std::string& model_out) {
  model_out = opts.model;
  if (!opts.config_path.empty()) {
    LlmConfig config = load_llm_config(opts.config_path);
    model_out = config.model_id;
    auto live = std::make_shared<HttpChatBackend>(config);
    if (opts.record) {
      if (opts.cassette.empty())
        throw CLI::ValidationError("--record needs --cassette");
      return std::make_shared<RecordingBackend>(live, opts.cassette);
    }
    if (!opts.cassette.empty())
      return std::make_shared<ReplayBackend>(opts.cassette);
    return live;
  }
  if (opts.record)
    throw CLI::ValidationError("--record needs --llm-config");
  if (opts.cassette.empty())
    throw CLI::ValidationError(
        "no LLM backend: give --cassette to replay or --llm-config to go live");
  return std::make_shared<ReplayBackend>(opts.cassette);
}

struct ProverOptions {
  std::string kind = "mock";
  std::string mock_script;
  std::string coqtop_cmd;
};

void add_prover_options(CLI::App* cmd, ProverOptions& opts) {
  cmd->add_option("--prover", opts.kind, "prover backend")
      ->check(CLI::IsMember({"mock", "real"}))
      ->capture_default_str();
  cmd->add_option("--mock-script", opts.mock_script,
                  "behavior script for the mock prover");
  cmd->add_option("--coqtop", opts.coqtop_cmd,
                  "command line for the real prover (space separated)");
}

BackendFactory make_prover_factory(const ProverOptions& opts) {
  if (opts.kind == "real") {
    std::vector<std::string> argv;
    std::istringstream in(opts.coqtop_cmd);
    for (std::string word; in >> word;) argv.push_back(word);
    if (argv.empty())
      return [] { return std::make_unique<CoqtopBackend>(); };
    return [argv] { return std::make_unique<CoqtopBackend>(argv); };
  }
  if (!opts.mock_script.empty()) {
    MockScript script = MockScript::load(opts.mock_script);
    return [script] { return std::make_unique<MockBackend>(script); };
  }
  return [] { return std::make_unique<MockBackend>(); };
}

json usage_entry(const TokenUsage& u) {
  return {{"prompt", u.prompt_tokens}, {"completion", u.completion_tokens}};
}

int cmd_synthesize_offline(const std::string& task_path,
                           const std::string& out_path, bool no_psa,
                           const LlmOptions& llm_opts,
                           const ProverOptions& prover_opts) {
  VerificationTask task = load_task(task_path);
  std::string model;
  auto chat = make_chat_backend(llm_opts, model);
  LlmClient llm(chat, model);

  OfflinePipelineOptions options;
  options.no_psa = no_psa;
  OfflineBundle bundle =
      run_offline_pipeline(task, llm, make_prover_factory(prover_opts), options);
  save_bundle(bundle, out_path);

  int checked = 0;
  for (const auto& lemma : bundle.lemmas)
    if (lemma.status == LemmaStatus::checked) ++checked;
  std::cout << "task " << task.task_id << ": " << checked << " checked lemma(s), "
            << bundle.lemmas.size() - checked << " discarded, "
            << bundle.plan.steps.size() << " plan step(s)";
  if (bundle.degraded_no_psa) std::cout << " [no semantic analysis]";
  std::cout << "\nbundle written to " << out_path << "\n";
  for (const std::string& note : bundle.notes)
    std::cerr << "note: " << note << "\n";
  return 0;
}

int cmd_prove(const std::string& task_path, const std::string& bundle_path,
              const std::string& out_dir, bool no_online, bool no_offline,
              int budget_steps, int budget_secs, const LlmOptions& llm_opts,
              const ProverOptions& prover_opts) {
  VerificationTask task = load_task(task_path);
  OfflineBundle bundle;
  if (!bundle_path.empty()) bundle = load_bundle(bundle_path);

  std::string model;
  auto chat = make_chat_backend(llm_opts, model);
  LlmClient llm(chat, model);

  Budget budget;
  budget.max_steps = budget_steps;
  budget.max_wall_clock = std::chrono::seconds(budget_secs);
  AgentFlags flags;
  flags.no_online = no_online;
  flags.no_offline = no_offline;

  AgentRunResult run = run_agent(task, bundle, llm, make_prover_factory(prover_opts),
                                 budget, flags);

  fs::create_directories(out_dir);
  save_transcript(run.transcript, fs::path(out_dir) / "transcript.jsonl");
  if (run.transcript.final_script)
    write_file(fs::path(out_dir) / "artifact.v", *run.transcript.final_script);

  json usage;
  usage["offline"] = usage_entry(llm.usage(LlmClient::Phase::offline));
  usage["agent"] = usage_entry(llm.usage(LlmClient::Phase::agent));
  usage["total"] = usage_entry(llm.total_usage());
  usage["requests"] = llm.request_log().size();
  usage["steps"] = run.budget.consumed_steps;
  usage["elapsed_ms"] = run.budget.elapsed.count();
  write_file(fs::path(out_dir) / "usage.json", usage.dump(2) + "\n");

  std::cout << "task " << task.task_id << ": " << to_string(run.transcript.outcome)
            << " after " << run.budget.consumed_steps << " step(s), "
            << run.budget.elapsed.count() << " ms\n";
  if (!run.used_lemma_names.empty()) {
    std::cout << "helper lemmas used:";
    for (const std::string& name : run.used_lemma_names) std::cout << " " << name;
    std::cout << "\n";
  }
  std::cout << "outputs in " << out_dir << "\n";
  return run.transcript.outcome == ProofOutcome::proved ? 0 : 2;
}

BenchConfig parse_bench_config(const json& doc) {
  BenchConfig config;
  config.budget.max_steps = doc.value("budget_steps", config.budget.max_steps);
  if (doc.contains("budget_secs"))
    config.budget.max_wall_clock =
        std::chrono::seconds(doc["budget_secs"].get<int>());
  config.flags.no_online = doc.value("no_online", false);
  config.flags.no_offline = doc.value("no_offline", false);
  config.no_psa = doc.value("no_psa", false);
  if (doc.contains("complexity_edges"))
    config.complexity_edges = doc["complexity_edges"].get<std::vector<int>>();
  config.parallelism = doc.value("parallelism", 1);
  config.share_history = doc.value("share_history", false);
  config.model_id = doc.value("model", config.model_id);
  return config;
}

int cmd_bench(const std::string& suite_dir, const std::string& config_path,
              const std::string& report_dir) {
  json doc = json::parse(read_file(config_path));
  BenchConfig config = parse_bench_config(doc);

  std::string cassette_name = doc.value("cassette", "cassette.json");
  ChatFactory chat_factory =
      [cassette_name](const BenchmarkTask& task) -> std::shared_ptr<ChatBackend> {
    return std::make_shared<ReplayBackend>(task.directory / cassette_name);
  };

  ProverOptions prover_opts;
  prover_opts.kind = doc.value("prover", "mock");
  prover_opts.mock_script = doc.value("mock_script", "");
  prover_opts.coqtop_cmd = doc.value("coqtop", "");
  BackendFactory prover_factory = make_prover_factory(prover_opts);

  std::vector<BenchmarkTask> tasks = load_suite(suite_dir);
  RunReport report = run_benchmark(tasks, config, chat_factory, prover_factory);
  write_report(report, report_dir);
  std::cout << report_text(report);
  std::cout << "report written to " << report_dir << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"helper-lemma discovery and proving pipeline"};
  app.require_subcommand(1);

  // synthesize-offline
  std::string so_task, so_out;
  bool so_no_psa = false;
  LlmOptions so_llm;
  ProverOptions so_prover;
  CLI::App* so = app.add_subcommand(
      "synthesize-offline", "analyze a task and build its helper-lemma bundle");
  so->add_option("--task", so_task, "task manifest")->required();
  so->add_option("--out", so_out, "bundle output path")->required();
  so->add_flag("--no-psa", so_no_psa, "skip the semantic analysis stage");
  add_llm_options(so, so_llm);
  add_prover_options(so, so_prover);

  // prove
  std::string pv_task, pv_bundle, pv_out = "out";
  bool pv_no_online = false, pv_no_offline = false;
  int pv_steps = 100, pv_secs = 600;
  LlmOptions pv_llm;
  ProverOptions pv_prover;
  CLI::App* pv = app.add_subcommand("prove", "run the proof agent on one task");
  pv->add_option("--task", pv_task, "task manifest")->required();
  pv->add_option("--bundle", pv_bundle, "helper-lemma bundle from synthesize-offline");
  pv->add_option("--out", pv_out, "output directory")->capture_default_str();
  pv->add_flag("--no-online", pv_no_online, "never offer the adaptation tool");
  pv->add_flag("--no-offline", pv_no_offline, "start with an empty lemma library");
  pv->add_option("--budget-steps", pv_steps, "step budget")->capture_default_str();
  pv->add_option("--budget-secs", pv_secs, "wall-clock budget")->capture_default_str();
  add_llm_options(pv, pv_llm);
  add_prover_options(pv, pv_prover);

  // bench
  std::string bn_suite, bn_config, bn_report = "report";
  CLI::App* bn = app.add_subcommand("bench", "run a task suite and aggregate analytics");
  bn->add_option("--suite", bn_suite, "suite directory")->required();
  bn->add_option("--config", bn_config, "benchmark config JSON")->required();
  bn->add_option("--report", bn_report, "report output directory")
      ->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (so->parsed())
      return cmd_synthesize_offline(so_task, so_out, so_no_psa, so_llm, so_prover);
    if (pv->parsed())
      return cmd_prove(pv_task, pv_bundle, pv_out, pv_no_online, pv_no_offline,
                       pv_steps, pv_secs, pv_llm, pv_prover);
    if (bn->parsed()) return cmd_bench(bn_suite, bn_config, bn_report);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
