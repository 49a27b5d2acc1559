#include <algorithm>
#include <atomic>
#include <chrono>
#include <ctime>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "vclemma/bench/bench.hpp"
#include "vclemma/core/manifest.hpp"
#include "vclemma/core/text.hpp"

namespace vclemma {

namespace fs = std::filesystem;
using nlohmann::json;

std::string annotation_at(const VerificationTask& task) {
  std::istringstream in(task.annotated_source);
  std::string line;
  for (int n = 1; std::getline(in, line); ++n)
    if (n == task.property_location.line) return normalize_ws(line);
  return "";
}

std::vector<BenchmarkTask> load_suite(const fs::path& root) {
  if (!fs::is_directory(root))
    throw std::invalid_argument("suite root is not a directory: " +
                                root.string());
  std::vector<fs::path> dirs;
  for (const auto& entry : fs::directory_iterator(root))
    if (entry.is_directory()) dirs.push_back(entry.path());
  std::sort(dirs.begin(), dirs.end());

  std::vector<BenchmarkTask> tasks;
  for (const fs::path& dir : dirs) {
    fs::path manifest = dir / "task.json";
    if (!fs::exists(manifest))
      throw std::invalid_argument("task directory has no task.json: " +
                                  dir.string());
    BenchmarkTask bench;
    bench.task = load_task(manifest);
    bench.directory = dir;
    TaskManifest m = load_task_manifest(manifest);
    bench.source_suite = m.suite.value_or(root.filename().string());
    if (m.property_type) {
      auto parsed = property_type_from_string(*m.property_type);
      if (!parsed)
        throw std::invalid_argument("unknown property_type \"" +
                                    *m.property_type + "\" in " +
                                    manifest.string());
      bench.property_type = *parsed;
    } else {
      bench.property_type = classify_property(annotation_at(bench.task));
    }
    tasks.push_back(std::move(bench));
  }
  return tasks;
}

namespace {

struct TaskRun {
  TaskOutcome outcome;
  std::vector<HelperLemma> shareable;  // used lemmas from a proved task
};

TaskRun run_one(const BenchmarkTask& bench, const BenchConfig& config,
                const ChatFactory& chat_factory,
                const BackendFactory& prover_factory,
                const std::vector<HelperLemma>& history) {
  TaskRun run;
  TaskOutcome& out = run.outcome;
  out.task_id = bench.task.task_id;
  out.property_type = bench.property_type;
  auto started = std::chrono::steady_clock::now();
  try {
    out.term_count = parse_goal_file(bench.task.goal_file).term_count;

    LlmClient llm(chat_factory(bench), config.model_id);
    OfflineBundle bundle;
    if (!config.flags.no_offline) {
      OfflinePipelineOptions options;
      options.no_psa = config.no_psa;
      options.sentence_timeout = config.flags.sentence_timeout;
      bundle = run_offline_pipeline(bench.task, llm, prover_factory, options);
      for (const HelperLemma& lemma : bundle.lemmas)
        if (lemma.status == LemmaStatus::checked)
          out.offline_lemmas.push_back(lemma.name);
    }

    AgentRunResult agent = run_agent(bench.task, bundle, llm, prover_factory,
                                     config.budget, config.flags, history);
    out.outcome = agent.transcript.outcome;
    out.consumed_steps = agent.budget.consumed_steps;

    std::set<std::string> online_names;
    for (const HelperLemma& lemma : agent.online_lemmas) {
      out.online_lemmas.push_back(lemma.name);
      online_names.insert(lemma.name);
    }
    out.used_lemmas.assign(agent.used_lemma_names.begin(),
                           agent.used_lemma_names.end());
    for (const std::string& name : out.used_lemmas) {
      if (online_names.count(name))
        out.used_online = true;
      else
        out.used_offline = true;
    }
    out.offline_usage = llm.usage(LlmClient::Phase::offline);
    out.agent_usage = llm.usage(LlmClient::Phase::agent);

    if (out.outcome == ProofOutcome::proved) {
      std::set<std::string> used = agent.used_lemma_names;
      for (const HelperLemma& lemma : bundle.lemmas)
        if (lemma.status == LemmaStatus::checked && used.count(lemma.name))
          run.shareable.push_back(lemma);
      for (const HelperLemma& lemma : agent.online_lemmas)
        if (used.count(lemma.name)) run.shareable.push_back(lemma);
    }
  } catch (const std::exception& e) {
    out.outcome = ProofOutcome::aborted;
    out.error = e.what();
  }
  out.elapsed_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                       std::chrono::steady_clock::now() - started)
                       .count();
  return run;
}

}  // namespace

RunReport run_benchmark(const std::vector<BenchmarkTask>& tasks,
                        const BenchConfig& config,
                        const ChatFactory& chat_factory,
                        const BackendFactory& prover_factory) {
  std::vector<std::string> labels = bucket_labels(config.complexity_edges);
  auto batch_started = std::chrono::steady_clock::now();

  std::vector<TaskRun> runs(tasks.size());
  if (config.share_history || config.parallelism <= 1) {
    std::vector<HelperLemma> history;
    std::set<std::string> history_names;
    for (std::size_t i = 0; i < tasks.size(); ++i) {
      runs[i] = run_one(tasks[i], config, chat_factory, prover_factory,
                        config.share_history ? history
                                             : std::vector<HelperLemma>{});
      if (!config.share_history) continue;
      for (const HelperLemma& lemma : runs[i].shareable)
        if (history_names.insert(lemma.name).second) history.push_back(lemma);
    }
  } else {
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      for (std::size_t i = next++; i < tasks.size(); i = next++)
        runs[i] = run_one(tasks[i], config, chat_factory, prover_factory, {});
    };
    std::size_t n = std::min<std::size_t>(
        static_cast<std::size_t>(config.parallelism), tasks.size());
    std::vector<std::thread> pool;
    for (std::size_t i = 0; i < n; ++i) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }

  RunReport report;
  report.config = config;
  report.total_tasks = static_cast<int>(tasks.size());
  for (const std::string& label : labels)
    report.complexity_histogram.push_back({label, 0, 0});
  for (PropertyType t : {PropertyType::loop, PropertyType::rte,
                         PropertyType::assertion, PropertyType::contract})
    report.property_histogram.push_back({to_string(t), 0, 0});
  for (int c = 0; c < kLemmaCategoryCount; ++c)
    report.taxonomy.push_back({static_cast<LemmaCategory>(c), 0, 0});

  for (TaskRun& run : runs) {
    TaskOutcome& out = run.outcome;
    bool proved = out.outcome == ProofOutcome::proved;
    switch (out.outcome) {
      case ProofOutcome::proved:
        ++report.proved;
        break;
      case ProofOutcome::exhausted_steps:
        ++report.exhausted_steps;
        break;
      case ProofOutcome::exhausted_time:
        ++report.exhausted_time;
        break;
      case ProofOutcome::aborted:
        ++report.aborted;
        break;
    }

    auto& cbucket = report.complexity_histogram[static_cast<std::size_t>(
        bucket_index(out.term_count, config.complexity_edges))];
    ++cbucket.tasks;
    auto& pbucket =
        report.property_histogram[static_cast<int>(out.property_type)];
    ++pbucket.tasks;
    if (proved) {
      ++cbucket.proved;
      ++pbucket.proved;
      if (out.used_offline && out.used_online)
        ++report.quadrants.both;
      else if (out.used_offline)
        ++report.quadrants.offline_only;
      else if (out.used_online)
        ++report.quadrants.online_only;
      else
        ++report.quadrants.none;
    }

    auto categorize_into = [&](const std::vector<std::string>& names,
                               bool used) {
      for (const std::string& name : names) {
        auto& row =
            report.taxonomy[static_cast<int>(categorize_lemma(name))];
        if (used)
          ++row.used;
        else
          ++row.discovered;
      }
    };
    categorize_into(out.offline_lemmas, false);
    categorize_into(out.online_lemmas, false);
    categorize_into(out.used_lemmas, true);

    report.offline_tokens += out.offline_usage;
    report.agent_tokens += out.agent_usage;
    report.tasks.push_back(std::move(out));
  }

  report.wall_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                       std::chrono::steady_clock::now() - batch_started)
                       .count();
  return report;
}

namespace {

json usage_json(const TokenUsage& usage) {
  return {{"prompt", usage.prompt_tokens}, {"completion", usage.completion_tokens}};
}

json config_json(const BenchConfig& config) {
  return {{"budget_steps", config.budget.max_steps},
          {"budget_ms", config.budget.max_wall_clock.count()},
          {"no_online", config.flags.no_online},
          {"no_offline", config.flags.no_offline},
          {"no_psa", config.no_psa},
          {"subproof_budget", config.flags.subproof_budget},
          {"listing_cap", config.flags.listing_cap},
          {"sentence_timeout_ms", config.flags.sentence_timeout.count()},
          {"complexity_edges", config.complexity_edges},
          {"parallelism", config.parallelism},
          {"share_history", config.share_history},
          {"model", config.model_id}};
}

}  // namespace

json report_json(const RunReport& report) {
  json doc;
  doc["schema"] = "vclemma.report";
  doc["version"] = 1;
  doc["config"] = config_json(report.config);
  doc["totals"] = {{"tasks", report.total_tasks},
                   {"proved", report.proved},
                   {"exhausted_steps", report.exhausted_steps},
                   {"exhausted_time", report.exhausted_time},
                   {"aborted", report.aborted}};

  json complexity = json::array();
  for (const HistogramRow& row : report.complexity_histogram)
    complexity.push_back(
        {{"bucket", row.label}, {"tasks", row.tasks}, {"proved", row.proved}});
  doc["complexity_histogram"] = complexity;

  json property = json::array();
  for (const HistogramRow& row : report.property_histogram)
    property.push_back(
        {{"type", row.label}, {"tasks", row.tasks}, {"proved", row.proved}});
  doc["property_histogram"] = property;

  doc["usage_quadrants"] = {{"both", report.quadrants.both},
                            {"offline_only", report.quadrants.offline_only},
                            {"online_only", report.quadrants.online_only},
                            {"none", report.quadrants.none}};

  json taxonomy = json::array();
  for (const TaxonomyRow& row : report.taxonomy)
    taxonomy.push_back({{"category", to_string(row.category)},
                        {"discovered", row.discovered},
                        {"used", row.used}});
  doc["taxonomy"] = taxonomy;

  doc["tokens"] = {{"offline", usage_json(report.offline_tokens)},
                   {"agent", usage_json(report.agent_tokens)}};

  json tasks = json::array();
  for (const TaskOutcome& out : report.tasks) {
    json t;
    t["task_id"] = out.task_id;
    t["property_type"] = to_string(out.property_type);
    t["outcome"] = to_string(out.outcome);
    t["term_count"] = out.term_count;
    t["complexity_bucket"] =
        bucket_complexity(out.term_count, report.config.complexity_edges);
    t["steps"] = out.consumed_steps;
    t["offline_lemmas"] = out.offline_lemmas;
    t["online_lemmas"] = out.online_lemmas;
    t["used_lemmas"] = out.used_lemmas;
    t["used_offline"] = out.used_offline;
    t["used_online"] = out.used_online;
    t["tokens"] = {{"offline", usage_json(out.offline_usage)},
                   {"agent", usage_json(out.agent_usage)}};
    t["error"] = out.error;
    t["strategy"] = out.strategy;
    t["notes"] = out.notes;
    tasks.push_back(std::move(t));
  }
  doc["tasks"] = tasks;
  return doc;
}

namespace {

void table_row(std::ostringstream& os, const std::string& label,
               std::size_t width, int tasks, int proved) {
  std::size_t pad = label.size() < width ? width - label.size() : 1;
  os << "  " << label << std::string(pad, ' ');
  std::string t = std::to_string(tasks);
  std::string p = std::to_string(proved);
  os << std::string(t.size() < 7 ? 7 - t.size() : 1, ' ') << t;
  os << std::string(p.size() < 8 ? 8 - p.size() : 1, ' ') << p << "\n";
}

}  // namespace

std::string report_text(const RunReport& report) {
  std::ostringstream os;
  os << "benchmark report\n";
  os << "================\n\n";
  os << "totals: " << report.total_tasks << " tasks, " << report.proved
     << " proved, " << report.exhausted_steps << " out of steps, "
     << report.exhausted_time << " out of time, " << report.aborted
     << " aborted\n\n";

  os << "outcome by property type\n";
  os << "  type             tasks  proved\n";
  for (const HistogramRow& row : report.property_histogram)
    table_row(os, row.label, 15, row.tasks, row.proved);
  os << "\n";

  os << "outcome by statement size\n";
  os << "  terms            tasks  proved\n";
  for (const HistogramRow& row : report.complexity_histogram)
    table_row(os, row.label, 15, row.tasks, row.proved);
  os << "\n";

  os << "helper lemma usage among proved tasks\n";
  os << "  both: " << report.quadrants.both
     << "   offline only: " << report.quadrants.offline_only
     << "   online only: " << report.quadrants.online_only
     << "   none: " << report.quadrants.none << "\n\n";

  os << "helper lemma taxonomy\n";
  os << "  category         disc.    used\n";
  for (const TaxonomyRow& row : report.taxonomy)
    table_row(os, to_string(row.category), 15, row.discovered, row.used);
  os << "\n";

  os << "token usage\n";
  os << "  offline: " << report.offline_tokens.prompt_tokens << " prompt, "
     << report.offline_tokens.completion_tokens << " completion\n";
  os << "  agent:   " << report.agent_tokens.prompt_tokens << " prompt, "
     << report.agent_tokens.completion_tokens << " completion\n";
  return os.str();
}

void write_report(const RunReport& report, const fs::path& out_dir) {
  fs::create_directories(out_dir);
  write_file(out_dir / "report.json", report_json(report).dump(2) + "\n");
  write_file(out_dir / "report.txt", report_text(report));

  json meta;
  std::time_t now = std::time(nullptr);
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  meta["generated_at"] = stamp;
  meta["wall_ms"] = report.wall_ms;
  json per_task;
  for (const TaskOutcome& out : report.tasks)
    per_task[out.task_id] = out.elapsed_ms;
  meta["task_wall_ms"] = per_task;
  write_file(out_dir / "meta.json", meta.dump(2) + "\n");
}

}  // namespace vclemma
