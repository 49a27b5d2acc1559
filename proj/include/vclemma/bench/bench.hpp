#ifndef VCLEMMA_BENCH_BENCH_HPP_
#define VCLEMMA_BENCH_BENCH_HPP_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "vclemma/agent/agent.hpp"
#include "vclemma/core/types.hpp"
#include "vclemma/llm/client.hpp"
#include "vclemma/offline/bundle.hpp"
#include "vclemma/prover/backend.hpp"

namespace vclemma {

// The four-way grouping of verification conditions by the kind of source
// annotation they came from.
enum class PropertyType { loop, rte, assertion, contract };

const char* to_string(PropertyType t);
std::optional<PropertyType> property_type_from_string(const std::string& s);

// Keyword classification of the annotation text behind a VC, checked in a
// fixed order: loop clauses, then runtime-error obligations, then inline
// assertions, then contract clauses. Anything unrecognized defaults to
// contract; *warning says so when provided.
PropertyType classify_property(const std::string& annotation,
                               std::string* warning = nullptr);

enum class LemmaCategory {
  memory,
  simplification,
  typing,
  arithmetic,
  data_structure,
  string_ops,
  others
};
inline constexpr int kLemmaCategoryCount = 7;

const char* to_string(LemmaCategory c);

// First match over the ordered keyword table decides the category, so a name
// carrying both a memory and an arithmetic keyword lands in memory. Keywords
// are compared case-insensitively against the underscore-separated fragments
// of the name; a fragment matches when it equals the keyword or extends it
// with digits only (isint32 matches isint, strict does not match str).
LemmaCategory categorize_lemma(const std::string& name);

// Statement-size buckets. Edges are inclusive upper bounds and must be
// strictly increasing; the final bucket is open-ended ("200+").
std::vector<std::string> bucket_labels(const std::vector<int>& edges);
int bucket_index(int term_count, const std::vector<int>& edges);
std::string bucket_complexity(int term_count, const std::vector<int>& edges);

struct BenchmarkTask {
  VerificationTask task;
  PropertyType property_type = PropertyType::contract;
  std::string source_suite;
  std::filesystem::path directory;  // suite subdirectory; empty when in-memory
};

// The annotation line the property points at, trimmed; empty when the
// location is out of range.
std::string annotation_at(const VerificationTask& task);

// One task per subdirectory of the suite root, ordered by directory name.
// Each subdirectory holds task.json plus the files it references. The
// property type comes from the manifest when present, otherwise from
// classify_property on the annotation line.
std::vector<BenchmarkTask> load_suite(const std::filesystem::path& root);

struct BenchConfig {
  Budget budget;
  AgentFlags flags;
  bool no_psa = false;
  std::vector<int> complexity_edges = {25, 50, 100, 200};
  int parallelism = 1;
  // Carry lemmas used in earlier successful proofs into later tasks.
  // Forces serial execution so reports stay reproducible.
  bool share_history = false;
  std::string model_id = "mock-model";
};

struct TaskOutcome {
  std::string task_id;
  PropertyType property_type = PropertyType::contract;
  ProofOutcome outcome = ProofOutcome::aborted;
  int term_count = 0;
  int consumed_steps = 0;
  std::int64_t elapsed_ms = 0;  // reported in meta.json, not report.json
  std::vector<std::string> offline_lemmas;  // checked bundle lemmas
  std::vector<std::string> online_lemmas;
  std::vector<std::string> used_lemmas;  // sorted
  bool used_offline = false;
  bool used_online = false;
  TokenUsage offline_usage;
  TokenUsage agent_usage;
  std::string error;     // nonempty when the task failed outside the loop
  std::string strategy;  // manual annotation slot, never computed
  std::vector<std::string> notes;
};

struct HistogramRow {
  std::string label;
  int tasks = 0;
  int proved = 0;
};

// Partition of the proved tasks by which kind of helper lemma the final
// proof used. both + offline_only + online_only + none == proved.
struct UsageQuadrants {
  int both = 0;
  int offline_only = 0;
  int online_only = 0;
  int none = 0;

  int total() const { return both + offline_only + online_only + none; }
};

struct TaxonomyRow {
  LemmaCategory category = LemmaCategory::others;
  int discovered = 0;
  int used = 0;
};

struct RunReport {
  BenchConfig config;
  std::vector<TaskOutcome> tasks;  // input order
  int total_tasks = 0;
  int proved = 0;
  int exhausted_steps = 0;
  int exhausted_time = 0;
  int aborted = 0;
  std::vector<HistogramRow> complexity_histogram;  // one row per bucket
  std::vector<HistogramRow> property_histogram;    // loop, rte, assertion, contract
  UsageQuadrants quadrants;
  std::vector<TaxonomyRow> taxonomy;  // all categories, table order
  TokenUsage offline_tokens;
  TokenUsage agent_tokens;
  std::int64_t wall_ms = 0;
};

// Supplies the chat backend for one task (cassette replay, recording, live).
using ChatFactory =
    std::function<std::shared_ptr<ChatBackend>(const BenchmarkTask&)>;

// Runs offline synthesis plus the proof agent for every task and aggregates
// the analytics. Per-task failures become aborted outcomes with an error
// note; they never abort the batch. Tasks run on a worker pool of
// config.parallelism threads unless history sharing forces a serial order.
RunReport run_benchmark(const std::vector<BenchmarkTask>& tasks,
                        const BenchConfig& config,
                        const ChatFactory& chat_factory,
                        const BackendFactory& prover_factory);

// Schema "vclemma.report", version 1. Deterministic for fixed inputs: no
// timestamps, no wall-clock fields.
nlohmann::json report_json(const RunReport& report);

// The same aggregates as fixed-width text tables.
std::string report_text(const RunReport& report);

// Writes report.json and report.txt plus meta.json (timings live there).
void write_report(const RunReport& report, const std::filesystem::path& out_dir);

}  // namespace vclemma

#endif  // VCLEMMA_BENCH_BENCH_HPP_
