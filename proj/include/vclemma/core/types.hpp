#ifndef VCLEMMA_CORE_TYPES_HPP_
#define VCLEMMA_CORE_TYPES_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace vclemma {

// Location of the property under proof inside the annotated source file.
struct SourceLocation {
  std::string file;
  int line = 1;  // 1-based
};

// One proof obligation as handed to the pipeline: the annotated C source it
// came from plus the goal file produced by the VC generator.
struct VerificationTask {
  std::string task_id;
  std::string property_name;
  SourceLocation property_location;
  std::string annotated_source;  // full text of the annotated C file
  std::string goal_file;         // full text of the prover file (preamble + goal)
};

// The goal statement emitted by the VC generator, split from its preamble.
struct ProofTargetedVC {
  std::string statement_text;  // the single unproved goal sentence
  std::string preamble_text;   // everything before it, verbatim
  int term_count = 0;          // cached; recomputable via count_terms
};

// A complete, self-contained prover file restating the property in
// source-level concepts, with its own proof.
struct SemanticsAwareVC {
  std::string file_text;
  std::string main_lemma_name;
  bool checked = false;  // true only after an end-to-end prover check
};

enum class LemmaProvenance { offline, online_refined, online_new, history };
enum class LemmaStatus { unchecked, checked, conflict, discarded };

const char* to_string(LemmaProvenance p);
const char* to_string(LemmaStatus s);
std::optional<LemmaProvenance> provenance_from_string(const std::string& s);
std::optional<LemmaStatus> status_from_string(const std::string& s);

// An auxiliary, independently proved proposition. depends_on lists names of
// other lemmas (earlier in the same batch, or already in a library) that
// occur as tokens in this lemma's statement or proof.
struct HelperLemma {
  std::string name;
  std::string statement;  // full statement sentence, terminator included
  std::string proof;      // tactic script, closing terminator included
  LemmaProvenance provenance = LemmaProvenance::offline;
  LemmaStatus status = LemmaStatus::unchecked;
  std::vector<std::string> depends_on;
};

struct ProofPlanStep {
  std::string lemma_name;
  std::string guidance;  // free text: where/how to apply the lemma
};

struct ProofPlan {
  std::vector<ProofPlanStep> steps;
};

// A structured prover error: the sentence that failed and what the prover said.
struct ProverError {
  std::string failed_tactic;
  std::string message;
};

// Snapshot of an in-flight proof as shown to the model.
struct ProofState {
  std::vector<std::string> applied_tactics;
  std::vector<std::string> open_goals;
  std::optional<ProverError> last_error;

  bool complete() const { return open_goals.empty() && !last_error.has_value(); }
};

enum class ProofOutcome { proved, exhausted_steps, exhausted_time, aborted };

const char* to_string(ProofOutcome o);
std::optional<ProofOutcome> outcome_from_string(const std::string& s);

enum class TranscriptEventKind {
  tactic_attempt,
  prover_reply,
  tool_call,
  tool_reply,
  lemma_added,
  budget_tick,
  note
};

const char* to_string(TranscriptEventKind k);

// One line of the run transcript. Fields are used according to kind; unused
// ones stay empty.
struct TranscriptEvent {
  TranscriptEventKind kind = TranscriptEventKind::note;
  int step = 0;
  std::string text;                      // tactic text / tool name / lemma name / note
  std::string detail;                    // prover message, tool payload, provenance
  bool accepted = false;                 // prover_reply
  std::vector<std::string> goals_after;  // prover_reply
  std::int64_t elapsed_ms = 0;           // budget_tick
};

struct ProofTranscript {
  std::string task_id;
  std::vector<TranscriptEvent> events;
  ProofOutcome outcome = ProofOutcome::aborted;
  std::optional<std::string> final_script;
};

}  // namespace vclemma

#endif  // VCLEMMA_CORE_TYPES_HPP_
