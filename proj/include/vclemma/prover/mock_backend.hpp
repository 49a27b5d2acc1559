#ifndef VCLEMMA_PROVER_MOCK_BACKEND_HPP_
#define VCLEMMA_PROVER_MOCK_BACKEND_HPP_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "vclemma/prover/backend.hpp"

namespace vclemma {

// A scripted response override. Rules are consulted in file order; a rule
// matches when its sentence equals the executed sentence after whitespace
// normalization and, if `goal` is set, the first open goal matches too.
struct MockRule {
  std::string sentence;
  std::optional<std::string> goal;
  std::string action;  // "reject" | "close_goal" | "replace_goals" | "accept"
  std::string message;
  std::vector<std::string> goals;  // payload for replace_goals
  int delay_ms = 0;
};

// Schema "vclemma.mockscript", version 1:
// { "schema": "vclemma.mockscript", "version": 1,
//   "sentence_delay_ms": 0, "rules": [ {...MockRule...} ] }
struct MockScript {
  int sentence_delay_ms = 0;
  std::vector<MockRule> rules;

  static MockScript parse(const std::string& json_text);
  static MockScript load(const std::filesystem::path& path);
};

// Deterministic in-process stand-in for an interactive prover. It understands
// enough vernacular and tactic structure to replay realistic proof scripts:
// declarations register names, lemma statements open a proof whose goal is
// the statement body, `intros` strips binders and arrows, `split` divides a
// top-level conjunction, a fixed set of finishing tactics closes the first
// goal, and `apply`/`exact`/`rewrite` demand a known name. Everything else is
// rejected unless a script rule overrides it. Reject rules are consulted
// before built-ins; other rules after structural vernacular but before
// tactic built-ins.
class MockBackend : public ProverBackend {
 public:
  explicit MockBackend(MockScript script = {}, bool allow_native_rollback = true);

  ExecResult execute(const std::string& sentence,
                     std::chrono::milliseconds timeout) override;
  bool native_rollback() const override { return allow_native_rollback_; }
  bool rollback_to(std::uint64_t state_id) override;
  std::uint64_t current_state() const override { return state_id_; }
  std::vector<std::string> current_goals() const override { return state_.goals; }

  // Introspection for tests.
  bool knows(const std::string& name) const { return state_.known.count(name) > 0; }
  int executed_count() const { return executed_count_; }

 private:
  struct PendingAssert {
    std::string name;
    std::size_t resume_goal_count;
  };

  struct State {
    std::set<std::string> known;
    std::vector<std::string> goals;
    bool proof_open = false;
    std::string proof_name;
    std::vector<PendingAssert> pending_asserts;
  };

  ExecResult accept(std::string message = "");
  ExecResult reject(std::string message);
  ExecResult apply_rule(const MockRule& rule);
  std::optional<ExecResult> try_structural(const std::string& sentence);
  std::optional<ExecResult> try_tactic(const std::string& sentence);
  void settle_pending_asserts();

  MockScript script_;
  bool allow_native_rollback_;
  State state_;
  std::uint64_t state_id_ = 0;
  std::map<std::uint64_t, State> snapshots_;
  int executed_count_ = 0;
};

}  // namespace vclemma

#endif  // VCLEMMA_PROVER_MOCK_BACKEND_HPP_
