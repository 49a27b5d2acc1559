#include <memory>
#include <string>
#include <vector>

#include "doctest.h"
#include "vclemma/agent/agent.hpp"
#include "vclemma/core/text.hpp"
#include "vclemma/prover/certify.hpp"
#include "vclemma/prover/mock_backend.hpp"

using namespace vclemma;

namespace {

// Serves a fixed response sequence; when the sequence runs dry the last
// response repeats forever (budget-exhaustion runs need that).
class ScriptedChat : public ChatBackend {
 public:
  explicit ScriptedChat(std::vector<ChatResponse> replies)
      : replies_(std::move(replies)) {}
  static ChatResponse text(const std::string& t) {
    ChatResponse r;
    r.text = t;
    r.usage.prompt_tokens = 8;
    r.usage.completion_tokens = 2;
    return r;
  }
  static ChatResponse tool(const std::string& reason) {
    ChatResponse r;
    r.tool_call = ToolCall{"adapt_lemma", {{"reason", reason}}};
    return r;
  }
  ChatResponse complete(const ChatRequest& req) override {
    requests.push_back(req);
    if (replies_.empty()) throw std::runtime_error("empty chat script");
    std::size_t i = std::min(next_, replies_.size() - 1);
    ++next_;
    return replies_[i];
  }
  std::vector<ChatRequest> requests;

 private:
  std::vector<ChatResponse> replies_;
  std::size_t next_ = 0;
};

struct Rig {
  std::shared_ptr<ScriptedChat> chat;
  LlmClient llm;
  explicit Rig(std::vector<ChatResponse> replies)
      : chat(std::make_shared<ScriptedChat>(std::move(replies))),
        llm(chat, "test-model") {}
};

BackendFactory mock_factory() {
  return [] { return std::make_unique<MockBackend>(); };
}

VerificationTask trivial_task(const std::string& goal_body = "True") {
  VerificationTask task;
  task.task_id = "t-trivial";
  task.property_name = "p";
  task.property_location = {"t.c", 1};
  task.annotated_source = "int f(void) { return 0; }\n";
  task.goal_file = "Require Import ZArith.\n\nLemma goal_t : " + goal_body + ".\n";
  return task;
}

HelperLemma checked(const std::string& name, const std::string& body,
                    const std::string& tactic = "exact I.") {
  HelperLemma lemma;
  lemma.name = name;
  lemma.statement = "Lemma " + name + " : " + body + ".";
  lemma.proof = "Proof.\n" + tactic + "\nQed.";
  lemma.status = LemmaStatus::checked;
  return lemma;
}

OfflineBundle bundle_with(std::vector<HelperLemma> lemmas, ProofPlan plan = {}) {
  OfflineBundle bundle;
  bundle.lemmas = std::move(lemmas);
  bundle.plan = std::move(plan);
  return bundle;
}

int count_events(const ProofTranscript& t, TranscriptEventKind kind) {
  int n = 0;
  for (const auto& e : t.events)
    if (e.kind == kind) ++n;
  return n;
}

}  // namespace

TEST_CASE("a trivial goal proves in one step") {
  Rig rig({ScriptedChat::text("exact I.")});
  auto run = run_agent(trivial_task(), {}, rig.llm, mock_factory());

  CHECK(run.transcript.outcome == ProofOutcome::proved);
  CHECK(run.budget.consumed_steps == 1);
  REQUIRE(run.transcript.final_script.has_value());
  const std::string& file = *run.transcript.final_script;
  CHECK(file.find("Lemma goal_t : True.") != std::string::npos);
  CHECK(file.find("exact I.") != std::string::npos);

  // the artifact stands on its own under a fresh certification run
  auto report = certify_file(file, mock_factory());
  CHECK(report.accepted);
  CHECK(report.admitted_count == 0);
  CHECK(report.assumption_count == 0);

  // prompt carried the goal and the no-library placeholders
  const std::string& user = rig.chat->requests[0].messages[1].content;
  CHECK(user.find("Open goals:\nTrue") != std::string::npos);
  CHECK(user.find("Applied tactics: Proof.") != std::string::npos);
  CHECK(user.find("Helper lemmas:\n(none)") != std::string::npos);
}

TEST_CASE("a bundle lemma is replayed, listed, applied and exported") {
  ProofPlan plan;
  plan.steps = {{"HL_t", "apply HL_t to close the goal"}};
  OfflineBundle bundle = bundle_with({checked("HL_t", "True")}, plan);

  Rig rig({ScriptedChat::text("apply HL_t.")});
  auto run = run_agent(trivial_task(), bundle, rig.llm, mock_factory());

  CHECK(run.transcript.outcome == ProofOutcome::proved);
  CHECK(run.used_lemma_names == std::set<std::string>{"HL_t"});
  CHECK(count_events(run.transcript, TranscriptEventKind::lemma_added) == 1);

  const std::string& file = *run.transcript.final_script;
  CHECK(file.find("Lemma HL_t : True.") != std::string::npos);
  CHECK(file.find("apply HL_t.") != std::string::npos);

  const std::string& user = rig.chat->requests[0].messages[1].content;
  CHECK(user.find("Lemma HL_t : True. Proof...Qed. (* imported *)") !=
        std::string::npos);
  CHECK(user.find("1. apply HL_t to close the goal") != std::string::npos);
}

TEST_CASE("multi-tactic replies are split and charged per sentence") {
  Rig rig({ScriptedChat::text("split. exact I. exact I.")});
  auto run = run_agent(trivial_task("True /\\ True"), {}, rig.llm, mock_factory());

  CHECK(run.transcript.outcome == ProofOutcome::proved);
  CHECK(run.budget.consumed_steps == 3);
  CHECK(count_events(run.transcript, TranscriptEventKind::tactic_attempt) == 4);
}

TEST_CASE("a failing cassette runs out of steps exactly at the limit") {
  Rig rig({ScriptedChat::text("zap.")});
  Budget budget;
  budget.max_steps = 100;
  auto run = run_agent(trivial_task(), {}, rig.llm, mock_factory(), budget);

  CHECK(run.transcript.outcome == ProofOutcome::exhausted_steps);
  CHECK(run.budget.consumed_steps == 100);
  CHECK_FALSE(run.transcript.final_script.has_value());
}

TEST_CASE("slow prover sentences trip the wall clock, within one timeout") {
  MockScript script;
  script.sentence_delay_ms = 40;
  auto factory = [script] { return std::make_unique<MockBackend>(script); };

  Rig rig({ScriptedChat::text("zap.")});
  Budget budget;
  budget.max_wall_clock = std::chrono::milliseconds(200);
  AgentFlags flags;
  flags.sentence_timeout = std::chrono::milliseconds(1000);
  auto run = run_agent(trivial_task(), {}, rig.llm, factory, budget, flags);

  CHECK(run.transcript.outcome == ProofOutcome::exhausted_time);
  CHECK(run.budget.elapsed.count() >= 200);
  // hard stop: the overshoot is bounded by one in-flight sentence timeout
  CHECK(run.budget.elapsed.count() <=
        200 + flags.sentence_timeout.count() + 100);
}

TEST_CASE("three consecutive rejections backtrack one checkpoint") {
  Rig rig({ScriptedChat::text("split."), ScriptedChat::text("zap."),
           ScriptedChat::text("zap."), ScriptedChat::text("zap."),
           ScriptedChat::text("auto.")});
  auto run = run_agent(trivial_task("True /\\ True"), {}, rig.llm, mock_factory());

  CHECK(run.transcript.outcome == ProofOutcome::proved);
  bool backtracked = false;
  for (const auto& e : run.transcript.events)
    if (e.kind == TranscriptEventKind::note &&
        e.text.find("backtracked past \"split.\"") != std::string::npos)
      backtracked = true;
  CHECK(backtracked);
  // the abandoned branch leaves no trace in the final proof
  CHECK(run.transcript.final_script->find("split.") == std::string::npos);
  CHECK(run.transcript.final_script->find("auto.") != std::string::npos);
}

TEST_CASE("admitting and assuming are refused before reaching the prover") {
  Rig rig({ScriptedChat::text("Admitted."), ScriptedChat::text("Axiom b : True."),
           ScriptedChat::text("exact I.")});
  auto run = run_agent(trivial_task(), {}, rig.llm, mock_factory());

  CHECK(run.transcript.outcome == ProofOutcome::proved);
  int refused = 0;
  for (const auto& e : run.transcript.events)
    if (e.kind == TranscriptEventKind::prover_reply && !e.accepted &&
        e.detail.find("refused") != std::string::npos)
      ++refused;
  CHECK(refused == 2);
  CHECK(run.transcript.final_script->find("Admitted") == std::string::npos);
  CHECK(run.transcript.final_script->find("Axiom") == std::string::npos);
}

TEST_CASE("the adaptation tool is listed unless online support is off") {
  Rig with({ScriptedChat::text("exact I.")});
  run_agent(trivial_task(), {}, with.llm, mock_factory());
  REQUIRE(with.chat->requests.size() == 1);
  REQUIRE(with.chat->requests[0].tools.size() == 1);
  CHECK(with.chat->requests[0].tools[0].name == "adapt_lemma");

  Rig without({ScriptedChat::text("exact I.")});
  AgentFlags flags;
  flags.no_online = true;
  auto run = run_agent(trivial_task(), {}, without.llm, mock_factory(), {}, flags);
  CHECK(run.transcript.outcome == ProofOutcome::proved);
  for (const auto& req : without.chat->requests) CHECK(req.tools.empty());
  for (const auto& req : without.llm.request_log()) CHECK(req.tools.empty());
}

TEST_CASE("disabling the offline stage empties the starting library") {
  OfflineBundle bundle = bundle_with({checked("HL_t", "True")});
  Rig rig({ScriptedChat::text("exact I.")});
  AgentFlags flags;
  flags.no_offline = true;
  auto run = run_agent(trivial_task(), bundle, rig.llm, mock_factory(), {}, flags);

  CHECK(run.transcript.outcome == ProofOutcome::proved);
  CHECK(count_events(run.transcript, TranscriptEventKind::lemma_added) == 0);
  const std::string& user = rig.chat->requests[0].messages[1].content;
  CHECK(user.find("Helper lemmas:\n(none)") != std::string::npos);
  CHECK(user.find("HL_t") == std::string::npos);
}

TEST_CASE("the adapter can point at an existing lemma to apply") {
  OfflineBundle bundle = bundle_with({checked("HL_t", "True")});
  Rig rig({ScriptedChat::tool("goal already matches a lemma"),
           ScriptedChat::text("Apply HL_t, it closes the goal.")});
  auto run = run_agent(trivial_task(), bundle, rig.llm, mock_factory());

  CHECK(run.transcript.outcome == ProofOutcome::proved);
  // one step for the tool call, one for the resulting apply
  CHECK(run.budget.consumed_steps == 2);
  CHECK(count_events(run.transcript, TranscriptEventKind::tool_call) == 1);
  CHECK(count_events(run.transcript, TranscriptEventKind::tool_reply) == 1);
  CHECK(run.used_lemma_names == std::set<std::string>{"HL_t"});
  CHECK(run.transcript.final_script->find("apply HL_t.") != std::string::npos);
}

TEST_CASE("a refined lemma is asserted, subproved, stored and reusable") {
  OfflineBundle bundle = bundle_with({checked("HL_b", "True")});
  Rig rig({ScriptedChat::tool("HL_b does not apply directly"),
           ScriptedChat::text("Refined:\n```coq\nLemma HL_b' : 1 = 1.\n"
                              "Proof.\nreflexivity.\nQed.\n```\n"),
           ScriptedChat::text("reflexivity."), ScriptedChat::text("exact I.")});
  auto run = run_agent(trivial_task(), bundle, rig.llm, mock_factory());

  CHECK(run.transcript.outcome == ProofOutcome::proved);
  // tool + assert + subproof tactic + closing tactic
  CHECK(run.budget.consumed_steps == 4);
  REQUIRE(run.online_lemmas.size() == 1);
  CHECK(run.online_lemmas[0].name == "HL_b'");
  CHECK(run.online_lemmas[0].provenance == LemmaProvenance::online_refined);
  CHECK(run.online_lemmas[0].status == LemmaStatus::checked);

  const std::string& file = *run.transcript.final_script;
  CHECK(file.find("assert (HL_b' : 1 = 1).") != std::string::npos);
  CHECK(file.find("Lemma HL_b'") == std::string::npos);
  CHECK(run.used_lemma_names.count("HL_b'") == 1);

  // while the subproof was open, the tool was withheld
  REQUIRE(rig.chat->requests.size() == 4);
  CHECK(rig.chat->requests[2].tools.empty());
  CHECK_FALSE(rig.chat->requests[3].tools.empty());

  bool added_event = false;
  for (const auto& e : run.transcript.events)
    if (e.kind == TranscriptEventKind::lemma_added && e.text == "HL_b'" &&
        e.detail == std::string("online-refined"))
      added_event = true;
  CHECK(added_event);
}

TEST_CASE("a failing subproof is abandoned and rolled back cleanly") {
  Rig rig({ScriptedChat::tool("need a helper"),
           ScriptedChat::text("```coq\nLemma HL_n : 1 = 2.\nProof.\nauto.\n"
                              "Qed.\n```"),
           ScriptedChat::text("zap."), ScriptedChat::text("zap."),
           ScriptedChat::text("zap."), ScriptedChat::text("exact I.")});
  auto run = run_agent(trivial_task(), {}, rig.llm, mock_factory());

  CHECK(run.transcript.outcome == ProofOutcome::proved);
  CHECK(run.online_lemmas.empty());
  bool abandoned = false;
  for (const auto& e : run.transcript.events)
    if (e.kind == TranscriptEventKind::note &&
        e.text.find("subproof of HL_n abandoned") != std::string::npos)
      abandoned = true;
  CHECK(abandoned);
  // the assert vanishes from the final proof
  CHECK(run.transcript.final_script->find("assert") == std::string::npos);
}

TEST_CASE("an ill-typed assertion marks the refined lemma conflicted") {
  MockScript script;
  MockRule rule;
  rule.sentence = "assert (HL_b' : False).";
  rule.action = "reject";
  rule.message = "The term \"HL_b'\" has type \"False\" which is ill-typed.";
  script.rules.push_back(rule);
  auto factory = [script] { return std::make_unique<MockBackend>(script); };

  OfflineBundle bundle = bundle_with({checked("HL_b", "True")});
  Rig rig({ScriptedChat::tool("refine HL_b"),
           ScriptedChat::text("```coq\nLemma HL_b' : False.\nProof.\nauto.\n"
                              "Qed.\n```"),
           ScriptedChat::text("exact I.")});
  auto run = run_agent(trivial_task(), bundle, rig.llm, factory);

  CHECK(run.transcript.outcome == ProofOutcome::proved);
  CHECK(run.online_lemmas.empty());
  // the next prompt shows the base lemma as conflicted
  REQUIRE(rig.chat->requests.size() == 3);
  const std::string& user = rig.chat->requests[2].messages[1].content;
  CHECK(user.find("Lemma HL_b : True. Proof...Qed. (* conflict *)") !=
        std::string::npos);
}

TEST_CASE("history lemmas from earlier tasks enter library and artifact") {
  HelperLemma hist = checked("HL_h", "True");
  Rig rig({ScriptedChat::text("apply HL_h.")});
  auto run = run_agent(trivial_task(), {}, rig.llm, mock_factory(), {}, {},
                       {hist});

  CHECK(run.transcript.outcome == ProofOutcome::proved);
  CHECK(run.used_lemma_names == std::set<std::string>{"HL_h"});
  const std::string& file = *run.transcript.final_script;
  CHECK(file.find("Lemma HL_h : True.") != std::string::npos);
  bool history_added = false;
  for (const auto& e : run.transcript.events)
    if (e.kind == TranscriptEventKind::lemma_added &&
        e.detail == std::string("history"))
      history_added = true;
  CHECK(history_added);
}

TEST_CASE("budget defaults match the configured limits") {
  Budget budget;
  CHECK(budget.max_steps == 100);
  CHECK(budget.max_wall_clock == std::chrono::milliseconds(600000));
  AgentFlags flags;
  CHECK(flags.subproof_budget == 15);
  CHECK(flags.sentence_timeout == std::chrono::milliseconds(30000));
}

TEST_CASE("a bad goal file aborts with a note instead of throwing") {
  VerificationTask task = trivial_task();
  task.goal_file = "Require Import ZArith.\n";  // no goal at all
  Rig rig({ScriptedChat::text("exact I.")});
  auto run = run_agent(task, {}, rig.llm, mock_factory());
  CHECK(run.transcript.outcome == ProofOutcome::aborted);
  CHECK(count_events(run.transcript, TranscriptEventKind::note) >= 1);
  CHECK(rig.chat->requests.empty());
}
