#include "golden_fixtures.hpp"

#include <memory>
#include <stdexcept>
#include <string>

#include "vclemma/agent/agent.hpp"
#include "vclemma/agent/library.hpp"
#include "vclemma/core/manifest.hpp"
#include "vclemma/llm/client.hpp"
#include "vclemma/llm/prompts.hpp"
#include "vclemma/offline/bundle.hpp"
#include "vclemma/prover/mock_backend.hpp"

namespace vclemma {

namespace fs = std::filesystem;

namespace {

// Restates the preserved invariant in source terms: advancing src twice by
// one byte keeps it at or past osrc. Proves clean on the mock backend.
const char kPsaReply[] =
    "The property is the preservation step of the loop invariant "
    "osrc <= src: one iteration reads two hex digits, so src advances by "
    "two bytes while osrc stays put. In source-level terms the invariant "
    "compares two addresses within one allocation.\n"
    "\n"
    "```coq\n"
    "(* Invariant preservation for hex2bin: src advances two bytes per\n"
    "   iteration and never falls behind osrc. *)\n"
    "Require Import ZArith.\n"
    "Open Scope Z_scope.\n"
    "\n"
    "Definition addr : Type := (Z * Z)%type.\n"
    "Definition base (a : addr) : Z := fst a.\n"
    "Definition offset (a : addr) : Z := snd a.\n"
    "Definition shift (a : addr) (k : Z) : addr := (base a, offset a + k).\n"
    "\n"
    "Lemma hex2bin_loop_invariant_2_semantic :\n"
    "  forall (osrc src : addr),\n"
    "  base osrc = base src ->\n"
    "  offset osrc <= offset src ->\n"
    "  base osrc = base (shift (shift src 1) 1) /\\\n"
    "  offset osrc <= offset (shift (shift src 1) 1).\n"
    "Proof.\n"
    "intros osrc src Hb Ho.\n"
    "split.\n"
    "simpl.\n"
    "congruence.\n"
    "simpl.\n"
    "lia.\n"
    "Qed.\n"
    "```\n";

const char kSynthesisReply[] =
    "The goal tracks the ghost pointer osrc against src after a two-byte "
    "advance. Two lemmas bridge the semantic statement to the generated "
    "obligation: one relates an address to its shifted form, the other "
    "transports the osrc bound across the shift.\n"
    "\n"
    "```coq\n"
    "Lemma HL1_addr_le_shift_same_base : forall (a : addr) (k : Z), "
    "0 <= k -> base a = base (shift a k) /\\ offset a <= offset (shift a k).\n"
    "Proof.\n"
    "intros a k Hk.\n"
    "split.\n"
    "reflexivity.\n"
    "simpl.\n"
    "lia.\n"
    "Qed.\n"
    "\n"
    "Lemma HL2_addr_le_same_base : forall (p q : addr), base p = base q -> "
    "offset p <= offset q -> base p = base (shift q 2) /\\ "
    "offset p <= offset (shift q 2).\n"
    "Proof.\n"
    "intros p q Hb Ho.\n"
    "assert (Hq : base q = base (shift q 2) /\\ "
    "offset q <= offset (shift q 2)).\n"
    "apply HL1_addr_le_shift_same_base.\n"
    "destruct Hq as [Hb2 Ho2].\n"
    "split.\n"
    "congruence.\n"
    "lia.\n"
    "Qed.\n"
    "```\n"
    "\n"
    "Plan:\n"
    "1. Keep HL1_addr_le_shift_same_base available for relating src to its "
    "shifted positions.\n"
    "2. After introducing hypotheses, apply HL2_addr_le_same_base to close "
    "the preserved invariant.\n";

class ScriptedChat : public ChatBackend {
 public:
  explicit ScriptedChat(std::vector<std::string> replies)
      : replies_(std::move(replies)) {}
  ChatResponse complete(const ChatRequest&) override {
    if (next_ >= replies_.size())
      throw std::runtime_error("golden script exhausted");
    ChatResponse r;
    r.text = replies_[next_++];
    r.usage.prompt_tokens = 700;
    r.usage.completion_tokens = 180;
    return r;
  }

 private:
  std::vector<std::string> replies_;
  std::size_t next_ = 0;
};

std::string snapshot_text(const ChatRequest& req) {
  std::string out;
  for (const ChatMessage& m : req.messages)
    out += "== " + m.role + " ==\n" + m.content + "\n";
  return out;
}

std::string snapshot_text(const std::vector<ChatMessage>& messages) {
  ChatRequest req;
  req.messages = messages;
  return snapshot_text(req);
}

}  // namespace

std::vector<fs::path> write_golden_fixtures(const fs::path& fixture_dir,
                                            const fs::path& out_dir) {
  VerificationTask task = load_task(fixture_dir / "hex2bin" / "task.json");

  fs::create_directories(out_dir / "cassettes");
  fs::create_directories(out_dir / "snapshots");
  const fs::path cassette = out_dir / "cassettes" / "hex2bin_golden.json";

  auto scripted = std::make_shared<ScriptedChat>(std::vector<std::string>{
      kPsaReply, kSynthesisReply, "intros.", "apply HL2_addr_le_same_base."});
  auto recorder = std::make_shared<RecordingBackend>(scripted, cassette);
  LlmClient llm(recorder, "gpt-5.2-2025-12-11");
  BackendFactory factory = [] { return std::make_unique<MockBackend>(); };

  OfflineBundle bundle = run_offline_pipeline(task, llm, factory);
  int checked = 0;
  for (const auto& lemma : bundle.lemmas)
    if (lemma.status == LemmaStatus::checked) ++checked;
  if (checked != 2 || !bundle.phi_a.has_value()) {
    std::string why = "golden offline run drifted:";
    for (const auto& note : bundle.notes) why += "\n  " + note;
    throw std::runtime_error(why);
  }

  AgentRunResult run = run_agent(task, bundle, llm, factory);
  if (run.transcript.outcome != ProofOutcome::proved)
    throw std::runtime_error("golden agent run did not prove the goal");

  const auto& log = llm.request_log();
  if (log.size() != 4)
    throw std::runtime_error("golden run issued an unexpected request count");

  write_file(out_dir / "snapshots" / "psa_prompt.txt", snapshot_text(log[0]));
  write_file(out_dir / "snapshots" / "offline_synthesis_prompt.txt",
             snapshot_text(log[1]));
  write_file(out_dir / "snapshots" / "agent_step_prompt.txt",
             snapshot_text(log[2]));

  // The golden proof never needs the adaptation tool, so its prompt is
  // rendered directly with a representative failed application and one
  // conflicted library entry.
  LemmaLibrary library;
  for (const HelperLemma& lemma : bundle.lemmas) library.add(lemma);
  library.mark_conflict("HL2_addr_le_same_base");
  ProverError error{
      "apply HL2_addr_le_same_base.",
      "Unable to unify \"offset osrc_0 <= offset src_2\" with the current "
      "goal."};
  auto messages = render_prompt(
      "online-adaptation",
      {{"applied_tactics", "Proof. intros."},
       {"open_goal",
        "base osrc_0 = base src_2 /\\ offset osrc_0 <= offset src_2"},
       {"error_feedback", format_error_feedback(error)},
       {"lemma_listing", library.listing()}});
  write_file(out_dir / "snapshots" / "online_adaptation_prompt.txt",
             snapshot_text(messages));

  return {fs::path("cassettes") / "hex2bin_golden.json",
          fs::path("snapshots") / "psa_prompt.txt",
          fs::path("snapshots") / "offline_synthesis_prompt.txt",
          fs::path("snapshots") / "agent_step_prompt.txt",
          fs::path("snapshots") / "online_adaptation_prompt.txt"};
}

}  // namespace vclemma
