#include <memory>
#include <string>
#include <vector>

#include "doctest.h"
#include "vclemma/agent/adapter.hpp"
#include "vclemma/agent/agent.hpp"
#include "vclemma/agent/library.hpp"
#include "vclemma/prover/mock_backend.hpp"

using namespace vclemma;

namespace {

HelperLemma checked(const std::string& name, const std::string& body,
                    const std::string& tactic = "auto.",
                    std::vector<std::string> deps = {}) {
  HelperLemma lemma;
  lemma.name = name;
  lemma.statement = "Lemma " + name + " : " + body + ".";
  lemma.proof = "Proof.\n" + tactic + "\nQed.";
  lemma.status = LemmaStatus::checked;
  lemma.depends_on = std::move(deps);
  return lemma;
}

class CannedChat : public ChatBackend {
 public:
  explicit CannedChat(std::string text) : text_(std::move(text)) {}
  ChatResponse complete(const ChatRequest& req) override {
    requests.push_back(req);
    ChatResponse r;
    r.text = text_;
    return r;
  }
  std::vector<ChatRequest> requests;

 private:
  std::string text_;
};

}  // namespace

TEST_CASE("the library keeps insertion order and renames collisions") {
  LemmaLibrary lib;
  CHECK(lib.add(checked("HL_a", "True")) == "HL_a");
  CHECK(lib.add(checked("HL_b", "True")) == "HL_b");
  CHECK(lib.add(checked("HL_a", "1 = 1")) == "HL_a_2");
  CHECK(lib.size() == 3);
  CHECK(lib.contains("HL_a_2"));
  REQUIRE(lib.find("HL_a_2") != nullptr);
  CHECK(lib.find("HL_a_2")->statement == "Lemma HL_a_2 : 1 = 1.");
  CHECK(lib.entries()[0].name == "HL_a");
  CHECK(lib.entries()[2].name == "HL_a_2");
}

TEST_CASE("the library refuses lemmas that were never certified") {
  LemmaLibrary lib;
  HelperLemma raw = checked("HL_x", "True");
  raw.status = LemmaStatus::unchecked;
  CHECK_THROWS_AS(lib.add(raw), std::invalid_argument);
  raw.status = LemmaStatus::discarded;
  CHECK_THROWS_AS(lib.add(raw), std::invalid_argument);
  CHECK(lib.size() == 0);
}

TEST_CASE("listing carries imported and conflict markers in order") {
  LemmaLibrary lib;
  lib.add(checked("HL1", "True"));
  lib.add(checked("HL2", "1 = 1"));
  lib.add(checked("HL3", "2 = 2"));
  lib.add(checked("HL4", "3 = 3"));
  lib.mark_conflict("HL3");
  lib.mark_conflict("HL4");

  std::string text = lib.listing();
  CHECK(text ==
        "Lemma HL1 : True. Proof...Qed. (* imported *)\n"
        "Lemma HL2 : 1 = 1. Proof...Qed. (* imported *)\n"
        "Lemma HL3 : 2 = 2. Proof...Qed. (* conflict *)\n"
        "Lemma HL4 : 3 = 3. Proof...Qed. (* conflict *)\n");

  lib.clear_conflict("HL3");
  CHECK(lib.listing().find("Lemma HL3 : 2 = 2. Proof...Qed. (* imported *)") !=
        std::string::npos);
}

TEST_CASE("long listings are truncated with an elision note") {
  LemmaLibrary lib;
  for (int i = 0; i < 200; ++i)
    lib.add(checked("HL_" + std::to_string(i), "True"));
  std::string text = lib.listing(50);
  int lines = 0;
  for (char c : text)
    if (c == '\n') ++lines;
  CHECK(lines == 51);  // 50 entries + the note
  CHECK(text.find("(* 150 further lemmas elided *)") != std::string::npos);
  CHECK(text.find("HL_49") != std::string::npos);
  CHECK(text.find("HL_50 ") == std::string::npos);
}

TEST_CASE("usage log records name and script position") {
  LemmaLibrary lib;
  lib.add(checked("HL_a", "True"));
  lib.log_usage("HL_a", 4);
  lib.log_usage("HL_a", 9);
  REQUIRE(lib.usage_log().size() == 2);
  CHECK(lib.usage_log()[1] == std::pair<std::string, int>("HL_a", 9));
}

TEST_CASE("assert sentences from lemma statements") {
  CHECK(assert_sentence_for("Lemma HL : x <= y.") == "assert (HL : x <= y).");
  CHECK(assert_sentence_for("Lemma HL' (a : Z) : P a.") ==
        "assert (HL' : forall (a : Z), P a).");
  CHECK(assert_sentence_for("Lemma HL2 (a b : Z) (H : a < b) : a <= b.") ==
        "assert (HL2 : forall (a b : Z) (H : a < b), a <= b).");
  // ":=" inside the body is not a binder separator
  CHECK(assert_sentence_for("Lemma HL : let x := 3 in x = 3.") ==
        "assert (HL : let x := 3 in x = 3).");
  CHECK(assert_sentence_for("nonsense") == "");
}

TEST_CASE("adaptation replies are classified by strategy") {
  std::vector<std::string> names = {"HL1_base", "HL2_scale"};
  AdaptationRequest request;
  request.proof_state.applied_tactics = {"Proof.", "intros."};
  request.proof_state.open_goals = {"x <= y"};
  request.proof_state.last_error =
      ProverError{"apply HL2_scale.", "term HL2_scale has the wrong type"};
  request.library_view = "Lemma HL1_base : True. Proof...Qed. (* imported *)\n";

  SUBCASE("a lemma block with a primed library name is a refinement") {
    auto chat = std::make_shared<CannedChat>(
        "Here is the refined lemma:\n```coq\nLemma HL2_scale' : x <= y.\n"
        "Proof.\nlia.\nQed.\n```\n");
    LlmClient llm(chat, "m");
    AdaptationResult r = adapt_lemma(request, llm, names);
    CHECK(r.kind == AdaptationKind::refined);
    REQUIRE(r.lemma.has_value());
    CHECK(r.lemma->name == "HL2_scale'");
    CHECK(r.lemma->provenance == LemmaProvenance::online_refined);
    REQUIRE(r.insertion.has_value());
    CHECK(*r.insertion == "assert (HL2_scale' : x <= y).");

    // the rendered prompt carries the three numbered state lines
    const std::string& user = chat->requests[0].messages[1].content;
    CHECK(user.find("1. Applied tactics: Proof. intros.") != std::string::npos);
    CHECK(user.find("2. Open goal: x <= y") != std::string::npos);
    CHECK(user.find("3. Error feedback: Tactic apply HL2_scale. failed "
                    "because term HL2_scale has the wrong type") !=
          std::string::npos);
    CHECK(user.find("(* imported *)") != std::string::npos);
  }

  SUBCASE("a lemma block with a fresh name is a new lemma") {
    auto chat = std::make_shared<CannedChat>(
        "```coq\nLemma HL_extra (n : Z) : n = n.\nProof.\nreflexivity.\n"
        "Qed.\n```\n");
    LlmClient llm(chat, "m");
    AdaptationResult r = adapt_lemma(request, llm, names);
    CHECK(r.kind == AdaptationKind::new_lemma);
    CHECK(r.lemma->provenance == LemmaProvenance::online_new);
    CHECK(*r.insertion == "assert (HL_extra : forall (n : Z), n = n).");
  }

  SUBCASE("naming an existing lemma without a block applies it") {
    auto chat = std::make_shared<CannedChat>(
        "HL1_base already fits this goal, apply it directly.");
    LlmClient llm(chat, "m");
    AdaptationResult r = adapt_lemma(request, llm, names);
    CHECK(r.kind == AdaptationKind::apply_existing);
    CHECK(r.existing_name == "HL1_base");
    CHECK_FALSE(r.lemma.has_value());
  }

  SUBCASE("an unusable reply adapts nothing") {
    auto chat = std::make_shared<CannedChat>("I cannot help with this state.");
    LlmClient llm(chat, "m");
    AdaptationResult r = adapt_lemma(request, llm, names);
    CHECK(r.kind == AdaptationKind::none);
  }

  SUBCASE("an unfenced lemma block is still recognized") {
    auto chat = std::make_shared<CannedChat>(
        "Here is the refined lemma: Lemma HL2_scale' : x <= y. Proof. lia. "
        "Qed.");
    LlmClient llm(chat, "m");
    AdaptationResult r = adapt_lemma(request, llm, names);
    CHECK(r.kind == AdaptationKind::refined);
  }
}

TEST_CASE("insert_refinement demands a lemma-bearing result") {
  ProverSession session([] { return std::make_unique<MockBackend>(); });
  AdaptationResult none;
  CHECK_THROWS_AS(insert_refinement(session, none), std::invalid_argument);
  AdaptationResult applied;
  applied.kind = AdaptationKind::apply_existing;
  applied.existing_name = "HL1";
  CHECK_THROWS_AS(insert_refinement(session, applied), std::invalid_argument);
}

TEST_CASE("lemma usage detection looks at application arguments only") {
  std::vector<std::string> names = {"HL1", "HL2", "HL3"};
  std::string script =
      "intros n.\n"
      "(* HL3 would also work here *)\n"
      "apply HL1.\n"
      "rewrite HL2 in H.\n"
      "assert (Hx : HL1 = HL1).\n";
  auto used = detect_lemma_usage(script, names);
  CHECK(used == std::set<std::string>{"HL1", "HL2"});

  CHECK(detect_lemma_usage("", names).empty());
  // statement position is not usage
  CHECK(detect_lemma_usage("Lemma HL1 : True.", names).empty());
}

TEST_CASE("final artifacts keep only used lemma blocks, dependencies included") {
  LemmaLibrary lib;
  lib.add(checked("HL_dep", "True"));
  lib.add(checked("HL_used", "1 = 1", "apply HL_dep.", {"HL_dep"}));
  lib.add(checked("HL_unused", "2 = 2"));
  HelperLemma online = checked("HL_online", "3 = 3");
  online.provenance = LemmaProvenance::online_new;
  lib.add(online);

  ProofTargetedVC phi_c;
  phi_c.preamble_text = "Require Import ZArith.\n";
  phi_c.statement_text = "Lemma goal_g : True.";

  std::vector<std::string> script = {"assert (HL_online : 3 = 3).", "auto.",
                                     "apply HL_used."};
  std::string file = assemble_final_artifact(phi_c, lib, script);

  CHECK(file.find("Require Import ZArith.") != std::string::npos);
  CHECK(file.find("Lemma HL_used : 1 = 1.") != std::string::npos);
  CHECK(file.find("Lemma HL_dep : True.") != std::string::npos);
  CHECK(file.find("HL_unused") == std::string::npos);
  // online lemmas stay assert-embedded, no block
  CHECK(file.find("Lemma HL_online") == std::string::npos);
  CHECK(file.find("assert (HL_online : 3 = 3).") != std::string::npos);
  // dependency block precedes its dependent
  CHECK(file.find("Lemma HL_dep : True.") < file.find("Lemma HL_used : 1 = 1."));
  CHECK(file.find("Lemma goal_g : True.\nProof.\n") != std::string::npos);
  CHECK(file.rfind("Qed.\n") == file.size() - 5);

  // an empty script yields a helper-free file
  std::string bare = assemble_final_artifact(phi_c, lib, {"auto."});
  CHECK(bare.find("Lemma HL_") == std::string::npos);
}
