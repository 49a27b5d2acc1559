#include <chrono>
#include <string>
#include <vector>

#include "doctest.h"
#include "vclemma/core/manifest.hpp"
#include "vclemma/core/text.hpp"
#include "vclemma/prover/mock_backend.hpp"

using namespace vclemma;
using namespace std::chrono_literals;

namespace {
const std::string kFixtures = VCLEMMA_FIXTURE_DIR;
constexpr std::chrono::milliseconds kT{30000};

ExecResult run(MockBackend& b, const std::string& s) { return b.execute(s, kT); }

void expect_ok(MockBackend& b, const std::string& s) {
  auto r = run(b, s);
  INFO("sentence: ", s, " message: ", r.message);
  REQUIRE(r.accepted);
}
}  // namespace

TEST_CASE("vernacular registers names and opens proofs") {
  MockBackend b;
  expect_ok(b, "Require Import ZArith.");
  expect_ok(b, "Open Scope Z_scope.");
  expect_ok(b, "Definition double (z : Z) : Z := z + z.");
  CHECK(b.knows("double"));

  auto r = run(b, "Lemma double_even : forall z : Z, double z = z + z.");
  REQUIRE(r.accepted);
  REQUIRE(r.goals.size() == 1);
  CHECK(r.goals[0] == "forall z : Z, double z = z + z");
  CHECK_FALSE(b.knows("double_even"));  // not before Qed

  expect_ok(b, "Proof.");
  expect_ok(b, "intros z.");
  CHECK(b.current_goals()[0] == "double z = z + z");

  auto bad_qed = run(b, "Qed.");
  CHECK_FALSE(bad_qed.accepted);  // goal still open
  CHECK(bad_qed.message.find("incomplete") != std::string::npos);

  expect_ok(b, "reflexivity.");
  expect_ok(b, "Qed.");
  CHECK(b.knows("double_even"));
  CHECK(b.current_goals().empty());
}

TEST_CASE("binders before the colon become a forall goal") {
  MockBackend b;
  auto r = run(b, "Lemma inc_pos (n : nat) : 0 <= n.");
  REQUIRE(r.accepted);
  CHECK(r.goals[0] == "forall (n : nat), 0 <= n");
}

TEST_CASE("intros strips foralls, lets and arrows but not equivalences") {
  MockBackend b;
  run(b, "Lemma l : forall (a b : Z), let c := a + b in a <= b -> (a <= c <-> b = b) -> a <= c.");
  run(b, "Proof.");
  auto r = run(b, "intros.");
  REQUIRE(r.accepted);
  CHECK(r.goals[0] == "a <= c");

  MockBackend b2;
  run(b2, "Lemma m : x <-> y.");
  run(b2, "Proof.");
  auto r2 = run(b2, "intros.");
  CHECK(r2.goals[0] == "x <-> y");  // "<->" is not an implication
}

TEST_CASE("split divides the first top-level conjunction") {
  MockBackend b;
  run(b, "Lemma s : (A /\\ B) -> A /\\ B /\\ C.");
  run(b, "Proof.");
  run(b, "intros H.");
  auto r = run(b, "split.");
  REQUIRE(r.accepted);
  REQUIRE(r.goals.size() == 2);
  CHECK(r.goals[0] == "A");
  CHECK(r.goals[1] == "B /\\ C");

  MockBackend b2;
  run(b2, "Lemma t : A -> A.");
  run(b2, "Proof.");
  run(b2, "intros H.");
  auto r2 = run(b2, "split.");
  CHECK_FALSE(r2.accepted);
}

TEST_CASE("apply and rewrite demand a known reference") {
  MockBackend b;
  run(b, "Lemma known_one : P.");
  run(b, "Proof.");
  run(b, "auto.");
  run(b, "Qed.");

  run(b, "Lemma uses : Q.");
  run(b, "Proof.");
  auto miss = run(b, "apply totally_absent.");
  CHECK_FALSE(miss.accepted);
  CHECK(miss.message ==
        "The reference totally_absent was not found in the current environment.");
  auto rw_miss = run(b, "rewrite ghost_eq.");
  CHECK_FALSE(rw_miss.accepted);

  auto rw = run(b, "rewrite known_one.");
  CHECK(rw.accepted);
  CHECK(rw.goals.size() == 1);  // rewrite keeps the goal open

  auto hit = run(b, "apply known_one.");
  CHECK(hit.accepted);
  CHECK(hit.goals.empty());
}

TEST_CASE("assert pushes a subgoal and names it once discharged") {
  MockBackend b;
  run(b, "Lemma a : G.");
  run(b, "Proof.");
  auto r = run(b, "assert (H9 : 0 <= 2).");
  REQUIRE(r.accepted);
  REQUIRE(r.goals.size() == 2);
  CHECK(r.goals[0] == "0 <= 2");
  CHECK_FALSE(b.knows("H9"));

  run(b, "lia.");
  CHECK(b.knows("H9"));
  CHECK(b.current_goals().size() == 1);

  auto d = run(b, "destruct H9 as [Hl Hr].");
  CHECK(d.accepted);
  CHECK(b.knows("Hl"));
  CHECK(b.knows("Hr"));

  auto by = run(b, "assert (H10 : 1 <= 1) by lia.");
  CHECK(by.accepted);
  CHECK(by.goals.size() == 1);
  CHECK(b.knows("H10"));
}

TEST_CASE("tactics outside proofs and unknown tactics are rejected") {
  MockBackend b;
  auto r = run(b, "auto.");
  CHECK_FALSE(r.accepted);
  run(b, "Lemma l : True.");
  run(b, "Proof.");
  auto zap = run(b, "zap.");
  CHECK_FALSE(zap.accepted);
  CHECK(zap.message.find("zap") != std::string::npos);
  run(b, "auto.");
  auto extra = run(b, "auto.");
  CHECK_FALSE(extra.accepted);  // no goal left
  run(b, "Qed.");
  CHECK(b.knows("l"));
}

TEST_CASE("Admitted and Abort close the proof differently") {
  MockBackend b;
  run(b, "Lemma gives_up : False.");
  run(b, "Proof.");
  expect_ok(b, "Admitted.");
  CHECK(b.knows("gives_up"));

  run(b, "Lemma walks_away : False.");
  run(b, "Proof.");
  expect_ok(b, "Abort.");
  CHECK_FALSE(b.knows("walks_away"));
}

TEST_CASE("script rules override in the documented order") {
  MockScript script = MockScript::parse(R"({
    "schema": "vclemma.mockscript", "version": 1,
    "rules": [
      {"sentence": "lia.", "goal": "impossible", "action": "reject",
       "message": "lia cannot solve this"},
      {"sentence": "magic_solve.", "action": "close_goal"},
      {"sentence": "expand.", "action": "replace_goals",
       "goals": ["left part", "right part"]},
      {"sentence": "bless.", "action": "accept", "message": "ok"}
    ]
  })");
  MockBackend b(script);
  run(b, "Lemma l : impossible.");
  run(b, "Proof.");
  auto r = run(b, "lia.");
  CHECK_FALSE(r.accepted);  // reject rule wins over the automation built-in
  CHECK(r.message == "lia cannot solve this");

  auto e = run(b, "expand.");
  REQUIRE(e.accepted);
  REQUIRE(e.goals.size() == 2);
  CHECK(e.goals[0] == "left part");

  auto m = run(b, "magic_solve.");
  CHECK(m.accepted);
  CHECK(m.goals.size() == 1);

  auto bl = run(b, "bless.");
  CHECK(bl.accepted);
  CHECK(bl.goals.size() == 1);  // accept is a no-op on goals

  // the goal-conditioned reject no longer matches on a different goal
  auto lia2 = run(b, "lia.");
  CHECK(lia2.accepted);
  CHECK(lia2.goals.empty());
}

TEST_CASE("scripted delays respect the sentence timeout") {
  MockScript script = MockScript::parse(R"({
    "schema": "vclemma.mockscript", "version": 1,
    "sentence_delay_ms": 0,
    "rules": [ {"sentence": "slow_tactic.", "action": "close_goal", "delay_ms": 200} ]
  })");
  MockBackend b(script);
  run(b, "Lemma l : G.");
  run(b, "Proof.");
  auto before_state = b.current_state();
  auto t0 = std::chrono::steady_clock::now();
  auto r = b.execute("slow_tactic.", 50ms);
  auto elapsed = std::chrono::steady_clock::now() - t0;
  CHECK_FALSE(r.accepted);
  CHECK(r.message == "Timeout!");
  CHECK(b.current_state() == before_state);
  CHECK(elapsed >= 45ms);
  CHECK(elapsed < 150ms);

  auto ok = b.execute("slow_tactic.", 1000ms);
  CHECK(ok.accepted);
}

TEST_CASE("native rollback restores every part of the state") {
  MockBackend b;
  run(b, "Require Import ZArith.");
  auto mark = b.current_state();
  run(b, "Definition later := 0.");
  run(b, "Lemma l : True.");
  CHECK(b.knows("later"));
  REQUIRE(b.rollback_to(mark));
  CHECK_FALSE(b.knows("later"));
  CHECK(b.current_goals().empty());
  CHECK(b.current_state() == mark);
  CHECK_FALSE(b.rollback_to(9999));
}

TEST_CASE("the bundled goal file replays end to end with helper lemmas") {
  MockBackend b;
  std::string goal_text = read_file(kFixtures + "/hex2bin/goal.v");
  auto vc = parse_goal_file(goal_text);
  for (const auto& s : split_sentences(vc.preamble_text)) expect_ok(b, s.text);

  // first helper: shifting by a non-negative offset keeps base and order
  expect_ok(b,
            "Lemma HL1_addr_le_shift_same_base : forall (a : addr) (k : Z), "
            "0 <= k -> base a = base (shift a k) /\\ offset a <= offset (shift a k).");
  expect_ok(b, "Proof.");
  expect_ok(b, "intros a k Hk.");
  expect_ok(b, "split.");
  expect_ok(b, "reflexivity.");
  expect_ok(b, "simpl.");
  expect_ok(b, "lia.");
  expect_ok(b, "Qed.");
  CHECK(b.knows("HL1_addr_le_shift_same_base"));

  // second helper: transport the bound across a two-byte shift
  expect_ok(b,
            "Lemma HL2_addr_le_same_base : forall (p q : addr), base p = base q -> "
            "offset p <= offset q -> base p = base (shift q 2) /\\ "
            "offset p <= offset (shift q 2).");
  expect_ok(b, "Proof.");
  expect_ok(b, "intros p q Hb Ho.");
  expect_ok(b,
            "assert (Hq : base q = base (shift q 2) /\\ "
            "offset q <= offset (shift q 2)).");
  expect_ok(b, "apply HL1_addr_le_shift_same_base.");
  expect_ok(b, "destruct Hq as [Hb2 Ho2].");
  expect_ok(b, "split.");
  expect_ok(b, "congruence.");
  expect_ok(b, "lia.");
  expect_ok(b, "Qed.");
  CHECK(b.knows("HL2_addr_le_same_base"));

  // the target obligation itself
  expect_ok(b, vc.statement_text);
  expect_ok(b, "Proof.");
  expect_ok(b, "intros.");
  CHECK(b.current_goals().size() == 1);
  CHECK(b.current_goals()[0] ==
        "base osrc_0 = base src_2 /\\ offset osrc_0 <= offset src_2");
  expect_ok(b, "apply HL2_addr_le_same_base.");
  CHECK(b.current_goals().empty());
  expect_ok(b, "Qed.");
  CHECK(b.knows("wp_goal_hex2bin_loop_invariant_2_preserved"));
}
