#ifndef VCLEMMA_AGENT_AGENT_HPP_
#define VCLEMMA_AGENT_AGENT_HPP_

#include <chrono>
#include <set>
#include <string>
#include <vector>

#include "vclemma/agent/library.hpp"
#include "vclemma/core/types.hpp"
#include "vclemma/llm/client.hpp"
#include "vclemma/offline/bundle.hpp"
#include "vclemma/prover/backend.hpp"

namespace vclemma {

// Step/time limits for one proving run. One model action (a tactic sentence
// or a tool call) costs one step; the structural Proof./Qed. sentences the
// loop adds itself are free.
struct Budget {
  int max_steps = 100;
  std::chrono::milliseconds max_wall_clock{600000};
  int consumed_steps = 0;
  std::chrono::milliseconds elapsed{0};
};

struct AgentFlags {
  bool no_online = false;   // never offer the adaptation tool
  bool no_offline = false;  // ignore the bundle: empty starting library
  int subproof_budget = 15;
  std::size_t listing_cap = LemmaLibrary::kDefaultListingCap;
  std::chrono::milliseconds sentence_timeout{30000};
};

struct AgentRunResult {
  ProofTranscript transcript;
  Budget budget;  // consumed_steps / elapsed filled in
  // Lemmas proved online during this run, reusable as history for later
  // tasks in the same benchmark run.
  std::vector<HelperLemma> online_lemmas;
  // Names of library lemmas the final artifact uses; empty unless proved.
  std::set<std::string> used_lemma_names;
};

// The tactic-by-tactic proving loop: prompts the model with the open goals,
// history, annotated lemma listing and plan; executes the returned tactic
// (or routes a tool call to the lemma adapter); enforces the budget; on
// completion assembles the final file and re-certifies it from scratch. A
// proved outcome therefore always has a machine-checked artifact behind it.
AgentRunResult run_agent(const VerificationTask& task,
                         const OfflineBundle& bundle, LlmClient& llm,
                         const BackendFactory& factory, Budget budget = {},
                         AgentFlags flags = {},
                         const std::vector<HelperLemma>& history_lemmas = {});

// preamble + the used lemma blocks (dependency-closed, library order) + the
// goal statement + the accepted tactic script. Lemmas proved online live
// inside the script as assert embeddings and get no separate block.
std::string assemble_final_artifact(const ProofTargetedVC& phi_c,
                                    const LemmaLibrary& library,
                                    const std::vector<std::string>& tactic_script);

// Names used via an application-class tactic (apply, rewrite, exact and
// friends, plus assert-backed references) anywhere in the script, comments
// excluded.
std::set<std::string> detect_lemma_usage(const std::string& final_script,
                                         const std::vector<std::string>& lemma_names);

}  // namespace vclemma

#endif  // VCLEMMA_AGENT_AGENT_HPP_
