#ifndef VCLEMMA_OFFLINE_SYNTHESIZER_HPP_
#define VCLEMMA_OFFLINE_SYNTHESIZER_HPP_

#include <chrono>
#include <optional>
#include <string>
#include <vector>

#include "vclemma/core/types.hpp"
#include "vclemma/llm/client.hpp"
#include "vclemma/offline/slicer.hpp"
#include "vclemma/prover/backend.hpp"

namespace vclemma {

// Content of the first ``` code fence in a reply (any language tag), or ""
// when the reply has none.
std::string extract_code_fence(const std::string& reply);

struct PsaOutcome {
  std::optional<SemanticsAwareVC> vc;  // set only when a file certified
  int attempts = 0;
  std::vector<std::string> notes;  // one failure summary per failed attempt
};

// Asks the model for a self-contained prover file restating the property in
// source-level terms, then certifies it. Failed attempts are retried with
// the certification error fed back, up to max_attempts in total.
PsaOutcome run_psa(const VerificationTask& task, const SliceResult& slice,
                   LlmClient& llm, const BackendFactory& prover_factory,
                   int max_attempts = 3,
                   std::chrono::milliseconds sentence_timeout =
                       std::chrono::milliseconds(30000));

struct SynthesisResult {
  std::vector<HelperLemma> drafts;
  ProofPlan plan;
  std::vector<std::string> warnings;
  std::string raw_reply;  // archived verbatim when nothing could be parsed
};

// Requests helper lemmas bridging the stated goal and the semantic
// restatement (when available; without one the direct prompt variant is
// used). The reply's code fence is split into lemma drafts; the "Plan:"
// section becomes the proof plan. Plan steps naming no known draft are
// dropped with a warning.
SynthesisResult synthesize_helper_lemmas(
    const std::optional<SemanticsAwareVC>& phi_a, const ProofTargetedVC& phi_c,
    LlmClient& llm);

struct PruneResult {
  std::vector<HelperLemma> lemmas;  // every draft, status checked/discarded
  std::vector<std::string> diagnostics;
};

// Certifies drafts in dependency order inside one session seeded with the
// goal preamble. A draft is discarded when its proof fails, admits the goal,
// declares assumptions, or depends (transitively) on a discarded draft;
// dependents of a failure are discarded without being run. Cycles discard
// all their members.
PruneResult prune_failed_lemmas(std::vector<HelperLemma> drafts,
                                const std::string& preamble,
                                const BackendFactory& factory,
                                std::chrono::milliseconds sentence_timeout =
                                    std::chrono::milliseconds(30000));

}  // namespace vclemma

#endif  // VCLEMMA_OFFLINE_SYNTHESIZER_HPP_
