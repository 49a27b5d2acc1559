#ifndef VCLEMMA_AGENT_ADAPTER_HPP_
#define VCLEMMA_AGENT_ADAPTER_HPP_

#include <optional>
#include <string>
#include <vector>

#include "vclemma/core/types.hpp"
#include "vclemma/llm/client.hpp"
#include "vclemma/prover/session.hpp"

namespace vclemma {

struct AdaptationRequest {
  ProofState proof_state;
  std::string library_view;  // annotated listing shown to the model
};

enum class AdaptationKind { apply_existing, refined, new_lemma, none };

const char* to_string(AdaptationKind k);

// kind=refined / new_lemma carry a lemma draft plus the assert sentence that
// embeds it into the live proof; apply_existing carries only a name.
struct AdaptationResult {
  AdaptationKind kind = AdaptationKind::none;
  std::optional<HelperLemma> lemma;
  std::optional<std::string> insertion;
  std::string existing_name;
};

// The function the model may call to reach the adapter.
ToolDescriptor adaptation_tool_descriptor();

// Renders the adaptation prompt from the proof state and library view, asks
// the model, and classifies the reply: naming a known lemma means
// apply_existing; a lemma block means refined when its name (primes
// stripped) is already in the library and new_lemma otherwise. Replies that
// fit no strategy yield kind=none.
AdaptationResult adapt_lemma(const AdaptationRequest& request, LlmClient& llm,
                             const std::vector<std::string>& library_names);

// "forall"-closed assert sentence embedding a lemma statement, e.g.
// "assert (HL : forall a : Z, P a)." for "Lemma HL (a : Z) : P a.".
// Empty when the statement has no recognizable body.
std::string assert_sentence_for(const std::string& statement);

// Executes the result's assert sentence in the live proof. On acceptance the
// prover's first open goal is the lemma's subproof obligation. Throws
// std::invalid_argument unless kind is refined or new_lemma.
ExecResult insert_refinement(ProverSession& session,
                             const AdaptationResult& result);

}  // namespace vclemma

#endif  // VCLEMMA_AGENT_ADAPTER_HPP_
