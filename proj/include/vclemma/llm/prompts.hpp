#ifndef VCLEMMA_LLM_PROMPTS_HPP_
#define VCLEMMA_LLM_PROMPTS_HPP_

#include <map>
#include <string>
#include <vector>

#include "vclemma/core/types.hpp"
#include "vclemma/llm/client.hpp"

namespace vclemma {

// Template ids:
//   psa                      slots: property_name, function_name, line, file,
//                                   annotated_source
//   offline-synthesis        slots: proof_targeted_vc, semantic_vc
//   offline-synthesis-direct slots: proof_targeted_vc   (no semantic VC; used
//                                   when the analyzer stage is disabled)
//   online-adaptation        slots: applied_tactics, open_goal,
//                                   error_feedback, lemma_listing
//   agent-step               slots: open_goals, applied_tactics,
//                                   error_feedback, lemma_listing, proof_plan
//
// Rendering produces a system+user message pair with slot values embedded
// verbatim. A missing or unknown slot raises std::invalid_argument naming it.
std::vector<ChatMessage> render_prompt(
    const std::string& template_id,
    const std::map<std::string, std::string>& slot_values);

// "Tactic {t} failed because {msg}" line for the online template.
std::string format_error_feedback(const ProverError& error);

}  // namespace vclemma

#endif  // VCLEMMA_LLM_PROMPTS_HPP_
