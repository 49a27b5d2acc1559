#include "vclemma/llm/prompts.hpp"

#include <stdexcept>

namespace vclemma {

namespace {

struct TemplateDef {
  std::string system_text;
  std::string user_text;  // with {slot} placeholders
  std::vector<std::string> slots;
};

const std::map<std::string, TemplateDef>& templates() {
  static const std::map<std::string, TemplateDef> kTemplates = {
      {"psa",
       {"You are an expert in the Coq proof assistant and deductive program "
        "verification. Reply with exactly one complete Coq file inside a "
        "```coq code fence. The file must be self-contained and every lemma "
        "in it must be fully proved.",
        "Your task is to analyze the annotated source code with ACSL "
        "annotations and write a complete Coq file that intuitively proves "
        "what the annotation states. Focus only on the highlighted property "
        "to prove.\n"
        "\n"
        "Available context:\n"
        "- Property name: {property_name}\n"
        "- Location: function {function_name} at line {line} of file {file}\n"
        "- Annotated source code:\n"
        "\n"
        "{annotated_source}",
        {"property_name", "function_name", "line", "file", "annotated_source"}}},
      {"offline-synthesis",
       {"You are an expert in the Coq proof assistant and deductive program "
        "verification. Put all Coq code inside a single ```coq code fence and "
        "finish with a numbered plan under a line starting with \"Plan:\".",
        "Analyze an equivalent goal that has been directly discharged from "
        "Frama-C using the same code and annotations:\n"
        "\n"
        "{proof_targeted_vc}\n"
        "\n"
        "Based on the previously proved lemma:\n"
        "\n"
        "{semantic_vc}\n"
        "\n"
        "propose strong enough helper lemmas to help prove the goal. Note "
        "that you do not need to prove the goal itself.\n"
        "\n"
        "Important guidelines:\n"
        "1. For each helper lemma proposed, provide its proof.\n"
        "2. Helper lemmas can be very specific to the goal (e.g., you may use "
        "specific constants).\n"
        "3. Describe a step-by-step plan detailing where each helper lemma "
        "can be applied.",
        {"proof_targeted_vc", "semantic_vc"}}},
      {"offline-synthesis-direct",
       {"You are an expert in the Coq proof assistant and deductive program "
        "verification. Put all Coq code inside a single ```coq code fence and "
        "finish with a numbered plan under a line starting with \"Plan:\".",
        "Analyze a goal that has been directly discharged from Frama-C:\n"
        "\n"
        "{proof_targeted_vc}\n"
        "\n"
        "propose strong enough helper lemmas to help prove the goal. Note "
        "that you do not need to prove the goal itself.\n"
        "\n"
        "Important guidelines:\n"
        "1. For each helper lemma proposed, provide its proof.\n"
        "2. Helper lemmas can be very specific to the goal (e.g., you may use "
        "specific constants).\n"
        "3. Describe a step-by-step plan detailing where each helper lemma "
        "can be applied.",
        {"proof_targeted_vc"}}},
      {"agent-step",
       {"You are an expert Coq prover working inside an interactive proof "
        "session. Reply with exactly one Coq tactic sentence ending in a "
        "period, or call the available tool when a helper lemma needs "
        "adaptation. Never use Admitted, Abort or new axioms.",
        "Prove the pending goal.\n"
        "\n"
        "Open goals:\n"
        "{open_goals}\n"
        "\n"
        "Applied tactics: {applied_tactics}\n"
        "\n"
        "Error feedback: {error_feedback}\n"
        "\n"
        "Helper lemmas:\n"
        "{lemma_listing}\n"
        "\n"
        "Proof plan:\n"
        "{proof_plan}",
        {"open_goals", "applied_tactics", "error_feedback", "lemma_listing",
         "proof_plan"}}},
      {"online-adaptation",
       {"You are an expert Coq prover working inside an interactive proof "
        "session. Reply either with the name of an existing helper lemma to "
        "apply, or with a complete lemma block (statement and proof) inside "
        "a ```coq code fence.",
        "Here is the current proof state:\n"
        "1. Applied tactics: {applied_tactics}\n"
        "2. Open goal: {open_goal}\n"
        "3. Error feedback: {error_feedback}\n"
        "\n"
        "Here is a list of helper lemmas. If a critical lemma exists but is "
        "not applicable, propose a refined version with corrected types:\n"
        "\n"
        "{lemma_listing}",
        {"applied_tactics", "open_goal", "error_feedback", "lemma_listing"}}},
  };
  return kTemplates;
}

std::string fill(const std::string& text,
                 const std::map<std::string, std::string>& values,
                 const std::vector<std::string>& slots,
                 const std::string& template_id) {
  for (const auto& [key, _] : values) {
    bool known = false;
    for (const auto& s : slots)
      if (s == key) known = true;
    if (!known)
      throw std::invalid_argument("template " + template_id +
                                  " has no slot named '" + key + "'");
  }
  std::string out = text;
  for (const auto& slot : slots) {
    auto it = values.find(slot);
    if (it == values.end() || it->second.empty())
      throw std::invalid_argument("template " + template_id +
                                  " is missing slot '" + slot + "'");
    const std::string marker = "{" + slot + "}";
    std::size_t pos;
    while ((pos = out.find(marker)) != std::string::npos)
      out.replace(pos, marker.size(), it->second);
  }
  return out;
}

}  // namespace

std::vector<ChatMessage> render_prompt(
    const std::string& template_id,
    const std::map<std::string, std::string>& slot_values) {
  auto it = templates().find(template_id);
  if (it == templates().end())
    throw std::invalid_argument("unknown prompt template: " + template_id);
  const TemplateDef& def = it->second;
  return {{"system", def.system_text},
          {"user", fill(def.user_text, slot_values, def.slots, template_id)}};
}

std::string format_error_feedback(const ProverError& error) {
  if (error.failed_tactic.empty() && error.message.empty()) return "none";
  return "Tactic " + error.failed_tactic + " failed because " + error.message;
}

}  // namespace vclemma
