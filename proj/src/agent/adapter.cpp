#include "vclemma/agent/adapter.hpp"

#include <stdexcept>

#include "vclemma/core/text.hpp"
#include "vclemma/llm/prompts.hpp"

namespace vclemma {

namespace {

// Position of the first ':' outside brackets, comments and strings, past
// `from`; npos when there is none.
std::size_t top_level_colon(const std::string& text, std::size_t from) {
  int depth = 0;
  for (std::size_t i = from; i < text.size(); ++i) {
    char c = text[i];
    if (c == '(' && i + 1 < text.size() && text[i + 1] == '*') {
      int nest = 1;
      i += 2;
      while (i + 1 < text.size() && nest > 0) {
        if (text[i] == '(' && text[i + 1] == '*') { ++nest; i += 2; continue; }
        if (text[i] == '*' && text[i + 1] == ')') { --nest; i += 2; continue; }
        ++i;
      }
      --i;
      continue;
    }
    if (c == '"') {
      ++i;
      while (i < text.size()) {
        if (text[i] == '"') {
          if (i + 1 < text.size() && text[i + 1] == '"') { i += 2; continue; }
          break;
        }
        ++i;
      }
      continue;
    }
    if (c == '(' || c == '[' || c == '{') ++depth;
    if (c == ')' || c == ']' || c == '}') --depth;
    if (c == ':' && depth == 0) {
      // not part of ":=" or "::"
      if (i + 1 < text.size() && (text[i + 1] == '=' || text[i + 1] == ':')) {
        ++i;
        continue;
      }
      return i;
    }
  }
  return std::string::npos;
}

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string strip_primes(const std::string& name) {
  std::size_t e = name.size();
  while (e > 0 && name[e - 1] == '\'') --e;
  return name.substr(0, e);
}

}  // namespace

const char* to_string(AdaptationKind k) {
  switch (k) {
    case AdaptationKind::apply_existing: return "apply-existing";
    case AdaptationKind::refined: return "refined";
    case AdaptationKind::new_lemma: return "new-lemma";
    case AdaptationKind::none: return "none";
  }
  return "none";
}

ToolDescriptor adaptation_tool_descriptor() {
  ToolDescriptor tool;
  tool.name = "adapt_lemma";
  tool.description =
      "Adapt the helper lemma corpus to the current proof state: refine an "
      "inapplicable lemma, propose a new one, or point at an existing lemma "
      "that applies.";
  tool.parameters = {
      {"type", "object"},
      {"properties",
       {{"reason",
         {{"type", "string"},
          {"description", "what blocks the proof and what kind of lemma "
                          "would unblock it"}}}}},
      {"required", nlohmann::json::array()}};
  return tool;
}

std::string assert_sentence_for(const std::string& statement) {
  const std::string name = declared_name(statement);
  if (name.empty()) return "";
  std::size_t at = statement.find(name);
  if (at == std::string::npos) return "";
  std::size_t after = at + name.size();
  std::size_t colon = top_level_colon(statement, after);
  if (colon == std::string::npos) return "";
  std::string binders = trim(statement.substr(after, colon - after));
  std::string body = trim(statement.substr(colon + 1));
  if (!body.empty() && body.back() == '.') body = trim(body.substr(0, body.size() - 1));
  if (body.empty()) return "";
  if (!binders.empty()) body = "forall " + binders + ", " + body;
  return "assert (" + name + " : " + body + ").";
}

AdaptationResult adapt_lemma(const AdaptationRequest& request, LlmClient& llm,
                             const std::vector<std::string>& library_names) {
  std::string applied;
  for (const auto& t : request.proof_state.applied_tactics)
    applied += (applied.empty() ? "" : " ") + t;
  std::string goal = request.proof_state.open_goals.empty()
                         ? std::string("(none)")
                         : request.proof_state.open_goals.front();
  std::string feedback =
      request.proof_state.last_error
          ? format_error_feedback(*request.proof_state.last_error)
          : std::string("none");

  auto messages = render_prompt(
      "online-adaptation",
      {{"applied_tactics", applied.empty() ? "(none)" : applied},
       {"open_goal", goal},
       {"error_feedback", feedback},
       {"lemma_listing",
        request.library_view.empty() ? "(empty)" : request.library_view}});

  ChatResponse reply = llm.chat(messages, LlmClient::Phase::agent);

  AdaptationResult result;

  std::size_t fence_open = reply.text.find("```");
  std::string code;
  if (fence_open != std::string::npos) {
    std::size_t content = reply.text.find('\n', fence_open);
    if (content != std::string::npos) {
      std::size_t close = reply.text.find("```", content + 1);
      code = close == std::string::npos
                 ? reply.text.substr(content + 1)
                 : reply.text.substr(content + 1, close - content - 1);
    }
  } else if (reply.text.find("Lemma ") != std::string::npos) {
    code = reply.text.substr(reply.text.find("Lemma "));
  }

  std::vector<HelperLemma> blocks;
  if (!code.empty()) {
    try {
      blocks = extract_lemma_blocks(code);
    } catch (const TextParseError&) {
      blocks.clear();
    }
  }

  if (!blocks.empty()) {
    HelperLemma draft = blocks.front();
    std::string insertion = assert_sentence_for(draft.statement);
    if (!insertion.empty()) {
      bool known = false;
      const std::string base = strip_primes(draft.name);
      for (const auto& n : library_names)
        if (n == draft.name || n == base) known = true;
      draft.provenance = known ? LemmaProvenance::online_refined
                               : LemmaProvenance::online_new;
      draft.status = LemmaStatus::unchecked;
      result.kind = known ? AdaptationKind::refined : AdaptationKind::new_lemma;
      result.lemma = std::move(draft);
      result.insertion = std::move(insertion);
      return result;
    }
  }

  // no usable block: maybe the reply names an existing lemma to apply
  std::size_t best = std::string::npos;
  std::string best_name;
  for (const auto& n : library_names) {
    if (n.empty()) continue;
    std::size_t at = reply.text.find(n);
    if (at == std::string::npos) continue;
    if (at < best || (at == best && n.size() > best_name.size())) {
      best = at;
      best_name = n;
    }
  }
  if (!best_name.empty()) {
    result.kind = AdaptationKind::apply_existing;
    result.existing_name = best_name;
  }
  return result;
}

ExecResult insert_refinement(ProverSession& session,
                             const AdaptationResult& result) {
  if ((result.kind != AdaptationKind::refined &&
       result.kind != AdaptationKind::new_lemma) ||
      !result.insertion)
    throw std::invalid_argument(
        "insert_refinement needs a refined or new-lemma result");
  return session.execute(*result.insertion);
}

}  // namespace vclemma
