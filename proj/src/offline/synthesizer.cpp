#include "vclemma/offline/synthesizer.hpp"

#include <algorithm>
#include <map>
#include <regex>
#include <sstream>

#include "vclemma/core/text.hpp"
#include "vclemma/llm/prompts.hpp"
#include "vclemma/prover/certify.hpp"
#include "vclemma/prover/session.hpp"

namespace vclemma {

std::string extract_code_fence(const std::string& reply) {
  std::size_t open = reply.find("```");
  if (open == std::string::npos) return "";
  std::size_t content = reply.find('\n', open);
  if (content == std::string::npos) return "";
  ++content;
  std::size_t close = reply.find("```", content);
  if (close == std::string::npos) return reply.substr(content);
  return reply.substr(content, close - content);
}

PsaOutcome run_psa(const VerificationTask& task, const SliceResult& slice,
                   LlmClient& llm, const BackendFactory& prover_factory,
                   int max_attempts,
                   std::chrono::milliseconds sentence_timeout) {
  PsaOutcome outcome;

  std::string function_name = slice.enclosing_function.empty()
                                  ? std::string("(unknown)")
                                  : slice.enclosing_function;
  auto messages = render_prompt(
      "psa", {{"property_name", task.property_name},
              {"function_name", function_name},
              {"line", std::to_string(task.property_location.line)},
              {"file", task.property_location.file},
              {"annotated_source", slice.sliced_source}});

  for (int attempt = 1; attempt <= max_attempts; ++attempt) {
    outcome.attempts = attempt;
    ChatResponse reply = llm.chat(messages, LlmClient::Phase::offline);

    std::string failure;
    std::string file = extract_code_fence(reply.text);
    if (file.empty()) {
      failure = "the reply contained no code fence";
    } else {
      CertificationReport report =
          certify_file(file, prover_factory, sentence_timeout);
      if (report.accepted) {
        SemanticsAwareVC vc;
        vc.file_text = file;
        auto blocks = extract_lemma_blocks(file);
        if (!blocks.empty()) vc.main_lemma_name = blocks.back().name;
        vc.checked = true;
        outcome.vc = std::move(vc);
        return outcome;
      }
      if (report.first_error) {
        failure = report.first_error->message;
        if (!report.first_error->failed_tactic.empty())
          failure = "sentence \"" + report.first_error->failed_tactic +
                    "\" failed: " + failure;
      } else if (report.admitted_count > 0) {
        failure = "the file admits " + std::to_string(report.admitted_count) +
                  " obligation(s)";
      } else {
        failure = "the file declares " +
                  std::to_string(report.assumption_count) + " assumption(s)";
      }
    }

    outcome.notes.push_back("attempt " + std::to_string(attempt) + ": " +
                            failure);
    messages.push_back({"assistant", reply.text});
    messages.push_back(
        {"user", "The Coq file failed certification: " + failure +
                     ". Reply with a corrected, complete Coq file inside a "
                     "```coq code fence. Every lemma must be fully proved "
                     "without Admitted or new axioms."});
  }
  return outcome;
}

namespace {

ProofPlan parse_plan(const std::string& reply,
                     const std::vector<HelperLemma>& drafts,
                     std::vector<std::string>& warnings) {
  ProofPlan plan;
  std::size_t at = reply.find("Plan:");
  if (at == std::string::npos) {
    if (!drafts.empty()) warnings.push_back("reply contains no \"Plan:\" section");
    return plan;
  }
  std::istringstream in(reply.substr(at));
  std::string line;
  std::getline(in, line);  // the "Plan:" line itself
  static const std::regex kStep("^\\s*\\d+[.)]\\s*(.*)$");
  std::smatch m;
  while (std::getline(in, line)) {
    if (line.find("```") != std::string::npos) break;
    if (!std::regex_match(line, m, kStep)) {
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      break;  // prose after the numbered list ends the plan
    }
    std::string guidance = m[1].str();
    std::string cited;
    for (const auto& d : drafts) {
      if (d.name.empty()) continue;
      auto pos = guidance.find(d.name);
      if (pos != std::string::npos &&
          (cited.empty() || pos < guidance.find(cited))) {
        cited = d.name;
      }
    }
    if (cited.empty()) {
      warnings.push_back("plan step dropped, it cites no synthesized lemma: " +
                         guidance);
      continue;
    }
    plan.steps.push_back({cited, guidance});
  }
  return plan;
}

}  // namespace

SynthesisResult synthesize_helper_lemmas(
    const std::optional<SemanticsAwareVC>& phi_a, const ProofTargetedVC& phi_c,
    LlmClient& llm) {
  SynthesisResult result;

  const std::string phi_c_text =
      phi_c.preamble_text + "\n" + phi_c.statement_text;
  std::vector<ChatMessage> messages;
  if (phi_a && phi_a->checked) {
    messages = render_prompt("offline-synthesis",
                             {{"proof_targeted_vc", phi_c_text},
                              {"semantic_vc", phi_a->file_text}});
  } else {
    messages = render_prompt("offline-synthesis-direct",
                             {{"proof_targeted_vc", phi_c_text}});
  }

  ChatResponse reply = llm.chat(messages, LlmClient::Phase::offline);

  std::string fence = extract_code_fence(reply.text);
  if (fence.empty()) {
    result.raw_reply = reply.text;
    result.warnings.push_back("synthesis reply contained no code fence");
    return result;
  }

  try {
    result.drafts = extract_lemma_blocks(fence);
  } catch (const TextParseError& e) {
    result.raw_reply = reply.text;
    result.warnings.push_back(std::string("synthesis reply unparseable: ") +
                              e.what());
    return result;
  }
  for (auto& d : result.drafts) d.provenance = LemmaProvenance::offline;

  result.plan = parse_plan(reply.text, result.drafts, result.warnings);
  return result;
}

PruneResult prune_failed_lemmas(std::vector<HelperLemma> drafts,
                                const std::string& preamble,
                                const BackendFactory& factory,
                                std::chrono::milliseconds sentence_timeout) {
  PruneResult result;

  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < drafts.size(); ++i)
    if (!drafts[i].name.empty()) index.emplace(drafts[i].name, i);

  // stable topological order over the depends_on edges
  const std::size_t n = drafts.size();
  std::vector<int> indegree(n, 0);
  std::vector<std::vector<std::size_t>> dependents(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (const auto& dep : drafts[i].depends_on) {
      auto it = index.find(dep);
      if (it == index.end() || it->second == i) continue;
      ++indegree[i];
      dependents[it->second].push_back(i);
    }
  }
  std::vector<std::size_t> order;
  std::vector<bool> placed(n, false);
  for (;;) {
    bool progressed = false;
    for (std::size_t i = 0; i < n; ++i) {
      if (placed[i] || indegree[i] != 0) continue;
      placed[i] = true;
      order.push_back(i);
      for (auto d : dependents[i]) --indegree[d];
      progressed = true;
    }
    if (!progressed) break;
  }

  std::vector<bool> in_cycle(n, false);
  for (std::size_t i = 0; i < n; ++i)
    if (!placed[i]) in_cycle[i] = true;

  ProverSession session(factory, sentence_timeout);
  bool preamble_ok = true;
  std::string preamble_error;
  try {
    for (const auto& s : split_sentences(preamble)) {
      auto r = session.execute(s.text);
      if (!r.accepted) {
        preamble_ok = false;
        preamble_error = r.message;
        break;
      }
    }
  } catch (const TextParseError& e) {
    preamble_ok = false;
    preamble_error = e.what();
  }
  if (!preamble_ok)
    result.diagnostics.push_back("goal preamble failed to load: " +
                                 preamble_error);

  std::vector<bool> discarded(n, false);
  auto discard = [&](std::size_t i, const std::string& why) {
    discarded[i] = true;
    drafts[i].status = LemmaStatus::discarded;
    result.diagnostics.push_back(drafts[i].name.empty()
                                     ? why
                                     : drafts[i].name + ": " + why);
  };

  for (std::size_t i : order) {
    HelperLemma& d = drafts[i];
    if (!preamble_ok) {
      discard(i, "not checked, the goal preamble failed to load");
      continue;
    }
    std::string failed_dep;
    for (const auto& dep : d.depends_on) {
      auto it = index.find(dep);
      if (it != index.end() && discarded[it->second]) failed_dep = dep;
    }
    if (!failed_dep.empty()) {
      discard(i, "discarded without checking, depends on discarded " + failed_dep);
      continue;
    }
    if (d.status == LemmaStatus::conflict) {
      discard(i, "draft block has no proof terminator");
      continue;
    }
    const std::string block = d.statement + "\n" + d.proof;
    bool assumes = false;
    try {
      for (const auto& s : split_sentences(block)) {
        if (first_token(s.text) == "Admitted" || is_assumption_decl(s.text))
          assumes = true;
      }
    } catch (const TextParseError&) {
      discard(i, "draft block is not well formed");
      continue;
    }
    if (assumes) {
      discard(i, "proof admits the goal or declares assumptions");
      continue;
    }

    StateToken mark = session.snapshot();
    bool ok = true;
    std::string error;
    for (const auto& s : split_sentences(block)) {
      auto r = session.execute(s.text);
      if (!r.accepted) {
        ok = false;
        error = "sentence \"" + normalize_ws(s.text) + "\" rejected: " +
                r.message;
        break;
      }
    }
    if (ok) {
      d.status = LemmaStatus::checked;
    } else {
      session.rollback(mark);
      discard(i, error);
    }
  }

  // anything not placed by the topological sort sits on or behind a cycle
  for (std::size_t i = 0; i < n; ++i) {
    if (!in_cycle[i]) continue;
    std::string members;
    for (std::size_t j = 0; j < n; ++j)
      if (in_cycle[j]) members += (members.empty() ? "" : ", ") + drafts[j].name;
    discard(i, "dependency cycle, unorderable drafts: " + members);
  }

  result.lemmas = std::move(drafts);
  return result;
}

}  // namespace vclemma
