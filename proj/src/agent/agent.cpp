#include "vclemma/agent/agent.hpp"

#include <algorithm>
#include <chrono>
#include <map>
#include <optional>

#include "vclemma/agent/adapter.hpp"
#include "vclemma/core/text.hpp"
#include "vclemma/llm/prompts.hpp"
#include "vclemma/prover/certify.hpp"
#include "vclemma/prover/session.hpp"

namespace vclemma {

namespace {

const std::set<std::string>& application_heads() {
  static const std::set<std::string> kHeads = {
      "apply",  "eapply", "exact",      "rewrite", "erewrite",
      "refine", "assert", "specialize", "pose"};
  return kHeads;
}

// Library names a single tactic sentence references in application position.
std::vector<std::string> referenced_names(const std::string& sentence,
                                          const LemmaLibrary& library) {
  std::vector<std::string> out;
  std::vector<Token> tokens;
  try {
    tokens = tokenize(sentence);
  } catch (const TextParseError&) {
    return out;
  }
  if (tokens.empty() || tokens[0].kind != TokenKind::ident) return out;
  if (!application_heads().count(tokens[0].text)) return out;
  for (std::size_t i = 1; i < tokens.size(); ++i)
    if (tokens[i].kind == TokenKind::ident && library.contains(tokens[i].text))
      if (std::find(out.begin(), out.end(), tokens[i].text) == out.end())
        out.push_back(tokens[i].text);
  return out;
}

bool refused_by_policy(const std::string& sentence) {
  const std::string head = first_token(sentence);
  return head == "Admitted" || head == "Abort" || is_assumption_decl(sentence);
}

std::string or_none(const std::string& s) { return s.empty() ? "(none)" : s; }

std::string join_lines(const std::vector<std::string>& items) {
  std::string out;
  for (const auto& item : items) out += item + "\n";
  return out;
}

std::string render_plan(const ProofPlan& plan) {
  std::string out;
  for (std::size_t i = 0; i < plan.steps.size(); ++i)
    out += std::to_string(i + 1) + ". " + plan.steps[i].guidance + "\n";
  return out;
}

// Everything the loop threads from step to step.
struct LoopState {
  ProverSession session;
  LemmaLibrary library;
  std::vector<std::string> script;       // accepted tactics of the main proof
  std::vector<StateToken> checkpoints;   // checkpoints[i] = state before script[i]
  std::optional<ProverError> last_error;
  int consecutive_rejections = 0;

  struct Subproof {
    std::size_t target_goal_count;  // open goals once the obligation closes
    std::size_t script_mark;        // script length before the assert
    HelperLemma lemma;
    int steps_left;
    int rejections = 0;
  };
  std::optional<Subproof> subproof;

  LoopState(const BackendFactory& factory, std::chrono::milliseconds timeout)
      : session(factory, timeout) {}
};

}  // namespace

std::set<std::string> detect_lemma_usage(
    const std::string& final_script,
    const std::vector<std::string>& lemma_names) {
  std::set<std::string> used;
  std::set<std::string> names(lemma_names.begin(), lemma_names.end());
  std::vector<Sentence> sentences;
  try {
    sentences = split_sentences(strip_comments(final_script));
  } catch (const TextParseError&) {
    return used;
  }
  for (const auto& s : sentences) {
    std::vector<Token> tokens;
    try {
      tokens = tokenize(s.text);
    } catch (const TextParseError&) {
      continue;
    }
    if (tokens.empty() || tokens[0].kind != TokenKind::ident) continue;
    if (!application_heads().count(tokens[0].text)) continue;
    for (std::size_t i = 1; i < tokens.size(); ++i)
      if (tokens[i].kind == TokenKind::ident && names.count(tokens[i].text))
        used.insert(tokens[i].text);
  }
  return used;
}

std::string assemble_final_artifact(
    const ProofTargetedVC& phi_c, const LemmaLibrary& library,
    const std::vector<std::string>& tactic_script) {
  // seed: names the script itself applies
  std::vector<std::string> names;
  for (const auto& lemma : library.entries()) names.push_back(lemma.name);
  std::set<std::string> needed =
      detect_lemma_usage(join_lines(tactic_script), names);

  // close over dependencies of block-resident lemmas
  for (bool grew = true; grew;) {
    grew = false;
    for (const auto& name : std::set<std::string>(needed)) {
      const HelperLemma* lemma = library.find(name);
      if (!lemma) continue;
      for (const auto& dep : lemma->depends_on)
        if (library.contains(dep) && needed.insert(dep).second) grew = true;
    }
  }

  std::string file = phi_c.preamble_text;
  if (!file.empty() && file.back() != '\n') file += "\n";
  for (const auto& lemma : library.entries()) {
    if (!needed.count(lemma.name)) continue;
    if (lemma.provenance != LemmaProvenance::offline &&
        lemma.provenance != LemmaProvenance::history)
      continue;  // online lemmas live inside the script as asserts
    file += "\n" + lemma.statement + "\n" + lemma.proof + "\n";
  }
  file += "\n" + phi_c.statement_text + "\nProof.\n";
  for (const auto& tactic : tactic_script) file += tactic + "\n";
  file += "Qed.\n";
  return file;
}

AgentRunResult run_agent(const VerificationTask& task,
                         const OfflineBundle& bundle, LlmClient& llm,
                         const BackendFactory& factory, Budget budget,
                         AgentFlags flags,
                         const std::vector<HelperLemma>& history_lemmas) {
  AgentRunResult result;
  ProofTranscript& transcript = result.transcript;
  transcript.task_id = task.task_id;
  transcript.outcome = ProofOutcome::aborted;

  const auto started = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration_cast<std::chrono::milliseconds>(
        std::chrono::steady_clock::now() - started);
  };
  auto note = [&](const std::string& text) {
    TranscriptEvent e;
    e.kind = TranscriptEventKind::note;
    e.step = budget.consumed_steps;
    e.text = text;
    transcript.events.push_back(std::move(e));
  };
  auto finish = [&](ProofOutcome outcome) {
    transcript.outcome = outcome;
    budget.elapsed = elapsed();
    TranscriptEvent e;
    e.kind = TranscriptEventKind::budget_tick;
    e.step = budget.consumed_steps;
    e.elapsed_ms = budget.elapsed.count();
    transcript.events.push_back(std::move(e));
    result.budget = budget;
  };

  ProofTargetedVC phi_c;
  try {
    phi_c = parse_goal_file(task.goal_file);
  } catch (const std::exception& e) {
    note(std::string("goal file rejected: ") + e.what());
    finish(ProofOutcome::aborted);
    return result;
  }

  LoopState st(factory, flags.sentence_timeout);

  // session setup: preamble, library lemma blocks, the goal statement
  auto replay_block = [&](const HelperLemma& lemma) -> bool {
    StateToken before = st.session.snapshot();
    for (const auto& s : split_sentences(lemma.statement + "\n" + lemma.proof)) {
      ExecResult r = st.session.execute(s.text);
      if (!r.accepted) {
        st.session.rollback(before);
        note("library lemma " + lemma.name + " failed to replay: " + r.message);
        return false;
      }
    }
    return true;
  };

  ProofPlan plan;
  try {
    for (const auto& s : split_sentences(phi_c.preamble_text)) {
      ExecResult r = st.session.execute(s.text);
      if (!r.accepted) {
        note("preamble rejected at \"" + normalize_ws(s.text) + "\": " + r.message);
        finish(ProofOutcome::aborted);
        return result;
      }
    }
    if (!flags.no_offline) {
      for (const auto& lemma : bundle.lemmas) {
        if (lemma.status != LemmaStatus::checked) continue;
        if (!replay_block(lemma)) continue;
        std::string stored = st.library.add(lemma);
        TranscriptEvent e;
        e.kind = TranscriptEventKind::lemma_added;
        e.text = stored;
        e.detail = to_string(lemma.provenance);
        transcript.events.push_back(std::move(e));
      }
      plan = bundle.plan;
    }
    for (HelperLemma lemma : history_lemmas) {
      if (lemma.status != LemmaStatus::checked) continue;
      lemma.provenance = LemmaProvenance::history;
      if (!replay_block(lemma)) continue;
      std::string stored = st.library.add(lemma);
      TranscriptEvent e;
      e.kind = TranscriptEventKind::lemma_added;
      e.text = stored;
      e.detail = to_string(LemmaProvenance::history);
      transcript.events.push_back(std::move(e));
    }

    ExecResult r = st.session.execute(phi_c.statement_text);
    if (!r.accepted) {
      note("goal statement rejected: " + r.message);
      finish(ProofOutcome::aborted);
      return result;
    }
    r = st.session.execute("Proof.");  // structural, free
    if (!r.accepted) {
      note("Proof. rejected: " + r.message);
      finish(ProofOutcome::aborted);
      return result;
    }
  } catch (const std::exception& e) {
    note(std::string("session setup failed: ") + e.what());
    finish(ProofOutcome::aborted);
    return result;
  }
  st.checkpoints.push_back(st.session.snapshot());

  const std::string plan_text = render_plan(plan);

  enum class Halt { none, proved, aborted, out_of_steps, out_of_time };
  Halt halt = Halt::none;

  auto abandon_subproof = [&](const std::string& why) {
    const auto& sub = *st.subproof;
    st.session.rollback(st.checkpoints[sub.script_mark]);
    st.script.resize(sub.script_mark);
    st.checkpoints.resize(sub.script_mark + 1);
    const std::string base = sub.lemma.name;
    if (st.library.contains(base)) st.library.mark_conflict(base);
    note("subproof of " + base + " abandoned: " + why);
    st.subproof.reset();
    st.consecutive_rejections = 0;
  };

  auto backtrack = [&] {
    st.consecutive_rejections = 0;
    if (st.script.empty()) {
      note("three rejections at the proof root, nothing to backtrack");
      return;
    }
    st.session.rollback(st.checkpoints[st.script.size() - 1]);
    note("backtracked past \"" + normalize_ws(st.script.back()) +
         "\" after three consecutive rejections");
    st.script.pop_back();
    st.checkpoints.pop_back();
  };

  // Runs one charged prover sentence; returns false when the loop must stop.
  auto execute_charged = [&](const std::string& sentence) -> bool {
    ++budget.consumed_steps;
    if (st.subproof) --st.subproof->steps_left;

    TranscriptEvent attempt;
    attempt.kind = TranscriptEventKind::tactic_attempt;
    attempt.step = budget.consumed_steps;
    attempt.text = sentence;
    transcript.events.push_back(std::move(attempt));

    ExecResult r;
    bool refused = refused_by_policy(sentence);
    if (refused) {
      r.accepted = false;
      r.message = "refused: admitted proofs and new assumptions are not allowed";
    } else {
      r = st.session.execute(sentence);
    }

    TranscriptEvent echo;
    echo.kind = TranscriptEventKind::prover_reply;
    echo.step = budget.consumed_steps;
    echo.accepted = r.accepted;
    echo.detail = r.message;
    echo.goals_after = r.accepted ? st.session.goals() : r.goals;
    transcript.events.push_back(std::move(echo));

    const auto referenced = referenced_names(sentence, st.library);

    if (!r.accepted) {
      st.last_error = ProverError{normalize_ws(sentence), r.message};
      for (const auto& n : referenced) st.library.mark_conflict(n);
      if (st.subproof) {
        auto& sub = *st.subproof;
        ++sub.rejections;
        if (sub.rejections >= 3)
          abandon_subproof("three rejections inside the subproof");
        else if (sub.steps_left <= 0)
          abandon_subproof("subproof budget exhausted");
      } else {
        ++st.consecutive_rejections;
        if (st.consecutive_rejections >= 3) backtrack();
      }
      return true;
    }

    st.script.push_back(sentence);
    st.checkpoints.push_back(st.session.snapshot());
    st.last_error.reset();
    st.consecutive_rejections = 0;
    int position = static_cast<int>(st.script.size()) - 1;
    for (const auto& n : referenced) {
      st.library.clear_conflict(n);
      st.library.log_usage(n, position);
    }

    if (st.subproof) {
      auto& sub = *st.subproof;
      sub.rejections = 0;
      if (st.session.goals().size() <= sub.target_goal_count) {
        HelperLemma proved = sub.lemma;
        proved.status = LemmaStatus::checked;
        std::string stored = st.library.add(proved);
        proved.name = stored;
        result.online_lemmas.push_back(proved);
        TranscriptEvent e;
        e.kind = TranscriptEventKind::lemma_added;
        e.text = stored;
        e.detail = to_string(proved.provenance);
        transcript.events.push_back(std::move(e));
        st.subproof.reset();
      } else if (sub.steps_left <= 0) {
        abandon_subproof("subproof budget exhausted");
        return true;
      }
    }

    if (st.subproof || !st.session.goals().empty()) return true;

    // the proof closes: structural Qed., then the trusted recheck
    ExecResult qed = st.session.execute("Qed.");
    TranscriptEvent e;
    e.kind = TranscriptEventKind::tactic_attempt;
    e.step = budget.consumed_steps;
    e.text = "Qed.";
    transcript.events.push_back(std::move(e));
    TranscriptEvent f;
    f.kind = TranscriptEventKind::prover_reply;
    f.step = budget.consumed_steps;
    f.accepted = qed.accepted;
    f.detail = qed.message;
    transcript.events.push_back(std::move(f));
    if (!qed.accepted) {
      note("Qed. rejected on an empty goal stack: " + qed.message);
      halt = Halt::aborted;
      return false;
    }

    std::string artifact =
        assemble_final_artifact(phi_c, st.library, st.script);
    CertificationReport report =
        certify_file(artifact, factory, flags.sentence_timeout);
    if (!report.accepted || report.admitted_count != 0 ||
        report.assumption_count != 0) {
      std::string why = report.first_error ? report.first_error->message
                                           : "admitted or assumed obligations";
      note("final artifact failed recertification: " + why);
      halt = Halt::aborted;
      return false;
    }
    transcript.final_script = artifact;
    std::vector<std::string> names;
    for (const auto& lemma : st.library.entries()) names.push_back(lemma.name);
    result.used_lemma_names = detect_lemma_usage(artifact, names);
    halt = Halt::proved;
    return false;
  };

  auto out_of_budget = [&]() -> bool {
    if (budget.consumed_steps >= budget.max_steps) {
      halt = Halt::out_of_steps;
      return true;
    }
    if (elapsed() >= budget.max_wall_clock) {
      halt = Halt::out_of_time;
      return true;
    }
    return false;
  };

  try {
  while (halt == Halt::none && !out_of_budget()) {
    ProofState view;
    view.applied_tactics.push_back("Proof.");
    for (const auto& t : st.script) view.applied_tactics.push_back(t);
    view.open_goals = st.session.goals();
    view.last_error = st.last_error;

    const std::string listing = st.library.listing(flags.listing_cap);
    std::string feedback =
        st.last_error ? format_error_feedback(*st.last_error) : "none";
    std::string applied;
    for (const auto& t : view.applied_tactics)
      applied += (applied.empty() ? "" : " ") + t;

    std::vector<ChatMessage> messages;
    try {
      messages = render_prompt(
          "agent-step",
          {{"open_goals", or_none(join_lines(view.open_goals))},
           {"applied_tactics", or_none(applied)},
           {"error_feedback", feedback},
           {"lemma_listing", or_none(listing)},
           {"proof_plan", or_none(plan_text)}});
    } catch (const std::exception& e) {
      note(std::string("prompt rendering failed: ") + e.what());
      halt = Halt::aborted;
      break;
    }

    std::vector<ToolDescriptor> tools;
    if (!flags.no_online && !st.subproof)
      tools.push_back(adaptation_tool_descriptor());

    ChatResponse response;
    try {
      response = llm.chat(messages, LlmClient::Phase::agent, tools);
    } catch (const std::exception& e) {
      note(std::string("model call failed: ") + e.what());
      halt = Halt::aborted;
      break;
    }

    if (response.tool_call) {
      ++budget.consumed_steps;  // the tool call is the charged action
      TranscriptEvent e;
      e.kind = TranscriptEventKind::tool_call;
      e.step = budget.consumed_steps;
      e.text = response.tool_call->name;
      e.detail = response.tool_call->arguments.dump();
      transcript.events.push_back(std::move(e));

      if (response.tool_call->name != "adapt_lemma" || flags.no_online) {
        TranscriptEvent bad;
        bad.kind = TranscriptEventKind::tool_reply;
        bad.step = budget.consumed_steps;
        bad.text = "rejected";
        bad.detail = "no such tool is available";
        transcript.events.push_back(std::move(bad));
        continue;
      }

      std::vector<std::string> names;
      for (const auto& lemma : st.library.entries()) names.push_back(lemma.name);
      AdaptationResult adapted;
      try {
        adapted = adapt_lemma({view, listing}, llm, names);
      } catch (const std::exception& e) {
        note(std::string("adapter call failed: ") + e.what());
        halt = Halt::aborted;
        break;
      }

      TranscriptEvent reply;
      reply.kind = TranscriptEventKind::tool_reply;
      reply.step = budget.consumed_steps;
      reply.text = to_string(adapted.kind);
      reply.detail = adapted.lemma ? adapted.lemma->name : adapted.existing_name;
      transcript.events.push_back(std::move(reply));

      if (adapted.kind == AdaptationKind::none) continue;

      if (adapted.kind == AdaptationKind::apply_existing) {
        if (out_of_budget()) break;
        if (!execute_charged("apply " + adapted.existing_name + ".")) break;
        continue;
      }

      // refined / new lemma: embed it and open its subproof
      if (out_of_budget()) break;
      const std::size_t goals_before = st.session.goals().size();
      const std::size_t mark = st.script.size();
      if (!execute_charged(*adapted.insertion)) break;
      if (!st.script.empty() && st.script.size() == mark + 1) {
        LoopState::Subproof sub;
        sub.target_goal_count = goals_before;
        sub.script_mark = mark;
        sub.lemma = *adapted.lemma;
        sub.steps_left = flags.subproof_budget;
        st.subproof = sub;
      } else {
        // the assert itself was rejected: annotate the base lemma
        std::string base = adapted.lemma->name;
        while (!base.empty() && base.back() == '\'') base.pop_back();
        if (st.library.contains(base)) st.library.mark_conflict(base);
      }
      continue;
    }

    // plain text: one or more tactic sentences, each charged separately
    std::vector<Sentence> sentences;
    try {
      sentences = split_sentences(response.text);
    } catch (const TextParseError& e) {
      ++budget.consumed_steps;
      note(std::string("unparseable model reply: ") + e.what());
      st.last_error = ProverError{"", std::string("the reply was not a "
                                  "well-formed tactic sentence: ") + e.what()};
      ++st.consecutive_rejections;
      if (st.consecutive_rejections >= 3) backtrack();
      continue;
    }
    sentences.erase(std::remove_if(sentences.begin(), sentences.end(),
                                   [](const Sentence& s) {
                                     return first_token(s.text).empty();
                                   }),
                    sentences.end());
    if (sentences.empty()) {
      ++budget.consumed_steps;
      note("model reply contained no tactic sentence");
      continue;
    }
    for (const auto& s : sentences) {
      if (out_of_budget()) break;
      if (!execute_charged(s.text)) break;
    }
  }
  } catch (const SessionDead& e) {
    note(std::string("prover session died: ") + e.what());
    halt = Halt::aborted;
  }

  switch (halt) {
    case Halt::proved:
      finish(ProofOutcome::proved);
      break;
    case Halt::out_of_steps:
      finish(ProofOutcome::exhausted_steps);
      break;
    case Halt::out_of_time:
      finish(ProofOutcome::exhausted_time);
      break;
    case Halt::aborted:
    case Halt::none:
      finish(ProofOutcome::aborted);
      break;
  }
  return result;
}

}  // namespace vclemma
