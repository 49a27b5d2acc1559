#include "vclemma/core/types.hpp"

namespace vclemma {

const char* to_string(LemmaProvenance p) {
  switch (p) {
    case LemmaProvenance::offline: return "offline";
    case LemmaProvenance::online_refined: return "online-refined";
    case LemmaProvenance::online_new: return "online-new";
    case LemmaProvenance::history: return "history";
  }
  return "offline";
}

const char* to_string(LemmaStatus s) {
  switch (s) {
    case LemmaStatus::unchecked: return "unchecked";
    case LemmaStatus::checked: return "checked";
    case LemmaStatus::conflict: return "conflict";
    case LemmaStatus::discarded: return "discarded";
  }
  return "unchecked";
}

std::optional<LemmaProvenance> provenance_from_string(const std::string& s) {
  if (s == "offline") return LemmaProvenance::offline;
  if (s == "online-refined") return LemmaProvenance::online_refined;
  if (s == "online-new") return LemmaProvenance::online_new;
  if (s == "history") return LemmaProvenance::history;
  return std::nullopt;
}

std::optional<LemmaStatus> status_from_string(const std::string& s) {
  if (s == "unchecked") return LemmaStatus::unchecked;
  if (s == "checked") return LemmaStatus::checked;
  if (s == "conflict") return LemmaStatus::conflict;
  if (s == "discarded") return LemmaStatus::discarded;
  return std::nullopt;
}

const char* to_string(ProofOutcome o) {
  switch (o) {
    case ProofOutcome::proved: return "proved";
    case ProofOutcome::exhausted_steps: return "exhausted-steps";
    case ProofOutcome::exhausted_time: return "exhausted-time";
    case ProofOutcome::aborted: return "aborted";
  }
  return "aborted";
}

std::optional<ProofOutcome> outcome_from_string(const std::string& s) {
  if (s == "proved") return ProofOutcome::proved;
  if (s == "exhausted-steps") return ProofOutcome::exhausted_steps;
  if (s == "exhausted-time") return ProofOutcome::exhausted_time;
  if (s == "aborted") return ProofOutcome::aborted;
  return std::nullopt;
}

const char* to_string(TranscriptEventKind k) {
  switch (k) {
    case TranscriptEventKind::tactic_attempt: return "tactic-attempt";
    case TranscriptEventKind::prover_reply: return "prover-reply";
    case TranscriptEventKind::tool_call: return "tool-call";
    case TranscriptEventKind::tool_reply: return "tool-reply";
    case TranscriptEventKind::lemma_added: return "lemma-added";
    case TranscriptEventKind::budget_tick: return "budget-tick";
    case TranscriptEventKind::note: return "note";
  }
  return "note";
}

}  // namespace vclemma
