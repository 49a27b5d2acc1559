#ifndef VCLEMMA_PROVER_SESSION_HPP_
#define VCLEMMA_PROVER_SESSION_HPP_

#include <chrono>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "vclemma/prover/backend.hpp"

namespace vclemma {

// Opaque handle to a point in a session's accepted-sentence history.
// Tokens are only valid for the session that issued them.
struct StateToken {
  std::uint64_t session_id = 0;
  std::uint64_t backend_state = 0;
  std::size_t history_index = 0;  // number of accepted sentences at this point
};

// Drives one prover interaction on top of an arbitrary backend. Keeps the
// ordered list of accepted sentences; a rejected sentence never changes the
// session state (enforced here even if the backend misbehaves). Rollback
// uses the backend's native mechanism when available and otherwise replays
// the accepted prefix on a fresh backend from the factory.
class ProverSession {
 public:
  ProverSession(BackendFactory factory,
                std::chrono::milliseconds sentence_timeout =
                    std::chrono::milliseconds(30000));

  // Executes one sentence. On acceptance the sentence joins the history.
  ExecResult execute(const std::string& sentence);

  StateToken snapshot() const;
  // Restores an earlier snapshot. Throws std::invalid_argument for tokens
  // from another session or from a point ahead of the current history.
  void rollback(const StateToken& token);

  const std::vector<std::string>& accepted_sentences() const { return accepted_; }
  std::vector<std::string> goals() const { return backend_->current_goals(); }
  std::chrono::milliseconds sentence_timeout() const { return sentence_timeout_; }

 private:
  BackendFactory factory_;
  std::unique_ptr<ProverBackend> backend_;
  std::chrono::milliseconds sentence_timeout_;
  std::uint64_t session_id_;
  std::vector<std::string> accepted_;
  std::vector<std::uint64_t> state_after_;  // backend state after accepted_[i]
};

}  // namespace vclemma

#endif  // VCLEMMA_PROVER_SESSION_HPP_
