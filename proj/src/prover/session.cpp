#include "vclemma/prover/session.hpp"

#include <atomic>
#include <stdexcept>

namespace vclemma {

namespace {
std::uint64_t next_session_id() {
  static std::atomic<std::uint64_t> counter{1};
  return counter.fetch_add(1);
}
}  // namespace

ProverSession::ProverSession(BackendFactory factory,
                             std::chrono::milliseconds sentence_timeout)
    : factory_(std::move(factory)),
      sentence_timeout_(sentence_timeout),
      session_id_(next_session_id()) {
  backend_ = factory_();
  if (!backend_) throw std::runtime_error("backend factory returned null");
}

ExecResult ProverSession::execute(const std::string& sentence) {
  const std::uint64_t before = backend_->current_state();
  ExecResult result = backend_->execute(sentence, sentence_timeout_);
  if (result.accepted) {
    accepted_.push_back(sentence);
    state_after_.push_back(result.state_id);
    return result;
  }
  // A rejection must not move the session. If the backend slipped anyway,
  // force it back before reporting.
  if (backend_->current_state() != before) {
    if (!backend_->native_rollback() || !backend_->rollback_to(before)) {
      backend_ = factory_();
      for (const auto& s : accepted_) backend_->execute(s, sentence_timeout_);
    }
  }
  result.goals = backend_->current_goals();
  result.state_id = backend_->current_state();
  return result;
}

StateToken ProverSession::snapshot() const {
  StateToken t;
  t.session_id = session_id_;
  t.backend_state = backend_->current_state();
  t.history_index = accepted_.size();
  return t;
}

void ProverSession::rollback(const StateToken& token) {
  if (token.session_id != session_id_)
    throw std::invalid_argument("state token belongs to a different session");
  if (token.history_index > accepted_.size())
    throw std::invalid_argument("state token is ahead of this session");

  if (token.history_index == accepted_.size()) return;

  if (backend_->native_rollback() && backend_->rollback_to(token.backend_state)) {
    accepted_.resize(token.history_index);
    state_after_.resize(token.history_index);
    return;
  }

  // Re-execution fallback: fresh backend, replay the accepted prefix.
  auto fresh = factory_();
  if (!fresh) throw std::runtime_error("backend factory returned null");
  accepted_.resize(token.history_index);
  state_after_.resize(token.history_index);
  for (std::size_t i = 0; i < accepted_.size(); ++i) {
    ExecResult r = fresh->execute(accepted_[i], sentence_timeout_);
    if (!r.accepted)
      throw SessionDead("replay diverged while rolling back: " + r.message);
    state_after_[i] = r.state_id;
  }
  backend_ = std::move(fresh);
}

}  // namespace vclemma
