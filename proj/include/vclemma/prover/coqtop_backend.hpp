#ifndef VCLEMMA_PROVER_COQTOP_BACKEND_HPP_
#define VCLEMMA_PROVER_COQTOP_BACKEND_HPP_

#include <string>
#include <vector>

#include "vclemma/prover/backend.hpp"

namespace vclemma {

// Adapter for a real interactive coqtop process, driven through its
// emacs-mode prompt protocol. Each prompt carries the global state number;
// a command that leaves the number unchanged was rejected. Rollback uses
// "BackTo n.". A sentence that overruns its timeout is interrupted with
// SIGINT and reported as rejected.
class CoqtopBackend : public ProverBackend {
 public:
  // argv example: {"coqtop", "-emacs", "-q"}. Throws SessionDead when the
  // process cannot be started or the first prompt never arrives.
  explicit CoqtopBackend(std::vector<std::string> argv = {"coqtop", "-emacs",
                                                          "-q"});
  ~CoqtopBackend() override;

  CoqtopBackend(const CoqtopBackend&) = delete;
  CoqtopBackend& operator=(const CoqtopBackend&) = delete;

  ExecResult execute(const std::string& sentence,
                     std::chrono::milliseconds timeout) override;
  bool native_rollback() const override { return true; }
  bool rollback_to(std::uint64_t state_id) override;
  std::uint64_t current_state() const override { return state_id_; }
  std::vector<std::string> current_goals() const override { return goals_; }

 private:
  struct Reply {
    std::string text;        // everything before the prompt
    std::uint64_t state_id;  // number carried by the prompt
    bool prompt_seen;
  };

  Reply read_until_prompt(std::chrono::milliseconds timeout);
  void send_line(const std::string& line);
  void shutdown();

  int pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  std::string pending_;  // bytes read past the last parsed prompt
  std::uint64_t state_id_ = 0;
  std::vector<std::string> goals_;
};

// True when the given command resolves to an executable on PATH.
bool prover_binary_available(const std::string& command);

}  // namespace vclemma

#endif  // VCLEMMA_PROVER_COQTOP_BACKEND_HPP_
