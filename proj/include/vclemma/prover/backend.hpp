#ifndef VCLEMMA_PROVER_BACKEND_HPP_
#define VCLEMMA_PROVER_BACKEND_HPP_

#include <chrono>
#include <cstdint>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace vclemma {

// Thrown when the underlying prover process is gone (crashed, closed pipes).
class SessionDead : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Outcome of executing one sentence against a prover.
struct ExecResult {
  bool accepted = false;
  std::string message;              // rejection or informational text
  std::vector<std::string> goals;   // open goals after execution, normalized
  std::uint64_t state_id = 0;       // backend state after execution
};

// One interactive prover process (or an emulation of one). Sentences are
// executed in order; each accepted sentence advances the state id. A rejected
// sentence must leave the state untouched. execute() honours the timeout and
// reports a rejection when the sentence exceeds it.
class ProverBackend {
 public:
  virtual ~ProverBackend() = default;

  virtual ExecResult execute(const std::string& sentence,
                             std::chrono::milliseconds timeout) = 0;

  // True when the backend can jump back to an earlier state id directly.
  virtual bool native_rollback() const = 0;
  // Returns to an earlier state. Only valid when native_rollback() is true.
  virtual bool rollback_to(std::uint64_t state_id) = 0;

  virtual std::uint64_t current_state() const = 0;
  virtual std::vector<std::string> current_goals() const = 0;
};

// Creates a fresh backend at its initial state. Used for rollback by
// re-execution and for certification runs.
using BackendFactory = std::function<std::unique_ptr<ProverBackend>()>;

}  // namespace vclemma

#endif  // VCLEMMA_PROVER_BACKEND_HPP_
