#ifndef VCLEMMA_PROVER_CERTIFY_HPP_
#define VCLEMMA_PROVER_CERTIFY_HPP_

#include <chrono>
#include <optional>
#include <string>

#include "vclemma/core/types.hpp"
#include "vclemma/prover/backend.hpp"

namespace vclemma {

// Result of replaying a complete proof file on a fresh prover.
struct CertificationReport {
  bool accepted = false;        // every sentence ran, nothing was assumed
  int admitted_count = 0;       // Admitted sentences in the file
  int assumption_count = 0;     // Axiom/Parameter/Hypothesis/... declarations
  std::optional<ProverError> first_error;
};

// Replays file_text sentence by sentence on a fresh backend. The file is
// accepted only when every sentence is, no proof is left open at the end,
// no sentence is Admitted, and no assumption is declared anywhere in the
// file. Malformed text (unterminated comment/string) is reported as an
// error, not thrown.
CertificationReport certify_file(
    const std::string& file_text, const BackendFactory& factory,
    std::chrono::milliseconds sentence_timeout = std::chrono::milliseconds(30000));

}  // namespace vclemma

#endif  // VCLEMMA_PROVER_CERTIFY_HPP_
