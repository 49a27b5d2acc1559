#include "vclemma/prover/certify.hpp"

#include "vclemma/core/text.hpp"

namespace vclemma {

CertificationReport certify_file(const std::string& file_text,
                                 const BackendFactory& factory,
                                 std::chrono::milliseconds sentence_timeout) {
  CertificationReport report;

  std::vector<Sentence> sentences;
  try {
    sentences = split_sentences(file_text);
  } catch (const TextParseError& e) {
    report.first_error = ProverError{
        "", std::string(e.what()) + " at byte " + std::to_string(e.offset())};
    return report;
  }

  auto backend = factory();
  if (!backend) {
    report.first_error = ProverError{"", "backend factory returned null"};
    return report;
  }

  bool proof_open = false;
  for (const auto& s : sentences) {
    const std::string tok = first_token(s.text);
    if (tok.empty()) continue;  // pure trivia tail

    if (tok == "Admitted") ++report.admitted_count;
    if (is_assumption_decl(s.text)) ++report.assumption_count;
    if (is_goal_opener(s.text)) proof_open = true;
    if (is_proof_terminator(s.text)) proof_open = false;

    ExecResult r = backend->execute(s.text, sentence_timeout);
    if (!r.accepted) {
      report.first_error = ProverError{normalize_ws(s.text), r.message};
      return report;
    }
  }

  if (proof_open) {
    report.first_error =
        ProverError{"", "file ends with an unfinished proof"};
    return report;
  }

  report.accepted = report.admitted_count == 0 && report.assumption_count == 0;
  return report;
}

}  // namespace vclemma
