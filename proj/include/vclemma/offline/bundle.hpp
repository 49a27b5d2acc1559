#ifndef VCLEMMA_OFFLINE_BUNDLE_HPP_
#define VCLEMMA_OFFLINE_BUNDLE_HPP_

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "vclemma/core/types.hpp"
#include "vclemma/llm/client.hpp"
#include "vclemma/offline/synthesizer.hpp"

namespace vclemma {

// Everything the offline phase hands to the proof agent.
// Schema "vclemma.bundle", version 1.
struct OfflineBundle {
  std::optional<SemanticsAwareVC> phi_a;  // absent when the analyzer was
                                          // skipped or exhausted its retries
  std::vector<HelperLemma> lemmas;        // status checked or discarded
  ProofPlan plan;                         // steps reference checked lemmas only
  int psa_attempts = 0;
  bool degraded_no_psa = false;
  TokenUsage offline_usage;
  std::vector<std::string> notes;
};

// Filters the plan down to checked lemmas and packages the bundle.
OfflineBundle assemble_bundle(std::optional<SemanticsAwareVC> phi_a,
                              std::vector<HelperLemma> lemmas, ProofPlan plan);

void save_bundle(const OfflineBundle& bundle, const std::filesystem::path& path);
OfflineBundle load_bundle(const std::filesystem::path& path);

struct OfflinePipelineOptions {
  bool no_psa = false;  // skip the semantic analyzer stage entirely
  int psa_max_attempts = 3;
  std::chrono::milliseconds sentence_timeout{30000};
};

// slice -> semantic analysis -> lemma synthesis -> pruning -> bundle.
OfflineBundle run_offline_pipeline(const VerificationTask& task, LlmClient& llm,
                                   const BackendFactory& prover_factory,
                                   const OfflinePipelineOptions& options = {});

}  // namespace vclemma

#endif  // VCLEMMA_OFFLINE_BUNDLE_HPP_
