#ifndef VCLEMMA_CORE_TRANSCRIPT_HPP_
#define VCLEMMA_CORE_TRANSCRIPT_HPP_

#include <filesystem>
#include <string>

#include "vclemma/core/types.hpp"

namespace vclemma {

// Transcript serialization, JSON Lines. The first line is a header object
// {"schema":"vclemma.transcript","version":1,"task_id":...}; each following
// line is one event. The outcome and final script travel in a trailer line
// {"outcome":...,"final_script":...} so a truncated file is detectable.
std::string transcript_to_jsonl(const ProofTranscript& t);
ProofTranscript transcript_from_jsonl(const std::string& jsonl);

void save_transcript(const ProofTranscript& t, const std::filesystem::path& path);
ProofTranscript load_transcript(const std::filesystem::path& path);

}  // namespace vclemma

#endif  // VCLEMMA_CORE_TRANSCRIPT_HPP_
