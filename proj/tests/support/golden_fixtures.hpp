#ifndef VCLEMMA_TESTS_SUPPORT_GOLDEN_FIXTURES_HPP_
#define VCLEMMA_TESTS_SUPPORT_GOLDEN_FIXTURES_HPP_

#include <filesystem>
#include <vector>

namespace vclemma {

// Runs the full pipeline on the hex2bin fixture (read from fixture_dir)
// against a scripted model and the mock prover, recording the exchange as a
// replayable cassette plus rendered-prompt snapshots under out_dir. Throws if
// the pipeline does not reach a proved outcome with both helper lemmas.
// Returns the paths written, relative to out_dir.
std::vector<std::filesystem::path> write_golden_fixtures(
    const std::filesystem::path& fixture_dir,
    const std::filesystem::path& out_dir);

}  // namespace vclemma

#endif  // VCLEMMA_TESTS_SUPPORT_GOLDEN_FIXTURES_HPP_
