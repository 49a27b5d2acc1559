#ifndef VCLEMMA_OFFLINE_SLICER_HPP_
#define VCLEMMA_OFFLINE_SLICER_HPP_

#include <set>
#include <string>

#include "vclemma/core/types.hpp"

namespace vclemma {

// Outcome of slicing an annotated C file around one property location.
// sliced_source has exactly as many lines as the input: retained lines are
// verbatim, elided code lines are replaced by an "/* elided */" marker and
// elided blank lines stay blank, so line numbers keep their meaning.
struct SliceResult {
  std::string sliced_source;
  std::set<int> retained_lines;  // 1-based, subset of the file's lines
  SourceLocation anchor;
  std::string enclosing_function;  // empty when no function contains anchor
  bool whole_file_fallback = false;
};

// Syntactic slice: keeps the function enclosing the anchor line together
// with its attached annotation block, every file-scope type definition and
// preprocessor line, and the top-level declaration of each identifier the
// function references directly (with those declarations' own annotations).
// An anchor outside any function falls back to the whole file and raises
// whole_file_fallback.
SliceResult slice_program(const std::string& annotated_source,
                          const SourceLocation& property_location);

}  // namespace vclemma

#endif  // VCLEMMA_OFFLINE_SLICER_HPP_
