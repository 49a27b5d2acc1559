#ifndef VCLEMMA_AGENT_LIBRARY_HPP_
#define VCLEMMA_AGENT_LIBRARY_HPP_

#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "vclemma/core/types.hpp"

namespace vclemma {

// The adaptive lemma corpus offered to the proof agent. Entries keep their
// insertion order; each carries an imported or conflict marker, where
// conflict means the most recent application attempt was rejected by the
// prover and a later accepted application clears it again.
class LemmaLibrary {
 public:
  static constexpr std::size_t kDefaultListingCap = 50;

  // Stores a checked lemma and returns the name it was stored under: the
  // lemma's own name, or a numbered variant when that name is taken.
  // Discarded or unchecked lemmas are refused.
  std::string add(HelperLemma lemma);

  bool contains(const std::string& name) const;
  const HelperLemma* find(const std::string& name) const;
  const std::vector<HelperLemma>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }

  void mark_conflict(const std::string& name);
  void clear_conflict(const std::string& name);
  bool conflicted(const std::string& name) const;

  // position: index of the applying sentence in the proof script.
  void log_usage(const std::string& name, int position);
  const std::vector<std::pair<std::string, int>>& usage_log() const {
    return usage_log_;
  }

  // Annotated listing in insertion order, one lemma per line, truncated to
  // cap entries with an explicit elision note.
  std::string listing(std::size_t cap = kDefaultListingCap) const;

 private:
  std::vector<HelperLemma> entries_;
  std::map<std::string, std::size_t> index_;
  std::set<std::string> conflicts_;
  std::vector<std::pair<std::string, int>> usage_log_;
};

}  // namespace vclemma

#endif  // VCLEMMA_AGENT_LIBRARY_HPP_
