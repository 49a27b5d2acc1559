#include "vclemma/agent/library.hpp"

#include <stdexcept>

#include "vclemma/core/text.hpp"

namespace vclemma {

std::string LemmaLibrary::add(HelperLemma lemma) {
  if (lemma.status != LemmaStatus::checked)
    throw std::invalid_argument("lemma '" + lemma.name +
                                "' is not checked, refusing to store it");
  std::string stored = lemma.name;
  for (int k = 2; index_.count(stored); ++k)
    stored = lemma.name + "_" + std::to_string(k);
  if (stored != lemma.name) {
    std::size_t at = lemma.statement.find(lemma.name);
    if (at != std::string::npos)
      lemma.statement.replace(at, lemma.name.size(), stored);
  }
  lemma.name = stored;
  index_.emplace(stored, entries_.size());
  entries_.push_back(std::move(lemma));
  return stored;
}

bool LemmaLibrary::contains(const std::string& name) const {
  return index_.count(name) > 0;
}

const HelperLemma* LemmaLibrary::find(const std::string& name) const {
  auto it = index_.find(name);
  return it == index_.end() ? nullptr : &entries_[it->second];
}

void LemmaLibrary::mark_conflict(const std::string& name) {
  if (index_.count(name)) conflicts_.insert(name);
}

void LemmaLibrary::clear_conflict(const std::string& name) {
  conflicts_.erase(name);
}

bool LemmaLibrary::conflicted(const std::string& name) const {
  return conflicts_.count(name) > 0;
}

void LemmaLibrary::log_usage(const std::string& name, int position) {
  usage_log_.emplace_back(name, position);
}

std::string LemmaLibrary::listing(std::size_t cap) const {
  std::string out;
  std::size_t shown = 0;
  for (const auto& lemma : entries_) {
    if (shown == cap) {
      out += "(* " + std::to_string(entries_.size() - shown) +
             " further lemmas elided *)\n";
      break;
    }
    out += normalize_ws(lemma.statement) + " Proof...Qed. " +
           (conflicted(lemma.name) ? "(* conflict *)" : "(* imported *)") +
           "\n";
    ++shown;
  }
  return out;
}

}  // namespace vclemma
