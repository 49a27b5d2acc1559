#include <algorithm>
#include <cctype>
#include <stdexcept>
#include <string>
#include <vector>

#include "vclemma/bench/bench.hpp"

namespace vclemma {

namespace {

std::string lowered(const std::string& text) {
  std::string out = text;
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return out;
}

bool contains_any(const std::string& haystack,
                  std::initializer_list<const char*> needles) {
  for (const char* n : needles)
    if (haystack.find(n) != std::string::npos) return true;
  return false;
}

struct CategoryRule {
  LemmaCategory category;
  std::vector<const char*> keywords;
};

const std::vector<CategoryRule>& category_table() {
  static const std::vector<CategoryRule> table = {
      {LemmaCategory::memory, {"addr", "base", "ptr", "mem"}},
      {LemmaCategory::simplification, {"simpl", "rewrite", "split"}},
      {LemmaCategory::typing,
       {"uint32", "float", "int_max", "uint16", "int32", "isint"}},
      {LemmaCategory::arithmetic, {"mul", "div", "mod", "lxor", "add", "sub"}},
      {LemmaCategory::data_structure, {"array", "list", "heap", "map"}},
      {LemmaCategory::string_ops, {"str", "char", "tolower"}},
  };
  return table;
}

// Equal, or the keyword plus a digit tail: isint32 matches isint, strict
// does not match str.
bool fragment_matches(const std::string& fragment, const std::string& keyword) {
  if (fragment == keyword) return true;
  if (fragment.size() <= keyword.size()) return false;
  if (fragment.compare(0, keyword.size(), keyword) != 0) return false;
  return std::all_of(fragment.begin() + keyword.size(), fragment.end(),
                     [](unsigned char c) { return std::isdigit(c); });
}

std::vector<std::string> name_fragments(const std::string& name) {
  std::vector<std::string> fragments;
  std::string current;
  for (char c : lowered(name)) {
    if (std::isalnum(static_cast<unsigned char>(c))) {
      current.push_back(c);
    } else if (!current.empty()) {
      fragments.push_back(current);
      current.clear();
    }
  }
  if (!current.empty()) fragments.push_back(current);
  return fragments;
}

}  // namespace

const char* to_string(PropertyType t) {
  switch (t) {
    case PropertyType::loop:
      return "loop";
    case PropertyType::rte:
      return "rte";
    case PropertyType::assertion:
      return "assertion";
    case PropertyType::contract:
      return "contract";
  }
  return "contract";
}

std::optional<PropertyType> property_type_from_string(const std::string& s) {
  if (s == "loop") return PropertyType::loop;
  if (s == "rte") return PropertyType::rte;
  if (s == "assertion") return PropertyType::assertion;
  if (s == "contract") return PropertyType::contract;
  return std::nullopt;
}

PropertyType classify_property(const std::string& annotation,
                               std::string* warning) {
  std::string a = lowered(annotation);
  if (contains_any(a, {"loop invariant", "loop variant", "loop assigns"}))
    return PropertyType::loop;
  if (contains_any(a, {"overflow", "rte", "valid", "division", "initialized",
                       "dangling", "null", "bound"}))
    return PropertyType::rte;
  if (a.find("assert") != std::string::npos) return PropertyType::assertion;
  if (contains_any(a, {"requires", "ensures", "assigns", "disjoint",
                       "complete", "behavior"}))
    return PropertyType::contract;
  if (warning)
    *warning = "no classification keyword in annotation, defaulting to contract";
  return PropertyType::contract;
}

const char* to_string(LemmaCategory c) {
  switch (c) {
    case LemmaCategory::memory:
      return "Memory";
    case LemmaCategory::simplification:
      return "Simplification";
    case LemmaCategory::typing:
      return "Typing";
    case LemmaCategory::arithmetic:
      return "Arithmetic";
    case LemmaCategory::data_structure:
      return "Data Structure";
    case LemmaCategory::string_ops:
      return "String";
    case LemmaCategory::others:
      return "Others";
  }
  return "Others";
}

LemmaCategory categorize_lemma(const std::string& name) {
  std::vector<std::string> fragments = name_fragments(name);
  // keywords spanning an underscore are matched on joined fragment pairs
  std::vector<std::string> pairs;
  for (std::size_t i = 0; i + 1 < fragments.size(); ++i)
    pairs.push_back(fragments[i] + "_" + fragments[i + 1]);

  for (const CategoryRule& rule : category_table()) {
    for (const char* kw : rule.keywords) {
      const std::string keyword = kw;
      const auto& pool =
          keyword.find('_') != std::string::npos ? pairs : fragments;
      for (const std::string& candidate : pool)
        if (fragment_matches(candidate, keyword)) return rule.category;
    }
  }
  return LemmaCategory::others;
}

std::vector<std::string> bucket_labels(const std::vector<int>& edges) {
  if (edges.empty()) throw std::invalid_argument("bucket edges are empty");
  for (std::size_t i = 0; i < edges.size(); ++i) {
    if (edges[i] < 0 || (i > 0 && edges[i] <= edges[i - 1]))
      throw std::invalid_argument("bucket edges must be strictly increasing");
  }
  std::vector<std::string> labels;
  int lo = 0;
  for (int e : edges) {
    labels.push_back(std::to_string(lo) + "-" + std::to_string(e));
    lo = e + 1;
  }
  labels.push_back(std::to_string(edges.back()) + "+");
  return labels;
}

int bucket_index(int term_count, const std::vector<int>& edges) {
  if (edges.empty()) throw std::invalid_argument("bucket edges are empty");
  for (std::size_t i = 0; i < edges.size(); ++i)
    if (term_count <= edges[i]) return static_cast<int>(i);
  return static_cast<int>(edges.size());
}

std::string bucket_complexity(int term_count, const std::vector<int>& edges) {
  return bucket_labels(edges)[static_cast<std::size_t>(
      bucket_index(term_count, edges))];
}

}  // namespace vclemma
