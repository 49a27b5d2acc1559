#include "vclemma/offline/slicer.hpp"

#include <cctype>
#include <sstream>
#include <vector>

namespace vclemma {

namespace {

struct Item {
  enum Kind { annotation, type_def, preprocessor, function_def, declaration };
  Kind kind;
  std::string name;       // declared identifier when recognizable
  int start_line, end_line;  // 1-based, inclusive
  int attached_annotation = -1;  // index of the annotation item, or -1
  std::string text;
};

bool is_blank(const std::string& line) {
  for (char c : line)
    if (!std::isspace(static_cast<unsigned char>(c))) return false;
  return true;
}

bool is_ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

// Identifier tokens of a C fragment, comments and strings skipped.
std::set<std::string> c_identifiers(const std::string& text) {
  std::set<std::string> out;
  std::size_t i = 0;
  const std::size_t n = text.size();
  while (i < n) {
    char c = text[i];
    if (c == '/' && i + 1 < n && text[i + 1] == '/') {
      while (i < n && text[i] != '\n') ++i;
      continue;
    }
    if (c == '/' && i + 1 < n && text[i + 1] == '*') {
      i += 2;
      while (i + 1 < n && !(text[i] == '*' && text[i + 1] == '/')) ++i;
      i = (i + 1 < n) ? i + 2 : n;
      continue;
    }
    if (c == '"' || c == '\'') {
      char quote = c;
      ++i;
      while (i < n && text[i] != quote) {
        if (text[i] == '\\') ++i;
        ++i;
      }
      ++i;
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < n && is_ident_char(text[j])) ++j;
      out.insert(text.substr(i, j - i));
      i = j;
      continue;
    }
    ++i;
  }
  return out;
}

// Name introduced by a top-level declaration: the identifier right before
// '(' for functions/prototypes, the last identifier before ';' for typedefs
// and variables.
std::string declared_c_name(const std::string& text, Item::Kind kind) {
  auto ident_ending_at = [&](std::size_t end) -> std::string {
    std::size_t e = end;
    while (e > 0 && std::isspace(static_cast<unsigned char>(text[e - 1]))) --e;
    std::size_t b = e;
    while (b > 0 && is_ident_char(text[b - 1])) --b;
    return text.substr(b, e - b);
  };
  if (kind == Item::function_def || kind == Item::declaration) {
    std::size_t paren = text.find('(');
    if (paren != std::string::npos) {
      std::string name = ident_ending_at(paren);
      if (!name.empty()) return name;
    }
  }
  std::size_t semi = text.find(';');
  if (semi == std::string::npos) semi = text.size();
  std::size_t e = semi;
  while (e > 0 && std::isspace(static_cast<unsigned char>(text[e - 1]))) --e;
  if (e > 0 && text[e - 1] == ']') {  // array declarator: step over [...]
    std::size_t open = text.rfind('[', e - 1);
    if (open != std::string::npos) e = open;
  }
  return ident_ending_at(e);
}

std::vector<Item> scan_items(const std::vector<std::string>& lines) {
  std::vector<Item> items;
  int depth = 0;
  int item_start = -1;
  std::string item_text;
  bool in_block_annotation = false;
  bool annotation_is_acsl = false;

  auto flush_item = [&](int end_line, Item::Kind kind) {
    Item it;
    it.kind = kind;
    it.start_line = item_start;
    it.end_line = end_line;
    it.text = item_text;
    it.name = (kind == Item::annotation || kind == Item::preprocessor)
                  ? ""
                  : declared_c_name(item_text, kind);
    items.push_back(std::move(it));
    item_start = -1;
    item_text.clear();
  };

  for (int ln = 1; ln <= static_cast<int>(lines.size()); ++ln) {
    const std::string& line = lines[ln - 1];

    if (in_block_annotation) {
      item_text += line + "\n";
      if (line.find("*/") != std::string::npos) {
        flush_item(ln, annotation_is_acsl ? Item::annotation : Item::preprocessor);
        in_block_annotation = false;
      }
      continue;
    }

    if (depth == 0 && item_start < 0) {
      if (is_blank(line)) continue;
      std::size_t first = line.find_first_not_of(" \t");
      // single-line ACSL annotation
      if (line.compare(first, 3, "//@") == 0) {
        item_start = ln;
        item_text = line + "\n";
        flush_item(ln, Item::annotation);
        continue;
      }
      // block comment opener; "/*@" marks an annotation
      if (line.compare(first, 2, "/*") == 0) {
        item_start = ln;
        item_text = line + "\n";
        annotation_is_acsl = line.compare(first, 3, "/*@") == 0;
        if (line.find("*/", first + 2) != std::string::npos) {
          flush_item(ln, annotation_is_acsl ? Item::annotation : Item::preprocessor);
        } else {
          in_block_annotation = true;
        }
        continue;
      }
      if (line[first] == '#') {
        item_start = ln;
        item_text = line + "\n";
        flush_item(ln, Item::preprocessor);
        continue;
      }
      item_start = ln;
      item_text.clear();
    }

    if (item_start < 0) continue;
    item_text += line + "\n";
    for (char c : line) {
      if (c == '{') ++depth;
      if (c == '}') --depth;
    }
    if (depth > 0) continue;

    // at depth 0 again: the item ends at a ';' or at the '}' that closed it
    bool had_brace = item_text.find('{') != std::string::npos;
    std::size_t semi = line.rfind(';');
    std::size_t brace = line.rfind('}');
    if (had_brace && brace != std::string::npos &&
        (semi == std::string::npos || brace > semi)) {
      flush_item(ln, Item::function_def);
    } else if (semi != std::string::npos) {
      bool is_type = item_text.find("typedef") != std::string::npos ||
                     item_text.compare(0, 6, "struct") == 0 ||
                     item_text.compare(0, 5, "union") == 0 ||
                     item_text.compare(0, 4, "enum") == 0;
      flush_item(ln, is_type ? Item::type_def : Item::declaration);
    }
  }
  if (item_start >= 0)
    flush_item(static_cast<int>(lines.size()),
               in_block_annotation ? Item::annotation : Item::declaration);

  // attach each annotation to the item starting on the following line
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (items[i].kind != Item::annotation) continue;
    for (std::size_t j = 0; j < items.size(); ++j) {
      if (items[j].kind == Item::annotation) continue;
      if (items[j].start_line == items[i].end_line + 1) {
        items[j].attached_annotation = static_cast<int>(i);
        break;
      }
    }
  }
  return items;
}

}  // namespace

SliceResult slice_program(const std::string& annotated_source,
                          const SourceLocation& property_location) {
  std::vector<std::string> lines;
  {
    std::istringstream in(annotated_source);
    std::string line;
    while (std::getline(in, line)) lines.push_back(line);
  }

  SliceResult result;
  result.anchor = property_location;

  auto items = scan_items(lines);

  auto whole_file = [&] {
    result.sliced_source = annotated_source;
    result.whole_file_fallback = true;
    for (int ln = 1; ln <= static_cast<int>(lines.size()); ++ln)
      result.retained_lines.insert(ln);
    return result;
  };

  // the function whose span (with attached contract) covers the anchor
  const int anchor = property_location.line;
  int enclosing = -1;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (items[i].kind != Item::function_def) continue;
    int start = items[i].start_line;
    if (items[i].attached_annotation >= 0)
      start = items[items[i].attached_annotation].start_line;
    if (anchor >= start && anchor <= items[i].end_line) {
      enclosing = static_cast<int>(i);
      break;
    }
  }
  if (enclosing < 0) return whole_file();

  result.enclosing_function = items[enclosing].name;

  std::set<std::size_t> keep;
  keep.insert(static_cast<std::size_t>(enclosing));

  std::string reference_text = items[enclosing].text;
  if (items[enclosing].attached_annotation >= 0)
    reference_text += items[items[enclosing].attached_annotation].text;
  auto referenced = c_identifiers(reference_text);

  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i == static_cast<std::size_t>(enclosing)) continue;
    switch (items[i].kind) {
      case Item::type_def:
      case Item::preprocessor:
        keep.insert(i);
        break;
      case Item::function_def:
      case Item::declaration:
        if (!items[i].name.empty() && referenced.count(items[i].name))
          keep.insert(i);
        break;
      case Item::annotation:
        break;  // kept only through attachment
    }
  }

  std::set<int> retained;
  for (std::size_t i : keep) {
    for (int ln = items[i].start_line; ln <= items[i].end_line; ++ln)
      retained.insert(ln);
    if (items[i].attached_annotation >= 0) {
      const Item& ann = items[items[i].attached_annotation];
      for (int ln = ann.start_line; ln <= ann.end_line; ++ln)
        retained.insert(ln);
    }
  }

  if (!retained.count(anchor)) return whole_file();

  std::string sliced;
  for (int ln = 1; ln <= static_cast<int>(lines.size()); ++ln) {
    if (retained.count(ln))
      sliced += lines[ln - 1];
    else if (!is_blank(lines[ln - 1]))
      sliced += "/* elided */";
    sliced += "\n";
  }

  result.sliced_source = std::move(sliced);
  result.retained_lines = std::move(retained);
  return result;
}

}  // namespace vclemma
