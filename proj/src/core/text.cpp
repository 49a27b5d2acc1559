#include "vclemma/core/text.hpp"

#include <algorithm>
#include <cctype>

namespace vclemma {

namespace {

bool is_ident_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}

bool is_ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'';
}

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)); }

// Symbol characters that form operator tokens. ':' participates so that
// ":=" and "::" lex as single tokens; a bare ":" is demoted to punctuation.
bool is_symbol_char(char c) {
  static const std::string kSymbols = "+-*/=<>~&|\\^%!?@$#:";
  return kSymbols.find(c) != std::string::npos;
}

bool is_binder_keyword(const std::string& s) {
  return s == "forall" || s == "exists" || s == "fun" || s == "let";
}

}  // namespace

std::vector<Sentence> split_sentences(std::string_view text) {
  std::vector<Sentence> out;
  std::size_t start = 0;
  int comment_depth = 0;
  bool in_string = false;
  std::size_t opener_at = 0;  // position of the unmatched comment/string opener
  std::size_t last_code = std::string_view::npos;  // last non-trivia byte seen

  const std::size_t n = text.size();
  for (std::size_t i = 0; i < n; ++i) {
    char c = text[i];
    if (comment_depth > 0) {
      if (in_string) {
        if (c == '"') in_string = false;
        continue;
      }
      if (c == '"') {
        in_string = true;
      } else if (c == '(' && i + 1 < n && text[i + 1] == '*') {
        ++comment_depth;
        ++i;
      } else if (c == '*' && i + 1 < n && text[i + 1] == ')') {
        --comment_depth;
        ++i;
      }
      continue;
    }
    if (in_string) {
      if (c == '"') {
        if (i + 1 < n && text[i + 1] == '"') {
          ++i;  // doubled quote stays inside the string
        } else {
          in_string = false;
        }
      }
      continue;
    }
    if (c == '(' && i + 1 < n && text[i + 1] == '*') {
      comment_depth = 1;
      opener_at = i;
      ++i;
      continue;
    }
    if (c == '"') {
      in_string = true;
      opener_at = i;
      continue;
    }
    if (!is_space(c)) last_code = i;
    if (c == '.') {
      bool at_end = (i + 1 == n);
      if (at_end || is_space(text[i + 1])) {
        out.push_back({std::string(text.substr(start, i + 1 - start)), start});
        start = i + 1;
        last_code = std::string_view::npos;
      }
    }
  }

  if (comment_depth > 0)
    throw TextParseError("unterminated comment", opener_at);
  if (in_string) throw TextParseError("unterminated string", opener_at);

  if (start < n) {
    std::string tail(text.substr(start));
    if (last_code == std::string_view::npos && !out.empty()) {
      out.back().text += tail;  // pure trivia stays with the last sentence
    } else {
      out.push_back({std::move(tail), start});
    }
  }
  return out;
}

std::string join_sentences(const std::vector<Sentence>& sentences) {
  std::string out;
  for (const auto& s : sentences) out += s.text;
  return out;
}

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> out;
  const std::size_t n = text.size();
  std::size_t i = 0;
  while (i < n) {
    char c = text[i];
    if (is_space(c)) {
      ++i;
      continue;
    }
    if (c == '(' && i + 1 < n && text[i + 1] == '*') {
      int depth = 1;
      i += 2;
      while (i < n && depth > 0) {
        if (text[i] == '(' && i + 1 < n && text[i + 1] == '*') {
          ++depth;
          i += 2;
        } else if (text[i] == '*' && i + 1 < n && text[i + 1] == ')') {
          --depth;
          i += 2;
        } else {
          ++i;
        }
      }
      continue;
    }
    if (c == '"') {
      std::size_t j = i + 1;
      std::string lit;
      while (j < n) {
        if (text[j] == '"') {
          if (j + 1 < n && text[j + 1] == '"') {
            lit += '"';
            j += 2;
            continue;
          }
          break;
        }
        lit += text[j];
        ++j;
      }
      out.push_back({TokenKind::string_lit, lit});
      i = (j < n) ? j + 1 : n;
      continue;
    }
    if (is_ident_start(c)) {
      std::size_t j = i;
      while (j < n && is_ident_char(text[j])) ++j;
      std::string word(text.substr(i, j - i));
      out.push_back({is_binder_keyword(word) ? TokenKind::binder : TokenKind::ident,
                     std::move(word)});
      i = j;
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < n && std::isalnum(static_cast<unsigned char>(text[j]))) ++j;
      out.push_back({TokenKind::number, std::string(text.substr(i, j - i))});
      i = j;
      continue;
    }
    if (is_symbol_char(c)) {
      std::size_t j = i;
      while (j < n && is_symbol_char(text[j])) ++j;
      std::string sym(text.substr(i, j - i));
      out.push_back({sym == ":" ? TokenKind::punct : TokenKind::op, std::move(sym)});
      i = j;
      continue;
    }
    out.push_back({TokenKind::punct, std::string(1, c)});
    ++i;
  }
  return out;
}

int count_terms(std::string_view statement_text) {
  int count = 0;
  for (const auto& t : tokenize(statement_text)) {
    switch (t.kind) {
      case TokenKind::ident:
      case TokenKind::number:
      case TokenKind::string_lit:
      case TokenKind::op:
      case TokenKind::binder:
        ++count;
        break;
      case TokenKind::punct:
        break;
    }
  }
  return count;
}

std::string strip_comments(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  const std::size_t n = text.size();
  int depth = 0;
  bool in_string = false;
  for (std::size_t i = 0; i < n; ++i) {
    char c = text[i];
    if (depth > 0) {
      if (in_string) {
        if (c == '"') in_string = false;
      } else if (c == '"') {
        in_string = true;
      } else if (c == '(' && i + 1 < n && text[i + 1] == '*') {
        ++depth;
        ++i;
      } else if (c == '*' && i + 1 < n && text[i + 1] == ')') {
        --depth;
        ++i;
      }
      continue;
    }
    if (in_string) {
      out += c;
      if (c == '"' && !(i + 1 < n && text[i + 1] == '"')) in_string = false;
      continue;
    }
    if (c == '(' && i + 1 < n && text[i + 1] == '*') {
      depth = 1;
      ++i;
      continue;
    }
    if (c == '"') in_string = true;
    out += c;
  }
  return out;
}

std::string first_token(std::string_view sentence) {
  for (const auto& t : tokenize(sentence)) {
    if (t.kind == TokenKind::ident || t.kind == TokenKind::binder) return t.text;
    if (t.kind != TokenKind::punct) return "";
  }
  return "";
}

bool is_goal_opener(std::string_view sentence) {
  std::string tok = first_token(sentence);
  return tok == "Lemma" || tok == "Theorem" || tok == "Fact" || tok == "Remark" ||
         tok == "Corollary" || tok == "Proposition" || tok == "Example";
}

bool is_proof_terminator(std::string_view sentence) {
  std::string tok = first_token(sentence);
  return tok == "Qed" || tok == "Defined" || tok == "Admitted" || tok == "Abort";
}

bool is_assumption_decl(std::string_view sentence) {
  std::string tok = first_token(sentence);
  return tok == "Axiom" || tok == "Axioms" || tok == "Parameter" ||
         tok == "Parameters" || tok == "Hypothesis" || tok == "Hypotheses" ||
         tok == "Variable" || tok == "Variables" || tok == "Conjecture";
}

std::string declared_name(std::string_view sentence) {
  auto tokens = tokenize(sentence);
  for (std::size_t i = 0; i + 1 < tokens.size(); ++i) {
    if (tokens[i].kind == TokenKind::ident) {
      // first ident is the keyword, second is the declared name
      if (tokens[i + 1].kind == TokenKind::ident) return tokens[i + 1].text;
      return "";
    }
    if (tokens[i].kind != TokenKind::punct) return "";
  }
  return "";
}

std::vector<HelperLemma> extract_lemma_blocks(std::string_view file_text) {
  std::vector<HelperLemma> drafts;
  auto sentences = split_sentences(file_text);

  HelperLemma current;
  bool open = false;

  auto close_current = [&](bool terminated) {
    if (!open) return;
    current.status = terminated ? LemmaStatus::unchecked : LemmaStatus::conflict;
    drafts.push_back(std::move(current));
    current = HelperLemma{};
    open = false;
  };

  for (const auto& s : sentences) {
    if (is_goal_opener(s.text)) {
      close_current(false);
      current.name = declared_name(s.text);
      current.statement = normalize_ws(s.text);
      open = true;
      continue;
    }
    if (!open) continue;
    if (!current.proof.empty()) current.proof += "\n";
    current.proof += normalize_ws(s.text);
    if (is_proof_terminator(s.text)) close_current(true);
  }
  close_current(false);

  // Dependency edges: earlier draft names occurring as tokens in this draft.
  for (std::size_t i = 0; i < drafts.size(); ++i) {
    auto tokens = tokenize(drafts[i].statement + "\n" + drafts[i].proof);
    for (std::size_t j = 0; j < i; ++j) {
      const std::string& dep = drafts[j].name;
      if (dep.empty() || dep == drafts[i].name) continue;
      bool found = false;
      for (const auto& t : tokens) {
        if (t.kind == TokenKind::ident && t.text == dep) {
          found = true;
          break;
        }
      }
      if (found) drafts[i].depends_on.push_back(dep);
    }
  }
  return drafts;
}

ProofTargetedVC parse_goal_file(std::string_view goal_file_text) {
  auto sentences = split_sentences(goal_file_text);

  // Find goal openers that are never closed by a proof terminator.
  struct OpenGoal {
    std::size_t sentence_index;
    std::size_t offset;
  };
  std::vector<OpenGoal> unproved;
  bool open = false;
  std::size_t open_at = 0, open_off = 0;
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    const auto& s = sentences[i];
    if (is_goal_opener(s.text)) {
      if (open) unproved.push_back({open_at, open_off});
      open = true;
      open_at = i;
      open_off = s.offset;
      continue;
    }
    if (open && is_proof_terminator(s.text)) open = false;
  }
  if (open) unproved.push_back({open_at, open_off});

  if (unproved.empty())
    throw std::runtime_error("goal file contains no unproved goal statement");
  if (unproved.size() > 1)
    throw std::runtime_error("goal file contains more than one unproved goal");

  const auto& g = unproved.front();
  ProofTargetedVC vc;
  vc.preamble_text = std::string(goal_file_text.substr(0, g.offset));
  vc.statement_text = normalize_ws(sentences[g.sentence_index].text);
  vc.term_count = count_terms(vc.statement_text);
  return vc;
}

std::string normalize_ws(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool pending_space = false;
  bool started = false;
  for (char c : text) {
    if (is_space(c)) {
      pending_space = started;
      continue;
    }
    if (pending_space) out += ' ';
    pending_space = false;
    started = true;
    out += c;
  }
  return out;
}

}  // namespace vclemma
