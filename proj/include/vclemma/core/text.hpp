#ifndef VCLEMMA_CORE_TEXT_HPP_
#define VCLEMMA_CORE_TEXT_HPP_

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "vclemma/core/types.hpp"

namespace vclemma {

// Raised on malformed prover text (unterminated comment or string). offset is
// the byte position of the offending opener.
class TextParseError : public std::runtime_error {
 public:
  TextParseError(std::string what, std::size_t offset)
      : std::runtime_error(std::move(what)), offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

// One prover sentence: an exact slice of the input ending at a statement
// terminator ('.' followed by whitespace or end of input, outside comments
// and strings). Leading trivia belongs to the sentence it precedes.
struct Sentence {
  std::string text;
  std::size_t offset = 0;  // byte offset of the slice start
};

// Concatenating the returned texts reproduces the input byte for byte.
// Trailing trivia after the last terminator is appended to the last
// sentence; trailing code without a terminator becomes a final sentence.
std::vector<Sentence> split_sentences(std::string_view file_text);

// Convenience: re-join sentences (round-trip partner of split_sentences).
std::string join_sentences(const std::vector<Sentence>& sentences);

enum class TokenKind { ident, number, string_lit, op, punct, binder };

struct Token {
  TokenKind kind;
  std::string text;
};

// Comment-skipping tokenizer over prover text. Total: any byte sequence
// yields a token list (unterminated comments/strings are tolerated here and
// consume the rest of the input).
std::vector<Token> tokenize(std::string_view text);

// Term complexity of a statement: identifiers, literals and operator tokens
// each count one, plus one per binder keyword (forall/exists/fun/let).
// Punctuation and comments do not count.
int count_terms(std::string_view statement_text);

// Returns text with all (* ... *) comments removed (strings preserved).
std::string strip_comments(std::string_view text);

// Decompose a prover file into top-level lemma/theorem blocks. A block is the
// statement sentence plus every following sentence through the first proof
// terminator (Qed/Defined/Admitted/Abort). A block that runs into the end of
// file, or into the next block, without a terminator is kept with
// status = conflict. depends_on lists names of earlier blocks in the same
// file that occur as identifier tokens in the block's statement or proof.
std::vector<HelperLemma> extract_lemma_blocks(std::string_view file_text);

// True if the sentence's first token opens a lemma/theorem block.
bool is_goal_opener(std::string_view sentence);
// True if the sentence's first token ends a proof (Qed/Defined/Admitted/Abort).
bool is_proof_terminator(std::string_view sentence);
// True if the sentence's first token introduces an assumption without proof
// (Axiom/Parameter/Hypothesis/Variable/Conjecture and plural forms).
bool is_assumption_decl(std::string_view sentence);
// First identifier-like token of the sentence, skipping comments. Empty if none.
std::string first_token(std::string_view sentence);
// Name declared by a sentence like "Lemma foo : ..." or "Definition foo ...".
// Empty if the sentence does not declare a name.
std::string declared_name(std::string_view sentence);

// Splits a goal file into preamble + the single unproved goal statement.
// Throws std::runtime_error when the file has no unproved goal or more than
// one.
ProofTargetedVC parse_goal_file(std::string_view goal_file_text);

// Collapses whitespace runs to single spaces and trims both ends. Used for
// stable comparison of sentences and goal texts.
std::string normalize_ws(std::string_view text);

}  // namespace vclemma

#endif  // VCLEMMA_CORE_TEXT_HPP_
