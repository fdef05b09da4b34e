#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace convrec::text {

std::string to_lower(std::string_view s);
std::string trim(std::string_view s);
std::vector<std::string> split_lines(std::string_view s);
std::string replace_all(std::string s, std::string_view from, std::string_view to);
std::string join(const std::vector<std::string>& parts, std::string_view sep);

// Corpus tokenization rule: ASCII case folding, split on whitespace and
// punctuation, punctuation dropped. Stamped into metric reports as
// "lower+alnum-split".
inline constexpr const char* kTokenizerTag = "lower+alnum-split";
std::vector<std::string> tokenize(std::string_view s);

// Plain whitespace split (no folding, no punctuation handling).
std::vector<std::string> whitespace_tokens(std::string_view s);

// n-grams of a token sequence, each joined with a single space.
std::vector<std::string> ngrams(const std::vector<std::string>& tokens, int n);

// Jaccard similarity of the two token sequences' n-gram sets. Returns 0
// when either set is empty.
double ngram_jaccard(const std::vector<std::string>& a,
                     const std::vector<std::string>& b, int n);

// Case fold, strip one trailing parenthesized year, collapse punctuation
// runs to single spaces. "Fury (2014)" -> "fury".
std::string normalize_title(std::string_view title);

// Case fold, collapse punctuation and whitespace runs to single spaces.
std::string normalize_for_match(std::string_view s);

// Whether `phrase` occurs in `hay` on token boundaries; both arguments must
// already be normalized.
bool contains_phrase(std::string_view hay, std::string_view phrase);

// A liked or disliked feature mentioned in free text, as detected by the
// marker-word scan shared by the mock NLI scorer and its tests.
struct PolarityPhrase {
  bool positive = true;
  std::string phrase;  // normalized tokens joined with spaces

  bool operator==(const PolarityPhrase&) const = default;
};

std::vector<PolarityPhrase> extract_polarity_phrases(std::string_view s);

}  // namespace convrec::text
