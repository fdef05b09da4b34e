#include "convrec/text.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <unordered_set>

namespace convrec::text {

namespace {

bool is_word_char(unsigned char c) { return std::isalnum(c) != 0; }

char fold(unsigned char c) { return static_cast<char>(std::tolower(c)); }

}  // namespace

std::string to_lower(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (unsigned char c : s) out.push_back(fold(c));
  return out;
}

std::string trim(std::string_view s) {
  std::size_t begin = 0;
  std::size_t end = s.size();
  while (begin < end && std::isspace(static_cast<unsigned char>(s[begin]))) ++begin;
  while (end > begin && std::isspace(static_cast<unsigned char>(s[end - 1]))) --end;
  return std::string(s.substr(begin, end - begin));
}

std::vector<std::string> split_lines(std::string_view s) {
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start <= s.size()) {
    std::size_t nl = s.find('\n', start);
    if (nl == std::string_view::npos) {
      lines.emplace_back(s.substr(start));
      break;
    }
    lines.emplace_back(s.substr(start, nl - start));
    start = nl + 1;
  }
  return lines;
}

std::string replace_all(std::string s, std::string_view from, std::string_view to) {
  if (from.empty()) return s;
  std::size_t pos = 0;
  while ((pos = s.find(from, pos)) != std::string::npos) {
    s.replace(pos, from.size(), to);
    pos += to.size();
  }
  return s;
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i > 0) out += sep;
    out += parts[i];
  }
  return out;
}

std::vector<std::string> tokenize(std::string_view s) {
  std::vector<std::string> tokens;
  std::string current;
  for (unsigned char c : s) {
    if (is_word_char(c)) {
      current.push_back(fold(c));
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

std::vector<std::string> whitespace_tokens(std::string_view s) {
  std::vector<std::string> tokens;
  std::string current;
  for (unsigned char c : s) {
    if (std::isspace(c)) {
      if (!current.empty()) {
        tokens.push_back(std::move(current));
        current.clear();
      }
    } else {
      current.push_back(static_cast<char>(c));
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

std::vector<std::string> ngrams(const std::vector<std::string>& tokens, int n) {
  std::vector<std::string> out;
  if (n <= 0 || tokens.size() < static_cast<std::size_t>(n)) return out;
  out.reserve(tokens.size() - static_cast<std::size_t>(n) + 1);
  for (std::size_t i = 0; i + static_cast<std::size_t>(n) <= tokens.size(); ++i) {
    std::string gram = tokens[i];
    for (std::size_t j = 1; j < static_cast<std::size_t>(n); ++j) {
      gram += ' ';
      gram += tokens[i + j];
    }
    out.push_back(std::move(gram));
  }
  return out;
}

double ngram_jaccard(const std::vector<std::string>& a,
                     const std::vector<std::string>& b, int n) {
  std::set<std::string> sa, sb;
  for (auto& g : ngrams(a, n)) sa.insert(g);
  for (auto& g : ngrams(b, n)) sb.insert(g);
  if (sa.empty() || sb.empty()) return 0.0;
  std::size_t inter = 0;
  for (const auto& g : sa) inter += sb.count(g);
  std::size_t uni = sa.size() + sb.size() - inter;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

std::string normalize_for_match(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  bool pending_space = false;
  for (unsigned char c : s) {
    if (is_word_char(c)) {
      if (pending_space && !out.empty()) out.push_back(' ');
      pending_space = false;
      out.push_back(fold(c));
    } else {
      pending_space = true;
    }
  }
  return out;
}

std::string normalize_title(std::string_view title) {
  std::string t = trim(title);
  // Strip one trailing "(YYYY)".
  if (t.size() >= 6 && t.back() == ')') {
    std::size_t open = t.rfind('(');
    if (open != std::string::npos && open + 1 < t.size() - 1) {
      std::string_view inner(t.data() + open + 1, t.size() - open - 2);
      bool all_digits = inner.size() == 4 &&
                        std::all_of(inner.begin(), inner.end(), [](unsigned char c) {
                          return std::isdigit(c) != 0;
                        });
      if (all_digits) t.erase(open);
    }
  }
  return normalize_for_match(t);
}

bool contains_phrase(std::string_view hay, std::string_view phrase) {
  if (phrase.empty()) return false;
  std::string padded_hay = " " + std::string(hay) + " ";
  std::string padded_phrase = " " + std::string(phrase) + " ";
  return padded_hay.find(padded_phrase) != std::string::npos;
}

namespace {

const std::unordered_set<std::string>& positive_markers() {
  static const std::unordered_set<std::string> kMarkers = {
      "like", "likes", "liked", "love", "loves", "loved", "enjoy", "enjoys",
      "enjoyed", "appreciate", "appreciates", "appreciated", "prefer",
      "prefers", "preferred", "favorite", "adore", "adores", "adored"};
  return kMarkers;
}

const std::unordered_set<std::string>& negative_markers() {
  static const std::unordered_set<std::string> kMarkers = {
      "hate", "hates", "hated", "dislike", "dislikes", "disliked",
      "despise", "despises", "despised", "avoid", "avoids", "avoided"};
  return kMarkers;
}

const std::unordered_set<std::string>& negation_words() {
  // "don't" tokenizes to [don, t]; keep the clipped forms too.
  static const std::unordered_set<std::string> kWords = {
      "not", "never", "dont", "don", "didnt", "didn", "wont",
      "won", "cant", "isnt", "isn", "no", "hardly"};
  return kWords;
}

}  // namespace

std::vector<PolarityPhrase> extract_polarity_phrases(std::string_view s) {
  std::vector<PolarityPhrase> out;
  // Clause boundaries stop a phrase; ':' intentionally does not, so
  // "likes: noir thrillers" reads as one clause.
  std::string clause;
  std::vector<std::string> clauses;
  for (char c : s) {
    if (c == '.' || c == ',' || c == ';' || c == '!' || c == '?' || c == '\n') {
      clauses.push_back(clause);
      clause.clear();
    } else {
      clause.push_back(c);
    }
  }
  clauses.push_back(clause);

  for (const auto& cl : clauses) {
    std::vector<std::string> tokens = tokenize(cl);
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      bool positive;
      if (positive_markers().count(tokens[i])) {
        positive = true;
      } else if (negative_markers().count(tokens[i])) {
        positive = false;
      } else {
        continue;
      }
      // A negation just before the marker flips it.
      for (std::size_t back = 1; back <= 2 && back <= i; ++back) {
        if (negation_words().count(tokens[i - back])) {
          positive = !positive;
          break;
        }
      }
      if (i + 1 < tokens.size()) {
        std::string phrase = tokens[i + 1];
        for (std::size_t j = i + 2; j < tokens.size(); ++j) {
          phrase += ' ';
          phrase += tokens[j];
        }
        out.push_back({positive, std::move(phrase)});
      }
      break;  // one phrase per clause
    }
  }
  return out;
}

}  // namespace convrec::text
