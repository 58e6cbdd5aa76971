#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace mbrkit {

/// A tokenized sentence together with the text it was produced from.
struct TokenSeq {
  std::vector<std::string> tokens;
  std::string source_text;

  std::size_t size() const { return tokens.size(); }
  bool empty() const { return tokens.empty(); }

  /// Tokens joined by single spaces.
  std::string joined() const;
};

/// Default maximum orders: word n-grams feed BLEU, character n-grams chrF.
inline constexpr int kWordNGramOrder = 4;
inline constexpr int kCharNGramOrder = 6;

/// Multiset of n-grams for orders 1..max_order. Word n-gram keys are the
/// tokens joined by a single space; character n-gram keys are the UTF-8 bytes
/// of the code points. Keys are case sensitive.
class NGramProfile {
 public:
  using Counts = std::unordered_map<std::string, std::int64_t>;

  explicit NGramProfile(int max_order);

  int max_order() const { return static_cast<int>(orders_.size()); }

  /// Counts for order k, 1-based.
  const Counts& order(int k) const;
  std::int64_t total(int k) const;

  void add(int k, std::string key, std::int64_t count = 1);

 private:
  std::vector<Counts> orders_;
  std::vector<std::int64_t> totals_;
};

/// Sum over keys of min(a[key], b[key]) for order k.
std::int64_t clipped_overlap(const NGramProfile& a, const NGramProfile& b, int k);

/// Language-agnostic mteval-v13a tokenization as implemented by the common
/// reference scorer: unescapes a few SGML entities, splits symbols, splits
/// period and comma unless adjacent to digits, splits a dash after a digit
/// and normalizes whitespace.
TokenSeq tokenize_13a(std::string_view text);

NGramProfile word_ngrams(const TokenSeq& seq, int max_n = kWordNGramOrder);
NGramProfile word_ngrams(const std::vector<std::string>& tokens, int max_n = kWordNGramOrder);

NGramProfile char_ngrams(std::string_view text, int max_n = kCharNGramOrder,
                         bool include_space = false);

namespace utf8 {

/// Splits into code points, each returned as its UTF-8 byte sequence.
/// Malformed bytes are returned as single-byte units.
std::vector<std::string_view> split(std::string_view text);

/// Decodes a code point from the front of `text`, advancing `pos`.
char32_t next(std::string_view text, std::size_t& pos);

/// Unicode whitespace, matching what Python's str.isspace() accepts.
bool is_space(char32_t cp);

/// Removes every whitespace code point.
std::string remove_space(std::string_view text);

/// Strips trailing whitespace code points.
std::string_view rstrip(std::string_view text);

/// Splits on runs of whitespace code points, dropping empty pieces.
std::vector<std::string> split_whitespace(std::string_view text);

}  // namespace utf8

}  // namespace mbrkit
