#include "mbrkit/text.hpp"

#include <algorithm>
#include <array>
#include <stdexcept>

namespace mbrkit {

std::string TokenSeq::joined() const {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out += ' ';
    out += tokens[i];
  }
  return out;
}

NGramProfile::NGramProfile(int max_order) {
  if (max_order < 1) throw std::invalid_argument("n-gram order must be >= 1");
  orders_.resize(static_cast<std::size_t>(max_order));
  totals_.assign(static_cast<std::size_t>(max_order), 0);
}

const NGramProfile::Counts& NGramProfile::order(int k) const {
  if (k < 1 || k > max_order()) throw std::out_of_range("n-gram order out of range");
  return orders_[static_cast<std::size_t>(k - 1)];
}

std::int64_t NGramProfile::total(int k) const {
  if (k < 1 || k > max_order()) throw std::out_of_range("n-gram order out of range");
  return totals_[static_cast<std::size_t>(k - 1)];
}

void NGramProfile::add(int k, std::string key, std::int64_t count) {
  if (k < 1 || k > max_order()) throw std::out_of_range("n-gram order out of range");
  if (count <= 0) return;
  orders_[static_cast<std::size_t>(k - 1)][std::move(key)] += count;
  totals_[static_cast<std::size_t>(k - 1)] += count;
}

std::int64_t clipped_overlap(const NGramProfile& a, const NGramProfile& b, int k) {
  const auto& small = a.order(k).size() <= b.order(k).size() ? a.order(k) : b.order(k);
  const auto& large = &small == &a.order(k) ? b.order(k) : a.order(k);
  std::int64_t common = 0;
  for (const auto& [key, count] : small) {
    auto it = large.find(key);
    if (it != large.end()) common += std::min(count, it->second);
  }
  return common;
}

namespace utf8 {

char32_t next(std::string_view text, std::size_t& pos) {
  const auto byte = [&](std::size_t i) { return static_cast<unsigned char>(text[i]); };
  unsigned char lead = byte(pos);
  int extra = 0;
  char32_t cp = 0;
  if (lead < 0x80) {
    ++pos;
    return lead;
  } else if ((lead & 0xE0) == 0xC0) {
    extra = 1;
    cp = lead & 0x1F;
  } else if ((lead & 0xF0) == 0xE0) {
    extra = 2;
    cp = lead & 0x0F;
  } else if ((lead & 0xF8) == 0xF0) {
    extra = 3;
    cp = lead & 0x07;
  } else {
    ++pos;
    return 0xFFFD;
  }
  if (pos + static_cast<std::size_t>(extra) >= text.size()) {
    ++pos;
    return 0xFFFD;
  }
  for (int i = 1; i <= extra; ++i) {
    unsigned char c = byte(pos + static_cast<std::size_t>(i));
    if ((c & 0xC0) != 0x80) {
      ++pos;
      return 0xFFFD;
    }
    cp = (cp << 6) | (c & 0x3F);
  }
  pos += static_cast<std::size_t>(extra) + 1;
  return cp;
}

std::vector<std::string_view> split(std::string_view text) {
  std::vector<std::string_view> out;
  out.reserve(text.size());
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t start = pos;
    next(text, pos);
    out.push_back(text.substr(start, pos - start));
  }
  return out;
}

bool is_space(char32_t cp) {
  if (cp >= 0x09 && cp <= 0x0D) return true;
  if (cp >= 0x1C && cp <= 0x20) return true;
  switch (cp) {
    case 0x85:
    case 0xA0:
    case 0x1680:
    case 0x2028:
    case 0x2029:
    case 0x202F:
    case 0x205F:
    case 0x3000:
      return true;
    default:
      return cp >= 0x2000 && cp <= 0x200A;
  }
}

std::string remove_space(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t start = pos;
    char32_t cp = next(text, pos);
    if (!is_space(cp)) out.append(text.substr(start, pos - start));
  }
  return out;
}

std::string_view rstrip(std::string_view text) {
  std::size_t keep = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    char32_t cp = next(text, pos);
    if (!is_space(cp)) keep = pos;
  }
  return text.substr(0, keep);
}

std::vector<std::string> split_whitespace(std::string_view text) {
  std::vector<std::string> out;
  std::string current;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t start = pos;
    char32_t cp = next(text, pos);
    if (is_space(cp)) {
      if (!current.empty()) out.push_back(std::move(current));
      current.clear();
    } else {
      current.append(text.substr(start, pos - start));
    }
  }
  if (!current.empty()) out.push_back(std::move(current));
  return out;
}

}  // namespace utf8

namespace {

void replace_all(std::string& s, std::string_view from, std::string_view to) {
  if (from.empty()) return;
  std::string out;
  out.reserve(s.size());
  std::size_t pos = 0;
  while (true) {
    std::size_t hit = s.find(from, pos);
    if (hit == std::string::npos) break;
    out.append(s, pos, hit - pos);
    out.append(to);
    pos = hit + from.size();
  }
  out.append(s, pos, std::string::npos);
  s = std::move(out);
}

constexpr std::array<bool, 256> symbol_table() {
  std::array<bool, 256> t{};
  for (int c = '{'; c <= '~'; ++c) t[c] = true;
  for (int c = '['; c <= '`'; ++c) t[c] = true;
  for (int c = ' '; c <= '&'; ++c) t[c] = true;
  for (int c = '('; c <= '+'; ++c) t[c] = true;
  for (int c = ':'; c <= '@'; ++c) t[c] = true;
  t['/'] = true;
  return t;
}

constexpr auto kSymbols = symbol_table();

bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_period_or_comma(char c) { return c == '.' || c == ','; }

}  // namespace

TokenSeq tokenize_13a(std::string_view text) {
  std::string line(text);
  replace_all(line, "<skipped>", "");
  replace_all(line, "-\n", "");
  replace_all(line, "\n", " ");
  replace_all(line, "&quot;", "\"");
  replace_all(line, "&amp;", "&");
  replace_all(line, "&lt;", "<");
  replace_all(line, "&gt;", ">");

  std::string a;
  a.reserve(line.size() * 2 + 2);
  a += ' ';
  for (char c : line) {
    if (kSymbols[static_cast<unsigned char>(c)]) {
      a += ' ';
      a += c;
      a += ' ';
    } else {
      a += c;
    }
  }
  a += ' ';

  // Each pass mirrors a left-to-right, non-overlapping regex substitution.
  // The patterns only touch ASCII bytes, so scanning bytes is equivalent to
  // scanning code points.
  std::string b;
  b.reserve(a.size() * 2);
  std::size_t i = 0;
  while (i < a.size()) {
    if (i + 1 < a.size() && !is_digit(a[i]) && is_period_or_comma(a[i + 1])) {
      b += a[i];
      b += ' ';
      b += a[i + 1];
      b += ' ';
      i += 2;
    } else {
      b += a[i++];
    }
  }

  std::string c;
  c.reserve(b.size() * 2);
  i = 0;
  while (i < b.size()) {
    if (i + 1 < b.size() && is_period_or_comma(b[i]) && !is_digit(b[i + 1])) {
      c += ' ';
      c += b[i];
      c += ' ';
      c += b[i + 1];
      i += 2;
    } else {
      c += b[i++];
    }
  }

  std::string d;
  d.reserve(c.size() * 2);
  i = 0;
  while (i < c.size()) {
    if (i + 1 < c.size() && is_digit(c[i]) && c[i + 1] == '-') {
      d += c[i];
      d += " - ";
      i += 2;
    } else {
      d += c[i++];
    }
  }

  return TokenSeq{utf8::split_whitespace(d), std::string(text)};
}

NGramProfile word_ngrams(const std::vector<std::string>& tokens, int max_n) {
  NGramProfile profile(max_n);
  const std::size_t len = tokens.size();
  for (int k = 1; k <= max_n; ++k) {
    const auto width = static_cast<std::size_t>(k);
    for (std::size_t start = 0; start + width <= len; ++start) {
      std::string key = tokens[start];
      for (std::size_t j = start + 1; j < start + width; ++j) {
        key += ' ';
        key += tokens[j];
      }
      profile.add(k, std::move(key));
    }
  }
  return profile;
}

NGramProfile word_ngrams(const TokenSeq& seq, int max_n) { return word_ngrams(seq.tokens, max_n); }

NGramProfile char_ngrams(std::string_view text, int max_n, bool include_space) {
  NGramProfile profile(max_n);
  std::string kept = include_space ? std::string(text) : utf8::remove_space(text);
  std::vector<std::size_t> offsets;
  std::size_t pos = 0;
  while (pos < kept.size()) {
    offsets.push_back(pos);
    utf8::next(kept, pos);
  }
  offsets.push_back(kept.size());
  const std::size_t chars = offsets.size() - 1;
  for (int k = 1; k <= max_n; ++k) {
    const auto width = static_cast<std::size_t>(k);
    for (std::size_t start = 0; start + width <= chars; ++start) {
      profile.add(k, kept.substr(offsets[start], offsets[start + width] - offsets[start]));
    }
  }
  return profile;
}

}  // namespace mbrkit
