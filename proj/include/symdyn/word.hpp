#pragma once

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "errors.hpp"

namespace symdyn {

using Symbol = std::uint16_t;
using Word = std::vector<Symbol>;
using WordView = std::span<const Symbol>;

// Symbols are 1..size.
class Alphabet {
 public:
  explicit Alphabet(int size = 1) : size_(size) {
    if (size < 1 || size > 65535) fail(ErrorCode::InvalidSpec, "alphabet size must be >= 1");
  }
  int size() const { return size_; }
  bool contains(Symbol a) const { return a >= 1 && a <= size_; }
  bool operator==(const Alphabet&) const = default;

 private:
  int size_;
};

inline Word concat(WordView a, WordView b) {
  Word out(a.begin(), a.end());
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

inline Word concat(WordView a, WordView b, WordView c) {
  Word out = concat(a, b);
  out.insert(out.end(), c.begin(), c.end());
  return out;
}

inline Word subword(WordView w, std::size_t pos, std::size_t len) {
  return Word(w.begin() + static_cast<std::ptrdiff_t>(pos),
              w.begin() + static_cast<std::ptrdiff_t>(pos + len));
}

inline bool contains_symbol(WordView w, Symbol a) {
  return std::find(w.begin(), w.end(), a) != w.end();
}

inline std::size_t count_symbol(WordView w, Symbol a) {
  return static_cast<std::size_t>(std::count(w.begin(), w.end(), a));
}

inline Word repeat(Symbol a, std::size_t n) { return Word(n, a); }

// "1 2 1", with "-" for the empty word.
inline std::string to_text(WordView w) {
  if (w.empty()) return "-";
  std::string out;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (i) out += ' ';
    out += std::to_string(w[i]);
  }
  return out;
}

// Accepts the spaced form and, when no spaces are present, a run of single
// digits ("1212"); the spaced form is required for symbols above 9.
inline Word parse_word(std::string_view text) {
  auto trim = [](std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
  };
  text = trim(text);
  Word out;
  if (text == "-" || text.empty()) return out;
  bool spaced = text.find_first_of(" \t") != std::string_view::npos;
  if (!spaced) {
    for (char ch : text) {
      if (ch < '1' || ch > '9') fail(ErrorCode::InvalidSpec, "bad word '" + std::string(text) + "'");
      out.push_back(static_cast<Symbol>(ch - '0'));
    }
    return out;
  }
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && (text[i] == ' ' || text[i] == '\t')) ++i;
    if (i >= text.size()) break;
    std::size_t j = i;
    while (j < text.size() && text[j] != ' ' && text[j] != '\t') ++j;
    unsigned value = 0;
    auto [ptr, ec] = std::from_chars(text.data() + i, text.data() + j, value);
    if (ec != std::errc() || ptr != text.data() + j || value == 0 || value > 65535)
      fail(ErrorCode::InvalidSpec, "bad word '" + std::string(text) + "'");
    out.push_back(static_cast<Symbol>(value));
    i = j;
  }
  return out;
}

inline void check_alphabet(const Alphabet& alphabet, WordView w) {
  for (Symbol a : w)
    if (!alphabet.contains(a))
      fail(ErrorCode::InvalidSpec, "symbol " + std::to_string(a) + " outside alphabet of size " +
                                       std::to_string(alphabet.size()));
}

struct WordHash {
  std::size_t operator()(WordView w) const noexcept {
    std::uint64_t h = 1469598103934665603ull;
    for (Symbol a : w) {
      h ^= a;
      h *= 1099511628211ull;
    }
    h ^= w.size();
    return static_cast<std::size_t>(h);
  }
  std::size_t operator()(const Word& w) const noexcept { return (*this)(WordView(w)); }
};

}  // namespace symdyn
