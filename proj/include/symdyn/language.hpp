#pragma once

#include <cmath>
#include <cstdint>
#include <deque>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "errors.hpp"
#include "word.hpp"

namespace symdyn {

using BigInt = boost::multiprecision::cpp_int;
using StateId = std::uint32_t;

// Large enough that no enumeration or count will ever reach it.
inline constexpr std::size_t kUnboundedHorizon = std::size_t{1} << 30;

// A language presented as a deterministic automaton read from the left.
// Every state reachable from initial_state() spells a member of the language,
// and every such state has at least one outgoing symbol, so the language is
// right-extendable by construction. Answers are exact for |w| <= horizon().
class LanguageOracle {
 public:
  virtual ~LanguageOracle() = default;

  const Alphabet& alphabet() const { return alphabet_; }
  std::size_t horizon() const { return horizon_; }

  virtual StateId initial_state() const = 0;
  virtual std::optional<StateId> next_state(StateId state, Symbol a) const = 0;
  virtual std::string describe() const = 0;

 protected:
  LanguageOracle(Alphabet alphabet, std::size_t horizon) : alphabet_(alphabet), horizon_(horizon) {}

 private:
  Alphabet alphabet_;
  std::size_t horizon_;
};

inline void require_horizon(const LanguageOracle& lang, std::size_t n) {
  if (n > lang.horizon())
    fail(ErrorCode::HorizonExceeded, "length " + std::to_string(n) + " exceeds horizon " +
                                         std::to_string(lang.horizon()) + " of " + lang.describe());
}

// Runs w from a given state without horizon checks.
inline std::optional<StateId> run_from(const LanguageOracle& lang, StateId state, WordView w) {
  std::optional<StateId> s = state;
  for (Symbol a : w) {
    if (!lang.alphabet().contains(a)) return std::nullopt;
    s = lang.next_state(*s, a);
    if (!s) return std::nullopt;
  }
  return s;
}

inline std::optional<StateId> run(const LanguageOracle& lang, WordView w) {
  return run_from(lang, lang.initial_state(), w);
}

inline bool is_word(const LanguageOracle& lang, WordView w) {
  require_horizon(lang, w.size());
  return run(lang, w).has_value();
}

// Calls fn(word) for every member of length n in lexicographic order.
template <typename Fn>
void for_each_word(const LanguageOracle& lang, std::size_t n, Fn&& fn) {
  require_horizon(lang, n);
  Word buf;
  buf.reserve(n);
  const Symbol top = static_cast<Symbol>(lang.alphabet().size());
  std::function<void(StateId)> rec = [&](StateId s) {
    if (buf.size() == n) {
      fn(static_cast<const Word&>(buf));
      return;
    }
    for (Symbol a = 1; a <= top; ++a) {
      if (auto t = lang.next_state(s, a)) {
        buf.push_back(a);
        rec(*t);
        buf.pop_back();
      }
    }
  };
  rec(lang.initial_state());
}

inline std::vector<Word> enumerate_words(const LanguageOracle& lang, std::size_t n) {
  std::vector<Word> out;
  for_each_word(lang, n, [&](const Word& w) { out.push_back(w); });
  return out;
}

// Exact counts c_0..c_{n_max} by dynamic programming over automaton states.
inline std::vector<BigInt> count_sequence(const LanguageOracle& lang, std::size_t n_max) {
  require_horizon(lang, n_max);
  std::vector<BigInt> out;
  out.reserve(n_max + 1);
  std::map<StateId, BigInt> layer{{lang.initial_state(), BigInt(1)}};
  const Symbol top = static_cast<Symbol>(lang.alphabet().size());
  out.push_back(1);
  for (std::size_t n = 1; n <= n_max; ++n) {
    std::map<StateId, BigInt> next;
    for (const auto& [s, c] : layer)
      for (Symbol a = 1; a <= top; ++a)
        if (auto t = lang.next_state(s, a)) next[*t] += c;
    BigInt total = 0;
    for (const auto& [s, c] : next) total += c;
    out.push_back(total);
    layer = std::move(next);
  }
  return out;
}

inline BigInt count_words(const LanguageOracle& lang, std::size_t n) {
  return count_sequence(lang, n).back();
}

inline std::uint64_t count_words_u64(const LanguageOracle& lang, std::size_t n) {
  BigInt c = count_words(lang, n);
  if (c > std::numeric_limits<std::uint64_t>::max())
    fail(ErrorCode::Overflow, "count at length " + std::to_string(n) + " does not fit in 64 bits");
  return static_cast<std::uint64_t>(c);
}

inline double log_big(const BigInt& x) {
  if (x <= 0) return -std::numeric_limits<double>::infinity();
  // Scale down to keep the conversion inside double range.
  std::size_t bits = boost::multiprecision::msb(x);
  if (bits < 1000) return std::log(static_cast<double>(x));
  std::size_t shift = bits - 60;
  BigInt top = x >> shift;
  return std::log(static_cast<double>(top)) + static_cast<double>(shift) * std::log(2.0);
}

// Explicit reachable part of an oracle's automaton.
struct AutomatonGraph {
  Alphabet alphabet;
  std::vector<StateId> states;  // oracle ids; index 0 is the initial state
  struct Edge {
    std::uint32_t src;
    Symbol symbol;
    std::uint32_t dst;
  };
  std::vector<Edge> edges;
};

// Breadth-first exploration; throws StateLimit past max_states.
inline AutomatonGraph explore_automaton(const LanguageOracle& lang, std::size_t max_states) {
  AutomatonGraph g{lang.alphabet(), {}, {}};
  std::unordered_map<StateId, std::uint32_t> index;
  std::deque<StateId> queue;
  auto add = [&](StateId s) {
    auto [it, fresh] = index.emplace(s, static_cast<std::uint32_t>(g.states.size()));
    if (fresh) {
      if (g.states.size() >= max_states)
        fail(ErrorCode::StateLimit, "automaton of " + lang.describe() + " has more than " +
                                        std::to_string(max_states) + " states");
      g.states.push_back(s);
      queue.push_back(s);
    }
    return it->second;
  };
  add(lang.initial_state());
  const Symbol top = static_cast<Symbol>(lang.alphabet().size());
  while (!queue.empty()) {
    StateId s = queue.front();
    queue.pop_front();
    std::uint32_t si = index.at(s);
    for (Symbol a = 1; a <= top; ++a)
      if (auto t = lang.next_state(s, a)) g.edges.push_back({si, a, add(*t)});
  }
  return g;
}

}  // namespace symdyn
