#pragma once

#include <algorithm>
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <unordered_set>
#include <vector>

#include "gap_set.hpp"
#include "language.hpp"
#include "subset_dfa.hpp"
#include "word.hpp"

namespace symdyn {

inline std::size_t default_horizon(int alphabet_size) {
  if (alphabet_size <= 2) return 24;
  if (alphabet_size == 3) return 16;
  return 12;
}

class FullShift : public LanguageOracle {
 public:
  FullShift(Alphabet alphabet, std::size_t horizon) : LanguageOracle(alphabet, horizon) {}
  StateId initial_state() const override { return 0; }
  std::optional<StateId> next_state(StateId, Symbol a) const override {
    if (!alphabet().contains(a)) return std::nullopt;
    return 0;
  }
  std::string describe() const override { return "full:" + std::to_string(alphabet().size()); }
};

inline std::shared_ptr<const FullShift> build_full(int n, std::optional<std::size_t> horizon = std::nullopt) {
  return std::make_shared<FullShift>(Alphabet(n), horizon.value_or(default_horizon(n)));
}

// ---------------------------------------------------------------------------
// Shifts of finite type

struct SftSpec {
  Alphabet alphabet;
  std::vector<Word> forbidden;
};

// Drops forbidden words that contain another forbidden word.
inline std::vector<Word> minimal_forbidden(std::vector<Word> words) {
  std::sort(words.begin(), words.end(), [](const Word& a, const Word& b) {
    return a.size() != b.size() ? a.size() < b.size() : a < b;
  });
  words.erase(std::unique(words.begin(), words.end()), words.end());
  std::vector<Word> kept;
  for (const Word& w : words) {
    bool redundant = false;
    for (const Word& k : kept)
      if (std::search(w.begin(), w.end(), k.begin(), k.end()) != w.end()) {
        redundant = true;
        break;
      }
    if (!redundant) kept.push_back(w);
  }
  return kept;
}

// States are the last min(|w|, m-1) symbols read, m the longest forbidden
// length, trimmed to those with an infinite future.
class Sft : public LanguageOracle {
 public:
  Sft(SftSpec spec, std::size_t horizon) : LanguageOracle(spec.alphabet, horizon) {
    for (const Word& f : spec.forbidden) {
      if (f.empty()) fail(ErrorCode::InvalidSpec, "forbidden word must be nonempty");
      check_alphabet(spec.alphabet, f);
    }
    forbidden_ = minimal_forbidden(std::move(spec.forbidden));
    std::size_t m = 1;
    for (const Word& f : forbidden_) m = std::max(m, f.size());
    memory_ = m - 1;
    build();
  }

  StateId initial_state() const override { return 0; }

  std::optional<StateId> next_state(StateId s, Symbol a) const override {
    if (!alphabet().contains(a) || s >= trans_.size()) return std::nullopt;
    std::int64_t t = trans_[s][a - 1];
    if (t < 0) return std::nullopt;
    return static_cast<StateId>(t);
  }

  std::string describe() const override {
    std::string out = "sft:" + std::to_string(alphabet().size()) + ":forbid=";
    for (std::size_t i = 0; i < forbidden_.size(); ++i) {
      if (i) out += ',';
      for (Symbol a : forbidden_[i]) out += std::to_string(a);
    }
    return out;
  }

  const std::vector<Word>& forbidden() const { return forbidden_; }
  std::size_t memory() const { return memory_; }
  std::size_t state_count() const { return contexts_.size(); }
  const Word& context(StateId s) const { return contexts_[s]; }

 private:
  bool clean_suffixes(const Word& u) const {
    for (const Word& f : forbidden_)
      if (f.size() <= u.size() && std::equal(f.begin(), f.end(), u.end() - static_cast<std::ptrdiff_t>(f.size())))
        return false;
    return true;
  }

  void build() {
    const int k = alphabet().size();
    std::map<Word, StateId> index;
    std::vector<Word> contexts{Word{}};
    std::vector<std::vector<std::int64_t>> trans;
    index[Word{}] = 0;
    for (std::size_t s = 0; s < contexts.size(); ++s) {
      trans.emplace_back(static_cast<std::size_t>(k), -1);
      for (int a = 1; a <= k; ++a) {
        Word u = contexts[s];
        u.push_back(static_cast<Symbol>(a));
        if (!clean_suffixes(u)) continue;
        if (u.size() > memory_) u.erase(u.begin(), u.end() - static_cast<std::ptrdiff_t>(memory_));
        auto [it, fresh] = index.emplace(u, static_cast<StateId>(contexts.size()));
        if (fresh) contexts.push_back(u);
        trans[s][static_cast<std::size_t>(a - 1)] = it->second;
      }
    }
    // Trim states without an infinite future.
    Nfa nfa;
    nfa.alphabet_size = k;
    for (std::size_t s = 0; s < contexts.size(); ++s) nfa.add_state();
    for (std::size_t s = 0; s < contexts.size(); ++s)
      for (int a = 0; a < k; ++a)
        if (trans[s][static_cast<std::size_t>(a)] >= 0)
          nfa.add_edge(static_cast<std::uint32_t>(s), static_cast<Symbol>(a + 1),
                       static_cast<std::uint32_t>(trans[s][static_cast<std::size_t>(a)]));
    auto live = live_states(nfa);
    for (std::size_t s = 0; s < contexts.size(); ++s)
      for (auto& t : trans[s])
        if (t >= 0 && !live[static_cast<std::size_t>(t)]) t = -1;
    contexts_ = std::move(contexts);
    trans_ = std::move(trans);
  }

  std::vector<Word> forbidden_;
  std::size_t memory_ = 0;
  std::vector<Word> contexts_;
  std::vector<std::vector<std::int64_t>> trans_;
};

inline std::shared_ptr<const Sft> build_sft(SftSpec spec, std::optional<std::size_t> horizon = std::nullopt) {
  std::size_t h = horizon.value_or(default_horizon(spec.alphabet.size()));
  for (const Word& f : spec.forbidden)
    if (f.size() > h) fail(ErrorCode::InvalidSpec, "horizon below longest forbidden word");
  return std::make_shared<Sft>(std::move(spec), h);
}

// ---------------------------------------------------------------------------
// Coded shifts

// Queries about the generating set H of a coded shift. Prefixes and suffixes
// are nonempty and proper (strictly shorter than the generator).
class GeneratorModel {
 public:
  virtual ~GeneratorModel() = default;
  virtual bool is_generator(WordView w) const = 0;
  virtual bool is_proper_prefix(WordView w) const = 0;
  virtual bool is_proper_suffix(WordView w) const = 0;
  virtual std::vector<Word> proper_prefixes(std::size_t n) const = 0;
  virtual std::vector<Word> proper_suffixes(std::size_t n) const = 0;

  // True when w is a finite concatenation of generators (including w = empty).
  bool is_concatenation(WordView w) const {
    std::vector<bool> reach(w.size() + 1, false);
    reach[0] = true;
    for (std::size_t j = 1; j <= w.size(); ++j)
      for (std::size_t i = 0; i < j && !reach[j]; ++i)
        if (reach[i] && is_generator(w.subspan(i, j - i))) reach[j] = true;
    return reach[w.size()];
  }
};

class CodedShift : public LanguageOracle {
 public:
  virtual std::shared_ptr<const GeneratorModel> generators() const = 0;

 protected:
  using LanguageOracle::LanguageOracle;
};

struct GeneratorSpec {
  // All generators of length <= L, including the empty word.
  std::function<std::vector<Word>(std::size_t)> enumerate_up_to;
  // Generators longer than this are ignored; defaults to 2*horizon + 1.
  std::optional<std::size_t> fragment_bound;
  std::string name = "coded";
};

inline GeneratorSpec generators_from_list(std::vector<Word> words, std::string name = "coded") {
  std::sort(words.begin(), words.end());
  words.erase(std::unique(words.begin(), words.end()), words.end());
  GeneratorSpec spec;
  spec.enumerate_up_to = [words](std::size_t bound) {
    std::vector<Word> out;
    for (const Word& w : words)
      if (w.size() <= bound) out.push_back(w);
    return out;
  };
  spec.name = std::move(name);
  return spec;
}

class ListGeneratorModel : public GeneratorModel {
 public:
  explicit ListGeneratorModel(std::vector<Word> generators) : generators_(std::move(generators)) {
    for (const Word& g : generators_)
      if (!g.empty()) set_.insert(g);
  }

  bool is_generator(WordView w) const override { return !w.empty() && set_.count(Word(w.begin(), w.end())); }

  bool is_proper_prefix(WordView w) const override {
    if (w.empty()) return false;
    for (const Word& g : generators_)
      if (g.size() > w.size() && std::equal(w.begin(), w.end(), g.begin())) return true;
    return false;
  }

  bool is_proper_suffix(WordView w) const override {
    if (w.empty()) return false;
    for (const Word& g : generators_)
      if (g.size() > w.size() && std::equal(w.begin(), w.end(), g.end() - static_cast<std::ptrdiff_t>(w.size())))
        return true;
    return false;
  }

  std::vector<Word> proper_prefixes(std::size_t n) const override {
    std::set<Word> out;
    if (n == 0) return {};
    for (const Word& g : generators_)
      if (g.size() > n) out.insert(Word(g.begin(), g.begin() + static_cast<std::ptrdiff_t>(n)));
    return {out.begin(), out.end()};
  }

  std::vector<Word> proper_suffixes(std::size_t n) const override {
    std::set<Word> out;
    if (n == 0) return {};
    for (const Word& g : generators_)
      if (g.size() > n) out.insert(Word(g.end() - static_cast<std::ptrdiff_t>(n), g.end()));
    return {out.begin(), out.end()};
  }

  const std::vector<Word>& generators() const { return generators_; }

 private:
  std::vector<Word> generators_;
  std::unordered_set<Word, WordHash> set_;
};

// Generic coded shift. NFA states are positions (g, i) inside generator g,
// "about to read g[i]"; finishing g moves to every generator start. Starting
// from all positions at once yields exactly the factors of bi-infinite
// concatenations, and every position has a future, so no trimming is needed.
class SubsetCodedShift : public CodedShift {
 public:
  SubsetCodedShift(Alphabet alphabet, const GeneratorSpec& spec, std::size_t horizon)
      : CodedShift(alphabet, horizon), name_(spec.name) {
    std::size_t bound = spec.fragment_bound.value_or(2 * horizon + 1);
    std::vector<Word> gens = spec.enumerate_up_to(bound);
    bool has_empty = false;
    std::vector<Word> nonempty;
    for (Word& g : gens) {
      if (g.empty()) {
        has_empty = true;
        continue;
      }
      check_alphabet(alphabet, g);
      nonempty.push_back(std::move(g));
    }
    if (!has_empty) fail(ErrorCode::InvalidSpec, "generator set must contain the empty word");
    if (nonempty.empty()) fail(ErrorCode::InvalidSpec, "generator set has no nonempty word");
    std::sort(nonempty.begin(), nonempty.end());
    nonempty.erase(std::unique(nonempty.begin(), nonempty.end()), nonempty.end());
    model_ = std::make_shared<ListGeneratorModel>(nonempty);

    Nfa nfa;
    nfa.alphabet_size = alphabet.size();
    std::vector<std::uint32_t> first;
    std::vector<std::vector<std::uint32_t>> pos(nonempty.size());
    for (std::size_t g = 0; g < nonempty.size(); ++g) {
      for (std::size_t i = 0; i < nonempty[g].size(); ++i) pos[g].push_back(nfa.add_state());
      first.push_back(pos[g][0]);
    }
    std::vector<std::uint32_t> all;
    for (std::size_t g = 0; g < nonempty.size(); ++g)
      for (std::size_t i = 0; i < nonempty[g].size(); ++i) {
        std::uint32_t q = pos[g][i];
        all.push_back(q);
        Symbol a = nonempty[g][i];
        if (i + 1 < nonempty[g].size())
          nfa.add_edge(q, a, pos[g][i + 1]);
        else
          for (std::uint32_t f : first) nfa.add_edge(q, a, f);
      }
    dfa_ = std::make_unique<LazySubsetDfa>(std::move(nfa), std::move(all));
  }

  StateId initial_state() const override { return dfa_->initial(); }
  std::optional<StateId> next_state(StateId s, Symbol a) const override {
    if (!alphabet().contains(a)) return std::nullopt;
    return dfa_->next(s, a);
  }
  std::string describe() const override { return name_; }
  std::shared_ptr<const GeneratorModel> generators() const override { return model_; }

 private:
  std::string name_;
  std::shared_ptr<const ListGeneratorModel> model_;
  std::unique_ptr<LazySubsetDfa> dfa_;
};

inline std::shared_ptr<const CodedShift> build_coded(Alphabet alphabet, const GeneratorSpec& spec,
                                                     std::optional<std::size_t> horizon = std::nullopt) {
  return std::make_shared<SubsetCodedShift>(alphabet, spec, horizon.value_or(default_horizon(alphabet.size())));
}

// Fat S-gap generators w1 with w over the fillers {2..N} and |w| in S.
class FatGapModel : public GeneratorModel {
 public:
  FatGapModel(GapSet gaps, int n) : gaps_(std::move(gaps)), n_(n) {}

  bool is_generator(WordView w) const override {
    if (w.empty() || w.back() != 1) return false;
    return fillers_only(w.first(w.size() - 1)) && gaps_.contains(w.size() - 1);
  }
  bool is_proper_prefix(WordView w) const override {
    return !w.empty() && fillers_only(w) && gaps_.has_member_at_least(w.size());
  }
  bool is_proper_suffix(WordView w) const override {
    if (w.empty() || w.back() != 1) return false;
    return fillers_only(w.first(w.size() - 1)) && gaps_.has_member_at_least(w.size());
  }
  std::vector<Word> proper_prefixes(std::size_t n) const override {
    if (n == 0 || !gaps_.has_member_at_least(n)) return {};
    return filler_words(n);
  }
  std::vector<Word> proper_suffixes(std::size_t n) const override {
    if (n == 0 || !gaps_.has_member_at_least(n)) return {};
    auto out = filler_words(n - 1);
    for (Word& w : out) w.push_back(1);
    return out;
  }

  const GapSet& gaps() const { return gaps_; }
  int fillers() const { return n_ - 1; }

 private:
  bool fillers_only(WordView w) const {
    for (Symbol a : w)
      if (a < 2 || a > n_) return false;
    return true;
  }
  std::vector<Word> filler_words(std::size_t len) const {
    std::vector<Word> out;
    Word w(len, 2);
    while (true) {
      out.push_back(w);
      std::size_t i = len;
      while (i > 0 && w[i - 1] == n_) {
        w[i - 1] = 2;
        --i;
      }
      if (i == 0) break;
      ++w[i - 1];
    }
    return out;
  }

  GapSet gaps_;
  int n_;
};

// Fat S-gap shift on {1..N}. The automaton only tracks the current run of
// fillers: Initial, Leading(r) (r fillers and no 1 seen yet) and After(r)
// (r fillers since the last 1). Ids: 0 = Initial, 2r = Leading(r), 2r+1 = After(r).
class FatGapShift : public CodedShift {
 public:
  FatGapShift(GapSet gaps, int n, std::size_t horizon)
      : CodedShift(Alphabet(n), horizon), model_(std::make_shared<FatGapModel>(gaps, n)), gaps_(std::move(gaps)) {
    if (n < 2) fail(ErrorCode::InvalidSpec, "fat gap shift needs N >= 2");
  }

  StateId initial_state() const override { return 0; }

  std::optional<StateId> next_state(StateId s, Symbol a) const override {
    if (!alphabet().contains(a)) return std::nullopt;
    bool after = s % 2 == 1;
    std::uint64_t r = s / 2;
    if (a == 1) {
      if (after && !gaps_.contains(r)) return std::nullopt;
      return 1;  // After(0)
    }
    std::uint64_t next = (s == 0 ? 0 : r) + 1;
    if (!gaps_.has_member_at_least(next)) return std::nullopt;
    return static_cast<StateId>(2 * next + (after ? 1 : 0));
  }

  std::string describe() const override {
    if (alphabet().size() == 2) return "sgap:" + gaps_.spec();
    return "fatsgap:N=" + std::to_string(alphabet().size()) + ":" + gaps_.spec();
  }

  std::shared_ptr<const GeneratorModel> generators() const override { return model_; }
  const GapSet& gaps() const { return gaps_; }

 private:
  std::shared_ptr<const FatGapModel> model_;
  GapSet gaps_;
};

inline std::shared_ptr<const FatGapShift> build_fat_sgap(const GapSet& gaps, int n,
                                                         std::optional<std::size_t> horizon = std::nullopt) {
  if (n < 2) fail(ErrorCode::InvalidSpec, "fat gap shift needs N >= 2");
  return std::make_shared<FatGapShift>(gaps, n, horizon.value_or(default_horizon(n)));
}

inline std::shared_ptr<const FatGapShift> build_sgap(const GapSet& gaps, std::optional<std::size_t> horizon = std::nullopt) {
  return build_fat_sgap(gaps, 2, horizon);
}

// Coded shift generated by {1^i 2^i : i in I}. Members of I equal to 0 only
// contribute the empty word.
inline GeneratorSpec block_pair_generators(const GapSet& index) {
  GeneratorSpec spec;
  spec.enumerate_up_to = [index](std::size_t bound) {
    std::vector<Word> out{Word{}};
    for (std::uint64_t i : index.members_up_to(bound / 2)) {
      if (i == 0) continue;
      Word w(i, 1);
      w.insert(w.end(), i, 2);
      out.push_back(std::move(w));
    }
    // Every 1^i 2^i with 2i > bound has the same short factors, prefixes and
    // suffixes, so the first such block stands in for all of them.
    if (auto next = index.next_member(bound / 2 + 1); next && *next > 0) {
      Word w(*next, 1);
      w.insert(w.end(), *next, 2);
      out.push_back(std::move(w));
    }
    return out;
  };
  spec.name = "kucherenko:" + index.spec();
  return spec;
}

inline std::shared_ptr<const CodedShift> build_kucherenko(const GapSet& index = GapSet::arithmetic(1, 1),
                                                          std::optional<std::size_t> horizon = std::nullopt) {
  return build_coded(Alphabet(2), block_pair_generators(index), horizon);
}

}  // namespace symdyn
