#pragma once

#include <algorithm>
#include <array>
#include <deque>
#include <limits>
#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "entropy.hpp"
#include "errors.hpp"
#include "gap_set.hpp"
#include "hofbauer.hpp"
#include "language.hpp"
#include "shifts.hpp"
#include "word.hpp"

namespace symdyn {

struct Factorization {
  Word prefix, core, suffix;
};

// core[i][j]: w[i, j) is a core word.
using CoreTable = std::vector<std::vector<bool>>;

// A decomposition L = C^p G C^s of a language. Every collection contains the
// empty word. factorize() is a fixed choice: longest core, then shortest
// prefix, unless a subclass documents its own rule.
class Decomposition {
 public:
  virtual ~Decomposition() = default;

  const LanguageOracle& language() const { return *lang_; }
  std::shared_ptr<const LanguageOracle> language_ptr() const { return lang_; }

  virtual bool is_prefix(WordView w) const = 0;
  virtual bool is_core(WordView w) const = 0;
  virtual bool is_suffix(WordView w) const = 0;
  virtual std::string describe() const = 0;

  virtual CoreTable core_table(WordView w) const {
    const std::size_t n = w.size();
    CoreTable t(n + 1, std::vector<bool>(n + 1, false));
    for (std::size_t i = 0; i <= n; ++i)
      for (std::size_t j = i; j <= n; ++j) t[i][j] = is_core(w.subspan(i, j - i));
    return t;
  }

  virtual std::optional<Factorization> factorize(WordView w) const {
    const std::size_t n = w.size();
    CoreTable core = core_table(w);
    for (std::size_t len = n + 1; len-- > 0;)
      for (std::size_t i = 0; i + len <= n; ++i) {
        std::size_t j = i + len;
        if (core[i][j] && is_prefix(w.first(i)) && is_suffix(w.subspan(j))) {
          return Factorization{Word(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(i)),
                               Word(w.begin() + static_cast<std::ptrdiff_t>(i), w.begin() + static_cast<std::ptrdiff_t>(j)),
                               Word(w.begin() + static_cast<std::ptrdiff_t>(j), w.end())};
        }
      }
    return std::nullopt;
  }

  // C^p and C^s restricted to length n, sorted.
  virtual std::vector<Word> prefix_words(std::size_t n) const {
    std::vector<Word> out;
    for_each_word(*lang_, n, [&](WordView x) {
      if (is_prefix(x)) out.emplace_back(x.begin(), x.end());
    });
    return out;
  }
  virtual std::vector<Word> suffix_words(std::size_t n) const {
    std::vector<Word> out;
    for_each_word(*lang_, n, [&](WordView x) {
      if (is_suffix(x)) out.emplace_back(x.begin(), x.end());
    });
    return out;
  }

  // w in G^M: w = u v x with u in C^p, v in G, x in C^s and |u|, |x| <= M.
  bool in_fattened(WordView w, std::size_t m) const {
    const std::size_t n = w.size();
    CoreTable core = core_table(w);
    for (std::size_t i = 0; i <= std::min(m, n); ++i) {
      if (!is_prefix(w.first(i))) continue;
      for (std::size_t j = n; j + 1 > i && n - j <= m; --j) {
        if (core[i][j] && is_suffix(w.subspan(j))) return true;
        if (j == 0) break;
      }
    }
    return false;
  }

 protected:
  explicit Decomposition(std::shared_ptr<const LanguageOracle> lang) : lang_(std::move(lang)) {}

 private:
  std::shared_ptr<const LanguageOracle> lang_;
};

using WordPredicate = std::function<bool(WordView)>;

class PredicateDecomposition : public Decomposition {
 public:
  PredicateDecomposition(std::shared_ptr<const LanguageOracle> lang, WordPredicate prefix, WordPredicate core,
                         WordPredicate suffix, std::string name)
      : Decomposition(std::move(lang)),
        prefix_(std::move(prefix)),
        core_(std::move(core)),
        suffix_(std::move(suffix)),
        name_(std::move(name)) {}

  bool is_prefix(WordView w) const override { return w.empty() || prefix_(w); }
  bool is_core(WordView w) const override { return w.empty() || core_(w); }
  bool is_suffix(WordView w) const override { return w.empty() || suffix_(w); }
  std::string describe() const override { return name_; }

 private:
  WordPredicate prefix_, core_, suffix_;
  std::string name_;
};

// C^p = generator suffixes, G = concatenations of generators, C^s = generator
// prefixes. Suffixes and prefixes are proper; a whole generator is already a
// core word.
class NaturalCodedDecomposition : public Decomposition {
 public:
  explicit NaturalCodedDecomposition(std::shared_ptr<const CodedShift> coded)
      : Decomposition(coded), model_(coded->generators()) {}

  bool is_prefix(WordView w) const override { return w.empty() || model_->is_proper_suffix(w); }
  bool is_core(WordView w) const override { return model_->is_concatenation(w); }
  bool is_suffix(WordView w) const override { return w.empty() || model_->is_proper_prefix(w); }
  std::string describe() const override { return "natural(" + language().describe() + ")"; }

  CoreTable core_table(WordView w) const override {
    const std::size_t n = w.size();
    std::vector<std::vector<bool>> gen(n + 1, std::vector<bool>(n + 1, false));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j <= n; ++j) gen[i][j] = model_->is_generator(w.subspan(i, j - i));
    CoreTable t(n + 1, std::vector<bool>(n + 1, false));
    for (std::size_t i = 0; i <= n; ++i) {
      t[i][i] = true;
      for (std::size_t j = i + 1; j <= n; ++j)
        for (std::size_t m = i; m < j && !t[i][j]; ++m) t[i][j] = t[i][m] && gen[m][j];
    }
    return t;
  }

  std::vector<Word> prefix_words(std::size_t n) const override {
    require_horizon(language(), n);
    if (n == 0) return {Word{}};
    auto out = model_->proper_suffixes(n);
    std::sort(out.begin(), out.end());
    return out;
  }
  std::vector<Word> suffix_words(std::size_t n) const override {
    require_horizon(language(), n);
    if (n == 0) return {Word{}};
    auto out = model_->proper_prefixes(n);
    std::sort(out.begin(), out.end());
    return out;
  }

  const GeneratorModel& generators() const { return *model_; }

 private:
  std::shared_ptr<const GeneratorModel> model_;
};

inline std::shared_ptr<const Decomposition> natural_coded_decomposition(std::shared_ptr<const LanguageOracle> lang) {
  auto coded = std::dynamic_pointer_cast<const CodedShift>(lang);
  if (!coded) fail(ErrorCode::NotCoded, lang->describe() + " has no generator model");
  return std::make_shared<NaturalCodedDecomposition>(coded);
}

// All length-n words of G^M.
inline std::vector<Word> fattened_core(const Decomposition& d, std::size_t m, std::size_t n) {
  std::vector<Word> out;
  for_each_word(d.language(), n, [&](WordView x) {
    if (d.in_fattened(x, m)) out.emplace_back(x.begin(), x.end());
  });
  return out;
}

// ---------------------------------------------------------------------------
// (W)-specification

enum class SpecStatus { Verified, Counterexample, Inconclusive };

constexpr const char* to_string(SpecStatus s) {
  switch (s) {
    case SpecStatus::Verified: return "verified";
    case SpecStatus::Counterexample: return "counterexample";
    case SpecStatus::Inconclusive: return "inconclusive";
  }
  return "?";
}

// Pairwise gluing of G^M words is checked exhaustively; longer chains only on
// random triples, so "verified" covers m = 2 fully and m = 3 by sampling.
struct SpecCertificate {
  std::size_t m = 0;
  std::size_t gap = 0;            // smallest uniform connector bound that worked
  std::size_t checked_length = 0;
  std::size_t t_max = 0;
  SpecStatus status = SpecStatus::Verified;
  std::optional<std::pair<Word, Word>> counterexample;
  std::optional<std::array<Word, 3>> failed_triple;
  std::size_t words = 0;
  std::size_t pairs = 0;
  std::size_t triples = 0;
  std::uint64_t seed = 0;
};

inline SpecCertificate check_w_specification(const Decomposition& d, std::size_t m, std::size_t t_max, std::size_t len,
                                             std::uint64_t seed = 1, std::size_t n_triples = 100) {
  const LanguageOracle& lang = d.language();
  require_horizon(lang, 2 * len + t_max);
  SpecCertificate cert;
  cert.m = m;
  cert.t_max = t_max;
  cert.checked_length = len;
  cert.seed = seed;

  std::vector<Word> good;
  for (std::size_t n = 1; n <= len; ++n)
    for (Word& x : fattened_core(d, m, n)) good.push_back(std::move(x));
  cert.words = good.size();

  // reach[s][k]: states reachable from s by exactly k symbols
  std::map<StateId, std::vector<std::set<StateId>>> reach_cache;
  auto reach = [&](StateId s) -> const std::vector<std::set<StateId>>& {
    auto it = reach_cache.find(s);
    if (it != reach_cache.end()) return it->second;
    std::vector<std::set<StateId>> layers{{s}};
    for (std::size_t k = 0; k < t_max; ++k) {
      std::set<StateId> next;
      for (StateId q : layers.back())
        for (Symbol a = 1; a <= lang.alphabet().size(); ++a)
          if (auto r = lang.next_state(q, a)) next.insert(*r);
      layers.push_back(std::move(next));
    }
    return reach_cache.emplace(s, std::move(layers)).first->second;
  };
  std::map<std::pair<StateId, std::size_t>, std::optional<StateId>> run_cache;
  auto run_word = [&](StateId q, std::size_t idx) {
    auto key = std::make_pair(q, idx);
    auto it = run_cache.find(key);
    if (it != run_cache.end()) return it->second;
    auto r = run_from(lang, q, good[idx]);
    run_cache.emplace(key, r);
    return r;
  };

  std::vector<StateId> end_state(good.size());
  for (std::size_t i = 0; i < good.size(); ++i) end_state[i] = *run(lang, good[i]);

  std::size_t worst = 0;
  for (std::size_t i = 0; i < good.size(); ++i) {
    const auto& layers = reach(end_state[i]);
    for (std::size_t j = 0; j < good.size(); ++j) {
      ++cert.pairs;
      std::optional<std::size_t> best;
      for (std::size_t k = 0; k <= t_max && !best; ++k)
        for (StateId q : layers[k])
          if (run_word(q, j)) {
            best = k;
            break;
          }
      if (!best) {
        cert.status = SpecStatus::Counterexample;
        cert.counterexample = std::make_pair(good[i], good[j]);
        cert.gap = t_max;
        return cert;
      }
      worst = std::max(worst, *best);
    }
  }
  cert.gap = worst;

  if (good.empty()) return cert;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, good.size() - 1);
  auto within = [&](const std::set<StateId>& from) {
    std::set<StateId> out;
    for (StateId s : from) {
      const auto& layers = reach(s);
      for (std::size_t k = 0; k <= cert.gap; ++k) out.insert(layers[k].begin(), layers[k].end());
    }
    return out;
  };
  for (std::size_t r = 0; r < n_triples; ++r) {
    std::size_t a = pick(rng), b = pick(rng), c = pick(rng);
    ++cert.triples;
    std::set<StateId> cur{end_state[a]};
    bool ok = true;
    for (std::size_t idx : {b, c}) {
      std::set<StateId> next;
      for (StateId q : within(cur))
        if (auto s = run_word(q, idx)) next.insert(*s);
      if (next.empty()) {
        ok = false;
        break;
      }
      cur = std::move(next);
    }
    if (!ok) {
      cert.status = SpecStatus::Inconclusive;
      cert.failed_triple = std::array<Word, 3>{good[a], good[b], good[c]};
      break;
    }
  }
  return cert;
}

// ---------------------------------------------------------------------------
// Obstruction entropy of C^p cup C^s

struct ObstructionCounts {
  std::size_t n;
  std::size_t prefixes;
  std::size_t suffixes;
  std::size_t both;  // size of the union
};

inline std::vector<ObstructionCounts> obstruction_counts(const Decomposition& d, std::size_t n_max) {
  std::vector<ObstructionCounts> out;
  for (std::size_t n = 1; n <= n_max; ++n) {
    auto p = d.prefix_words(n);
    auto s = d.suffix_words(n);
    std::vector<Word> u;
    std::set_union(p.begin(), p.end(), s.begin(), s.end(), std::back_inserter(u));
    out.push_back({n, p.size(), s.size(), u.size()});
  }
  return out;
}

// Growth entropy of C^p cup C^s. An upper bound for the obstruction entropy
// only when G^M has (W)-specification, which callers certify separately.
inline EntropyEstimate obstruction_upper_bound(const Decomposition& d, std::size_t n_max) {
  if (n_max == 0) fail(ErrorCode::InvalidSpec, "n_max must be >= 1");
  std::vector<BigInt> counts{1};
  for (const auto& c : obstruction_counts(d, n_max)) counts.push_back(c.both);
  auto e = growth_from_counts(counts);
  e.flags.push_back("upper bound contingent on (W)-specification of G^M");
  return e;
}

// ---------------------------------------------------------------------------
// Left and right constraints

struct Constraint {
  Word word;
  Word witness;
};

// w is a left constraint if some v has w_2..w_n v legal but w v illegal.
inline std::vector<Constraint> enumerate_left_constraints(const LanguageOracle& lang, std::size_t n, std::size_t ext) {
  require_horizon(lang, n + ext);
  std::vector<Constraint> out;
  if (n == 0) return out;
  for (const Word& w : enumerate_words(lang, n)) {
    StateId tail = *run(lang, WordView(w).subspan(1));
    StateId full = *run(lang, w);
    // breadth-first over v, tracking (tail state, full state or dead)
    std::map<std::pair<StateId, std::int64_t>, bool> seen;
    std::deque<std::tuple<StateId, std::int64_t, Word>> queue{{tail, full, Word{}}};
    std::optional<Word> found;
    while (!queue.empty() && !found) {
      auto [t, f, v] = queue.front();
      queue.pop_front();
      if (v.size() == ext) continue;
      for (Symbol a = 1; a <= lang.alphabet().size() && !found; ++a) {
        auto t2 = lang.next_state(t, a);
        if (!t2) continue;
        Word v2 = v;
        v2.push_back(a);
        std::optional<StateId> f2;
        if (f >= 0) f2 = lang.next_state(static_cast<StateId>(f), a);
        if (!f2) {
          found = v2;
          break;
        }
        auto key = std::make_pair(*t2, static_cast<std::int64_t>(*f2));
        if (seen.emplace(key, true).second) queue.emplace_back(*t2, static_cast<std::int64_t>(*f2), std::move(v2));
      }
    }
    if (found) out.push_back({w, *found});
  }
  return out;
}

// Mirror image: some v has v w_1..w_{n-1} legal but v w illegal.
inline std::vector<Constraint> enumerate_right_constraints(const LanguageOracle& lang, std::size_t n, std::size_t ext) {
  require_horizon(lang, n + ext);
  std::vector<Constraint> out;
  if (n == 0) return out;
  std::vector<std::vector<Word>> lefts(ext + 1);
  for (std::size_t k = 1; k <= ext; ++k) lefts[k] = enumerate_words(lang, k);
  for (const Word& w : enumerate_words(lang, n)) {
    WordView head = WordView(w).first(n - 1);
    std::optional<Word> found;
    for (std::size_t k = 1; k <= ext && !found; ++k)
      for (const Word& v : lefts[k])
        if (run(lang, concat(v, head)) && !run(lang, concat(v, w))) {
          found = v;
          break;
        }
    if (found) out.push_back({w, *found});
  }
  return out;
}

// ---------------------------------------------------------------------------
// The A_n^k table of the fat gap entropy lower bound

struct AnkTable {
  std::size_t n_max = 0, k_max = 0;
  std::vector<std::vector<BigInt>> a;  // a[n][k], index 0 unused
  std::vector<BigInt> row_sum;         // sum over all k of A_n^k
  std::vector<BigInt> language_count;  // #L_n
  bool property_i = true;
  bool property_ii = true;
  bool property_iii = true;

  const BigInt& at(std::size_t n, std::size_t k) const { return a.at(n).at(k); }
};

namespace detail {
inline void for_each_filler(int n_symbols, std::size_t len, const std::function<void(Word)>& fn) {
  Word w(len, 2);
  while (true) {
    fn(w);
    std::size_t i = len;
    while (i > 0 && w[i - 1] == n_symbols) w[--i] = 2;
    if (i == 0) break;
    ++w[i - 1];
  }
}
}  // namespace detail

inline AnkTable ank_table(const GapSet& gaps, int n_symbols, std::size_t n_max, std::size_t k_max) {
  if (n_symbols < 2) fail(ErrorCode::InvalidSpec, "N must be >= 2");
  AnkTable t;
  t.n_max = n_max;
  t.k_max = k_max;
  const std::size_t kk = std::max(k_max, n_max);  // every generator has length >= 1
  t.a.assign(n_max + 1, std::vector<BigInt>(kk + 1, 0));
  BigInt base = n_symbols - 1;
  for (std::size_t n = 1; n <= n_max; ++n)
    t.a[n][1] = gaps.contains(n - 1) ? BigInt(boost::multiprecision::pow(base, static_cast<unsigned>(n - 1))) : BigInt(0);
  for (std::size_t k = 2; k <= kk; ++k)
    for (std::size_t n = 1; n <= n_max; ++n) {
      BigInt s = 0;
      for (std::size_t m = 1; m < n; ++m) s += t.a[n - m][k - 1] * t.a[m][1];
      t.a[n][k] = s;
    }
  // (iii) for every split k + l
  for (std::size_t k = 1; k <= kk && t.property_iii; ++k)
    for (std::size_t l = 1; k + l <= kk && t.property_iii; ++l)
      for (std::size_t n = 1; n <= n_max; ++n) {
        BigInt s = 0;
        for (std::size_t m = 1; m < n; ++m) s += t.a[n - m][k] * t.a[m][l];
        if (s != t.a[n][k + l]) {
          t.property_iii = false;
          break;
        }
      }
  // (ii) against the generator model by brute force on short lengths
  FatGapModel model(gaps, n_symbols);
  for (std::size_t n = 1; n <= n_max && n <= 12; ++n) {
    BigInt direct = 0;
    detail::for_each_filler(n_symbols, n - 1, [&](Word w) {
      w.push_back(1);
      if (model.is_generator(w)) ++direct;
    });
    if (direct != t.a[n][1]) t.property_ii = false;
  }
  // (i) against exact word counts
  auto lang = build_fat_sgap(gaps, n_symbols, n_max);
  t.language_count = count_sequence(*lang, n_max);
  t.row_sum.assign(n_max + 1, 0);
  for (std::size_t n = 1; n <= n_max; ++n) {
    for (std::size_t k = 1; k <= kk; ++k) t.row_sum[n] += t.a[n][k];
    if (t.row_sum[n] > t.language_count[n]) t.property_i = false;
  }
  for (auto& row : t.a) row.resize(k_max + 1);
  return t;
}

// F_1(x) = sum_n A_n^1 x^n = (1/(N-1)) sum_{s in S} ((N-1)x)^{s+1}, summed
// until the geometric tail bound drops below tol. Partial sums never exceed
// the true value.
inline double f1_series(const GapSet& gaps, int n_symbols, double x, double tol = 1e-12) {
  const double base = n_symbols - 1;
  const double y = base * x;
  if (!(y < 1) && gaps.infinite()) return std::numeric_limits<double>::infinity();
  std::uint64_t cutoff;
  if (!gaps.infinite())
    cutoff = *gaps.max_member();
  else
    cutoff = static_cast<std::uint64_t>(std::max(1.0, std::ceil(std::log(tol * (1 - y)) / std::log(y))));
  double s = 0;
  for (std::uint64_t n : gaps.members_up_to(cutoff)) s += std::pow(y, static_cast<double>(n + 1));
  return s / base;
}

// ---------------------------------------------------------------------------
// Counting maps behind the positivity of the obstruction entropy

// Case 2 data: a core word u with at least two 1's separated by nonempty
// filler blocks, and a gap size t for the (W)-specification of G.
struct CaseTwoWitness {
  Word u;
  std::size_t t = 0;
};

struct CountingMapReport {
  int case_id = 0;
  std::size_t ell = 0;
  std::size_t domain_length = 0;  // 2^ell in Case 1, a_ell in Case 2
  std::size_t words = 0;
  std::size_t max_multiplicity = 0;
  BigInt bound = 0;               // (N-1)^(2^(ell-1))
  bool injective = false;
  bool windows_ok = true;         // length windows for 1 in p or s
  bool core_split_ok = true;           // a - 2^(ell-1) <= |p| <= a when 1 is in c
  bool image_range_ok = true;     // image length inside the codomain window
  bool images_in_collections = true;
  bool al2 = true;                // 2 a / 3 > 2^(ell-1)
  std::size_t image_min = 0, image_max = 0;
  std::size_t codomain_lo = 0, codomain_hi = 0;
  std::size_t core_has_one = 0;   // words whose core carries the 1
  std::optional<CaseTwoWitness> witness;
  std::vector<std::string> violations;
};

inline bool filler_only(WordView w) { return !contains_symbol(w, 1); }

// The fixed witness for the natural decomposition of a fat gap shift:
// u = 2^s 1 2^s 1 with s the least positive gap; concatenations of generators
// are again core words, so t = 0.
inline CaseTwoWitness default_case_two_witness(const GapSet& gaps) {
  auto s = gaps.next_member(1);
  if (!s) fail(ErrorCode::InvalidSpec, "gap set has no positive member");
  Word u(*s, 2);
  u.push_back(1);
  u.insert(u.end(), *s, 2);
  u.push_back(1);
  return {u, 0};
}

// Case 1 fixture: G is the filler words, C^p all legal words, C^s = {empty}.
inline std::shared_ptr<const Decomposition> filler_core_decomposition(std::shared_ptr<const LanguageOracle> lang) {
  auto l = lang;
  return std::make_shared<PredicateDecomposition>(
      lang, [l](WordView w) { return run(*l, w).has_value(); }, [l](WordView w) { return filler_only(w) && run(*l, w); },
      [](WordView) { return false; }, "filler-core(" + lang->describe() + ")");
}


// Evaluates Phi_ell (Case 1) or Psi_ell (Case 2) on every w over the fillers
// of the domain length, using the decomposition's fixed factorisation of w1w.
// force_case = 0 classifies automatically: Case 2 iff some core word carries
// a 1 (a supplied witness u that is a core word, or a core met while
// factorising the Case 1 domain).
inline CountingMapReport counting_map_multiplicity(const Decomposition& d, int n_symbols, std::size_t ell,
                                            std::optional<CaseTwoWitness> witness = std::nullopt, int force_case = 0) {
  if (n_symbols < 3) fail(ErrorCode::InvalidSpec, "counting maps need N >= 3");
  if (ell < 1 || ell > 20) fail(ErrorCode::InvalidSpec, "ell must lie in 1..20");
  const std::size_t two_l = std::size_t{1} << ell;
  const std::size_t half = two_l / 2;
  CountingMapReport rep;
  rep.ell = ell;
  rep.bound = boost::multiprecision::pow(BigInt(n_symbols - 1), static_cast<unsigned>(half));

  auto factor_w1w = [&](const Word& w) {
    Word x = w;
    x.push_back(1);
    x.insert(x.end(), w.begin(), w.end());
    auto f = d.factorize(x);
    if (!f) fail(ErrorCode::FactorizeIncomplete, "cannot factorise " + to_text(x));
    return *f;
  };

  int use_case = force_case;
  if (use_case == 0) {
    if (witness && contains_symbol(witness->u, 1) && d.is_core(witness->u)) use_case = 2;
    if (use_case == 0) {
      require_horizon(d.language(), 2 * two_l + 1);
      bool one_in_core = false;
      detail::for_each_filler(n_symbols, two_l, [&](const Word& w) {
        if (!one_in_core && contains_symbol(factor_w1w(w).core, 1)) one_in_core = true;
      });
      use_case = one_in_core ? 2 : 1;
    }
  }
  rep.case_id = use_case;

  std::size_t a;
  if (use_case == 1) {
    a = two_l;
    rep.codomain_lo = two_l + 1;
    rep.codomain_hi = 2 * two_l + 1;
  } else {
    if (!witness) fail(ErrorCode::InvalidSpec, "Case 2 needs a witness (u, t)");
    const Word& u = witness->u;
    std::vector<std::size_t> ones;
    for (std::size_t i = 0; i < u.size(); ++i)
      if (u[i] == 1) ones.push_back(i);
    if (ones.size() < 2) fail(ErrorCode::InvalidSpec, "witness u needs at least two 1's");
    for (std::size_t i = 1; i < ones.size(); ++i)
      if (ones[i] == ones[i - 1] + 1) fail(ErrorCode::InvalidSpec, "witness u needs nonempty blocks between 1's");
    if (!d.is_core(u)) fail(ErrorCode::InvalidSpec, "witness u is not a core word");
    std::size_t tail = u.size() - 1 - ones.back();
    long long al = static_cast<long long>(two_l) - 2 * static_cast<long long>(witness->t) -
                   static_cast<long long>(tail) - 1;
    if (al < 1) fail(ErrorCode::InvalidSpec, "a_ell < 1; increase ell");
    a = static_cast<std::size_t>(al);
    rep.witness = witness;
    rep.al2 = 2.0 * static_cast<double>(a) / 3.0 > static_cast<double>(half);
    rep.codomain_lo = a >= half ? a - half : 0;
    rep.codomain_hi = 2 * a + 1;
  }
  rep.domain_length = a;
  require_horizon(d.language(), 2 * a + 1);

  std::map<Word, std::size_t> fibre;
  rep.image_min = std::numeric_limits<std::size_t>::max();
  auto note = [&](const std::string& msg) {
    if (rep.violations.size() < 8) rep.violations.push_back(msg);
  };
  detail::for_each_filler(n_symbols, a, [&](const Word& w) {
    ++rep.words;
    Factorization f = factor_w1w(w);
    bool in_p = contains_symbol(f.prefix, 1), in_c = contains_symbol(f.core, 1), in_s = contains_symbol(f.suffix, 1);
    for (const Word* r : {&f.prefix, &f.suffix}) {
      bool has = contains_symbol(*r, 1);
      bool ok = has ? (r->size() >= a + 1 && r->size() <= 2 * a + 1) : r->size() <= a;
      if (!ok) {
        rep.windows_ok = false;
        note("length window fails for " + to_text(w));
      }
    }
    if (in_c) {
      ++rep.core_has_one;
      if (use_case == 2 && !(f.prefix.size() + half >= a && f.prefix.size() <= a)) {
        rep.core_split_ok = false;
        note("|p| outside [a - 2^(ell-1), a] for " + to_text(w));
      }
      if (use_case == 1) note("core carries the 1 in Case 1 for " + to_text(w));
    }
    (void)in_p;
    const Word& image = in_s ? f.suffix : f.prefix;
    bool member = in_s ? d.is_suffix(image) : d.is_prefix(image);
    if (!member) rep.images_in_collections = false;
    if (image.size() < rep.codomain_lo || image.size() > rep.codomain_hi) {
      rep.image_range_ok = false;
      note("image length " + std::to_string(image.size()) + " outside codomain for " + to_text(w));
    }
    rep.image_min = std::min(rep.image_min, image.size());
    rep.image_max = std::max(rep.image_max, image.size());
    ++fibre[image];
  });
  for (const auto& [img, c] : fibre) rep.max_multiplicity = std::max(rep.max_multiplicity, c);
  rep.injective = rep.max_multiplicity <= 1;
  return rep;
}

// ---------------------------------------------------------------------------
// Decomposition from a Markov diagram

// C^p = {empty}; G = labels of paths whose end vertices lie in D_N and the
// component; C^s = labels of paths that start in D_{N+1} and stay in the
// component outside D_N. The factoriser follows every admissible start
// vertex and cuts after the last visit to D_N, taking the latest such cut
// (smallest start id on ties).
class HofbauerDecomposition : public Decomposition {
 public:
  HofbauerDecomposition(std::shared_ptr<const DiagramLanguage> lang, std::vector<std::uint32_t> component,
                        std::size_t cut)
      : Decomposition(lang), diagram_(lang->diagram_ptr()), cut_(cut) {
    in_component_.assign(diagram_->size(), false);
    for (auto v : component) in_component_.at(v) = true;
    if (cut_ > diagram_->depth && !diagram_->complete)
      fail(ErrorCode::InvalidSpec, "cut exceeds diagram depth");
  }

  bool truncated() const { return !diagram_->complete; }
  std::size_t cut() const { return cut_; }

  bool is_prefix(WordView w) const override { return w.empty(); }

  bool is_core(WordView w) const override {
    if (w.empty()) return true;
    for (std::uint32_t v = 0; v < diagram_->size(); ++v) {
      if (!core_start(v, w[0])) continue;
      auto end = follow(v, w);
      if (end && low(end->back())) return true;
    }
    return false;
  }

  bool is_suffix(WordView w) const override {
    if (w.empty()) return true;
    for (std::uint32_t v = 0; v < diagram_->size(); ++v) {
      if (!suffix_start(v, w[0])) continue;
      auto path = follow(v, w);
      if (path && std::none_of(path->begin(), path->end(), [&](std::uint32_t x) { return low(x); })) return true;
    }
    return false;
  }

  std::optional<Factorization> factorize(WordView w) const override {
    if (w.empty()) return Factorization{};
    std::optional<std::size_t> best;
    for (std::uint32_t v = 0; v < diagram_->size(); ++v) {
      if (!core_start(v, w[0])) continue;
      auto path = follow(v, w);
      if (!path) continue;
      std::size_t j0 = 0;
      for (std::size_t i = 0; i < path->size(); ++i)
        if (low((*path)[i])) j0 = i;
      if (!best || j0 > *best) best = j0;
    }
    if (!best) return std::nullopt;
    auto cut = static_cast<std::ptrdiff_t>(*best + 1);
    return Factorization{Word{}, Word(w.begin(), w.begin() + cut), Word(w.begin() + cut, w.end())};
  }

  std::vector<Word> prefix_words(std::size_t n) const override {
    if (n == 0) return {Word{}};
    return {};
  }

  std::vector<Word> suffix_words(std::size_t n) const override {
    require_horizon(language(), n);
    if (n == 0) return {Word{}};
    std::set<Word> out;
    Word buf;
    std::function<void(std::uint32_t)> dfs = [&](std::uint32_t v) {
      buf.push_back(diagram_->vertices[v].symbol);
      if (buf.size() == n) {
        out.insert(buf);
      } else {
        for (std::uint32_t e : diagram_->out_edges[v]) {
          std::uint32_t u = diagram_->edges[e].dst;
          if (in_component_[u] && !low(u)) dfs(u);
        }
      }
      buf.pop_back();
    };
    for (std::uint32_t v = 0; v < diagram_->size(); ++v)
      if (suffix_start(v, diagram_->vertices[v].symbol)) dfs(v);
    return {out.begin(), out.end()};
  }

  std::string describe() const override {
    return "hofbauer(" + diagram_->map->name() + ", N=" + std::to_string(cut_) + ")";
  }

 private:
  bool low(std::uint32_t v) const { return diagram_->vertices[v].level <= cut_; }
  bool core_start(std::uint32_t v, Symbol a) const {
    return in_component_[v] && low(v) && diagram_->vertices[v].symbol == a;
  }
  bool suffix_start(std::uint32_t v, Symbol a) const {
    return in_component_[v] && diagram_->vertices[v].level == cut_ + 1 && diagram_->vertices[v].symbol == a;
  }
  // Vertices C_0..C_{n-1} spelling w from C_0 = v inside the component.
  std::optional<std::vector<std::uint32_t>> follow(std::uint32_t v, WordView w) const {
    std::vector<std::uint32_t> path{v};
    for (std::size_t i = 1; i < w.size(); ++i) {
      auto next = diagram_->successor(path.back(), w[i]);
      if (!next || !in_component_[*next]) return std::nullopt;
      path.push_back(*next);
    }
    return path;
  }

  std::shared_ptr<const MarkovDiagram> diagram_;
  std::vector<bool> in_component_;
  std::size_t cut_;
};

inline std::shared_ptr<const HofbauerDecomposition> diagram_decomposition(std::shared_ptr<const DiagramLanguage> lang,
                                                                          const ComponentResult& component,
                                                                          std::size_t cut) {
  return std::make_shared<HofbauerDecomposition>(std::move(lang), component.vertices, cut);
}

}  // namespace symdyn
