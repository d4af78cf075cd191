#pragma once

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "entropy.hpp"
#include "errors.hpp"
#include "graph.hpp"
#include "language.hpp"
#include "shifts.hpp"
#include "thermo.hpp"
#include "word.hpp"

namespace symdyn {

using Rational = boost::multiprecision::cpp_rational;

// Exact value of a finite double.
inline Rational exact_rational(double x) {
  if (!std::isfinite(x)) fail(ErrorCode::InvalidSpec, "potential value is not finite");
  if (x == 0) return 0;
  int exp = 0;
  double m = std::frexp(x, &exp);  // x = m 2^exp, 0.5 <= |m| < 1
  auto mant = static_cast<long long>(std::ldexp(m, 53));
  exp -= 53;
  Rational r = Rational(BigInt(mant));
  BigInt p = BigInt(1) << std::abs(exp);
  return exp >= 0 ? r * Rational(p) : r / Rational(p);
}

// ---------------------------------------------------------------------------
// Maximum mean cycle with exact arithmetic

struct ExactCycleResult {
  Rational mean;
  std::vector<std::uint32_t> cycle;         // arc indices, simple, canonical
  std::vector<std::uint32_t> optimal_arcs;  // arcs lying on some optimal cycle
};

// Karp's value, then the arcs that are tight for a potential d with
// d(u) + w - lambda <= d(v) everywhere; arcs inside strongly connected pieces
// of the tight graph are exactly those on optimal cycles. The reported cycle
// is the shortest one, then lexicographically least in arc ids.
inline ExactCycleResult max_mean_cycle_exact(std::size_t n, const std::vector<WeightedArc<Rational>>& arcs) {
  auto lambda = max_cycle_mean<Rational>(n, arcs);
  if (!lambda) fail(ErrorCode::NoCycle, "graph is acyclic");
  ExactCycleResult res;
  res.mean = *lambda;

  std::vector<Rational> d(n, Rational(0));
  for (std::size_t round = 0; round <= n; ++round) {
    bool changed = false;
    for (const auto& a : arcs) {
      Rational cand = d[a.src] + a.weight - *lambda;
      if (cand > d[a.dst]) {
        d[a.dst] = cand;
        changed = true;
      }
    }
    if (!changed) break;
  }
  std::vector<Arc> tight;
  std::vector<std::uint32_t> tight_ids;
  for (std::uint32_t i = 0; i < arcs.size(); ++i)
    if (d[arcs[i].src] + arcs[i].weight - *lambda == d[arcs[i].dst]) {
      tight.push_back({arcs[i].src, arcs[i].dst});
      tight_ids.push_back(i);
    }
  auto scc = strongly_connected_components(n, tight);
  std::vector<std::vector<std::uint32_t>> adj(n);  // optimal arc ids by source
  for (std::size_t t = 0; t < tight.size(); ++t)
    if (scc.component_of[tight[t].src] == scc.component_of[tight[t].dst]) {
      res.optimal_arcs.push_back(tight_ids[t]);
      adj[tight[t].src].push_back(tight_ids[t]);
    }

  std::optional<std::vector<std::uint32_t>> best;
  for (std::uint32_t start = 0; start < n; ++start) {
    if (adj[start].empty()) continue;
    // BFS with arcs in id order finds the lexicographically least shortest
    // closed walk back to start.
    std::vector<std::optional<std::uint32_t>> via(n);
    std::deque<std::uint32_t> queue;
    std::optional<std::uint32_t> closing;
    queue.push_back(start);
    std::vector<bool> seen(n, false);
    seen[start] = true;
    while (!queue.empty() && !closing) {
      std::uint32_t v = queue.front();
      queue.pop_front();
      for (std::uint32_t id : adj[v]) {
        std::uint32_t u = arcs[id].dst;
        if (u == start) {
          closing = id;
          break;
        }
        if (!seen[u]) {
          seen[u] = true;
          via[u] = id;
          queue.push_back(u);
        }
      }
    }
    if (!closing) continue;
    std::vector<std::uint32_t> cyc{*closing};
    for (std::uint32_t v = arcs[*closing].src; v != start; v = arcs[*via[v]].src) cyc.push_back(*via[v]);
    std::reverse(cyc.begin(), cyc.end());
    if (!best || cyc.size() < best->size() || (cyc.size() == best->size() && cyc < *best)) best = cyc;
  }
  res.cycle = *best;
  return res;
}

// ---------------------------------------------------------------------------
// Maximal ergodic averages on block graphs

struct CycleMeasure {
  std::vector<std::uint32_t> edges;
  Word word;  // new symbol along each edge
  Rational mean_exact;
  double mean = 0;
  MarkovMeasure measure;
};

struct ErgodicMax {
  double value = 0;
  Rational exact;
  CycleMeasure cycle;
  std::vector<std::uint32_t> optimal_edges;
};

inline std::vector<WeightedArc<Rational>> exact_weights(const BlockGraph& g, const LocallyConstantPotential& f) {
  if (f.range() > g.k + 1) fail(ErrorCode::InvalidSpec, "potential range exceeds block edge length");
  std::vector<WeightedArc<Rational>> arcs;
  for (const auto& e : g.edges) arcs.push_back({e.src, e.dst, exact_rational(f(e.word))});
  return arcs;
}

// Lambda(f) = sup of the integral of f over invariant measures, which for
// locally constant f on an SFT is the maximum mean weight of a cycle in the
// block graph.
inline ErgodicMax max_ergodic_average(std::shared_ptr<const BlockGraph> g, const LocallyConstantPotential& f) {
  auto r = max_mean_cycle_exact(g->size(), exact_weights(*g, f));
  ErgodicMax out;
  out.exact = r.mean;
  out.value = static_cast<double>(r.mean);
  out.optimal_edges = r.optimal_arcs;
  out.cycle.edges = r.cycle;
  for (auto e : r.cycle) out.cycle.word.push_back(g->edges[e].word.back());
  out.cycle.mean_exact = r.mean;
  out.cycle.mean = out.value;
  out.cycle.measure = cycle_measure(g, r.cycle);
  return out;
}

// Graph of the edges on optimal cycles.
inline BlockGraph optimal_subgraph(const BlockGraph& g, const ErgodicMax& m) { return g.edge_subgraph(m.optimal_edges); }

// ---------------------------------------------------------------------------
// Typical words

struct TypicalWord {
  Word word;
  double mass = 0;
  std::vector<double> averages;
};

struct TypicalWordSet {
  std::size_t k = 0;
  double eps = 0;
  double entropy = 0;            // h(mu)
  std::vector<double> integrals; // integral of each f
  std::vector<TypicalWord> words;
  std::size_t candidates = 0;    // k-words of positive mass
  double fraction = 0;           // total mass of the selection
  double window_lo = 0, window_hi = 0;
  bool in_window = false;

  std::vector<Word> word_list() const {
    std::vector<Word> out;
    for (const auto& w : words) out.push_back(w.word);
    return out;
  }
};

// Birkhoff average of f over the windows that fit inside w.
inline double word_average(WordView w, const LocallyConstantPotential& f) {
  const std::size_t r = f.range();
  if (w.size() < r) fail(ErrorCode::InvalidSpec, "word shorter than potential range");
  double s = 0;
  for (std::size_t i = 0; i + r <= w.size(); ++i) s += f(w.subspan(i, r));
  return s / static_cast<double>(w.size() - r + 1);
}

// k-words whose mass lies in [e^{-k(h+eps)}, e^{-k(h-eps)}] and whose
// averages of every f are within eps/2 of the integrals.
inline TypicalWordSet select_typical_words(const MarkovMeasure& mu, const std::vector<LocallyConstantPotential>& fs,
                                           double eps, std::size_t k) {
  const BlockGraph& g = *mu.graph;
  if (k < g.k) fail(ErrorCode::InvalidSpec, "k must be at least the block length");
  if (!(eps > 0)) fail(ErrorCode::InvalidSpec, "eps must be positive");
  TypicalWordSet set;
  set.k = k;
  set.eps = eps;
  set.entropy = measure_entropy(mu);
  for (const auto& f : fs) set.integrals.push_back(integral(mu, f));
  const double kd = static_cast<double>(k);
  const double lo = -kd * (set.entropy + eps), hi = -kd * (set.entropy - eps);

  Word buf;
  std::function<void(std::uint32_t, double)> dfs = [&](std::uint32_t v, double log_mass) {
    if (buf.size() == k) {
      ++set.candidates;
      if (log_mass < lo - 1e-12 || log_mass > hi + 1e-12) return;
      TypicalWord tw{buf, std::exp(log_mass), {}};
      for (std::size_t i = 0; i < fs.size(); ++i) {
        double a = word_average(buf, fs[i]);
        if (std::abs(a - set.integrals[i]) > eps / 2) return;
        tw.averages.push_back(a);
      }
      set.fraction += tw.mass;
      set.words.push_back(std::move(tw));
      return;
    }
    for (auto e : g.out[v]) {
      if (mu.prob[e] <= 0) continue;
      buf.push_back(g.edges[e].word.back());
      dfs(g.edges[e].dst, log_mass + std::log(mu.prob[e]));
      buf.pop_back();
    }
  };
  for (std::uint32_t v = 0; v < g.size(); ++v) {
    if (mu.stationary[v] <= 0) continue;
    buf = g.states[v];
    dfs(v, std::log(mu.stationary[v]));
  }
  if (set.words.empty()) fail(ErrorCode::EmptySelection, "no typical word of length " + std::to_string(k));
  set.window_lo = set.fraction * std::exp((set.entropy - eps) * kd);
  set.window_hi = std::exp((set.entropy + eps) * kd);
  auto count = static_cast<double>(set.words.size());
  set.in_window = count >= set.window_lo * (1 - 1e-12) && count <= set.window_hi * (1 + 1e-12);
  return set;
}

// ---------------------------------------------------------------------------
// Gluing

struct GlueResult {
  std::shared_ptr<const CodedShift> shift;
  std::vector<Word> generators;
  std::size_t checked_length = 0;
  bool sublanguage = true;
  std::optional<Word> violation;
  EntropyEstimate entropy;  // Perron entropy of the glued shift's automaton
};

// Generators v c with v from words and c a connector of length <= t that
// joins v to some word of the set inside lang. Fails with NoConnector when an
// ordered pair cannot be joined within t.
inline GlueResult glue_subshift(const std::vector<Word>& words, std::shared_ptr<const LanguageOracle> lang,
                                std::size_t t, std::size_t check_length = 12, std::size_t horizon = 40,
                                std::size_t state_limit = 200000) {
  if (words.empty()) fail(ErrorCode::InvalidSpec, "no words to glue");
  std::size_t longest = 0;
  for (const Word& v : words) longest = std::max(longest, v.size());
  require_horizon(*lang, 2 * longest + t);
  std::vector<std::vector<Word>> by_len(t + 1);
  auto full = build_full(lang->alphabet().size(), t + 1);
  for (std::size_t j = 0; j <= t; ++j) by_len[j] = enumerate_words(*full, j);

  std::set<Word> gens;
  for (const Word& v : words) {
    auto sv = run(*lang, v);
    if (!sv) fail(ErrorCode::InvalidSpec, to_text(v) + " is not in the language");
    std::set<std::size_t> joined;
    for (std::size_t j = 0; j <= t; ++j)
      for (const Word& c : by_len[j]) {
        auto sc = run_from(*lang, *sv, c);
        if (!sc) continue;
        bool useful = false;
        for (std::size_t i = 0; i < words.size(); ++i)
          if (run_from(*lang, *sc, words[i])) {
            joined.insert(i);
            useful = true;
          }
        if (useful) gens.insert(concat(v, c));
      }
    if (joined.size() != words.size()) {
      for (std::size_t i = 0; i < words.size(); ++i)
        if (!joined.count(i))
          fail(ErrorCode::NoConnector, "no connector of length <= " + std::to_string(t) + " from " + to_text(v) +
                                           " to " + to_text(words[i]));
    }
  }
  GlueResult res;
  res.generators.assign(gens.begin(), gens.end());
  std::vector<Word> with_empty = res.generators;
  with_empty.push_back(Word{});
  res.shift = build_coded(lang->alphabet(), generators_from_list(with_empty, "glued"), horizon);
  res.checked_length = std::min({check_length, lang->horizon(), horizon});
  for (std::size_t n = 1; n <= res.checked_length && res.sublanguage; ++n)
    for_each_word(*res.shift, n, [&](WordView x) {
      if (res.sublanguage && !run(*lang, x)) {
        res.sublanguage = false;
        res.violation = Word(x.begin(), x.end());
      }
    });
  res.entropy = perron_entropy(explore_automaton(*res.shift, state_limit));
  return res;
}

// ---------------------------------------------------------------------------
// Distance potential

// On each m-word w of the ambient language: 0 if w is a target word, else
// -2^{-j} with j the length of the longest target prefix of w. This is the
// one-sided distance from [w] to the target at resolution m.
inline LocallyConstantPotential distance_potential(const LanguageOracle& target, const LanguageOracle& ambient,
                                                   std::size_t m) {
  if (m == 0) fail(ErrorCode::InvalidSpec, "depth must be >= 1");
  require_horizon(target, m);
  require_horizon(ambient, m);
  return LocallyConstantPotential::from_function(ambient, m, [&](WordView w) {
    std::size_t j = 0;
    std::optional<StateId> s = target.initial_state();
    while (j < m && target.alphabet().contains(w[j]) && (s = target.next_state(*s, w[j]))) ++j;
    return j == m ? 0.0 : -std::ldexp(1.0, -static_cast<int>(j));
  });
}

// ---------------------------------------------------------------------------
// Entropy of zero-temperature limits

struct MaximizerProfile {
  std::vector<TemperaturePoint> path;
  ErgodicMax maximum;
  double optimal_entropy = 0;  // Perron entropy of the optimal-edge subgraph
  double final_entropy = 0;
  double final_mean_gap = 0;   // Lambda - integral at the last beta
  bool entropy_within_bound = true;
};

inline MaximizerProfile maximizer_entropy_profile(std::shared_ptr<const BlockGraph> g, const LocallyConstantPotential& f,
                                                  const std::vector<double>& betas) {
  if (betas.empty()) fail(ErrorCode::InvalidSpec, "empty schedule");
  MaximizerProfile p;
  p.path = zero_temperature_path(g, f, betas);
  p.maximum = max_ergodic_average(g, f);
  auto sub = optimal_subgraph(*g, p.maximum);
  p.optimal_entropy = perron_entropy(sub.size(), sub.arcs()).value;
  p.final_entropy = p.path.back().entropy;
  p.final_mean_gap = p.maximum.value - p.path.back().mean;
  p.entropy_within_bound = p.final_entropy <= p.optimal_entropy + 1e-6;
  return p;
}

}  // namespace symdyn
