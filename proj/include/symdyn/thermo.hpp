#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "errors.hpp"
#include "graph.hpp"
#include "language.hpp"
#include "perron.hpp"
#include "word.hpp"

namespace symdyn {

// ---------------------------------------------------------------------------
// Block graphs

// Higher block presentation: states are the k-words of a language, edges its
// (k+1)-words from the first k symbols to the last k. For an SFT whose
// forbidden words have length <= k+1 this is exact; otherwise it is the
// (k+1)-step SFT approximation.
struct BlockGraph {
  struct Edge {
    std::uint32_t src;
    std::uint32_t dst;
    Word word;  // length k+1
  };

  std::size_t k = 1;
  int alphabet_size = 2;
  std::vector<Word> states;
  std::vector<Edge> edges;
  std::vector<std::vector<std::uint32_t>> out;  // edge ids per state

  std::size_t size() const { return states.size(); }

  std::vector<Arc> arcs() const {
    std::vector<Arc> a;
    for (const auto& e : edges) a.push_back({e.src, e.dst});
    return a;
  }

  std::optional<std::uint32_t> state_of(WordView w) const {
    auto it = std::lower_bound(states.begin(), states.end(), w,
                               [](const Word& a, WordView b) { return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end()); });
    if (it == states.end() || !std::equal(it->begin(), it->end(), w.begin(), w.end())) return std::nullopt;
    return static_cast<std::uint32_t>(it - states.begin());
  }

  // The edge leaving s whose new symbol is a.
  std::optional<std::uint32_t> edge_from(std::uint32_t s, Symbol a) const {
    for (std::uint32_t e : out[s])
      if (edges[e].word.back() == a) return e;
    return std::nullopt;
  }

  // Subgraph on the given states (edges with both ends kept), ids renumbered
  // in increasing order of the old ids.
  BlockGraph induced(const std::vector<std::uint32_t>& keep) const {
    std::vector<std::int64_t> map(size(), -1);
    std::vector<std::uint32_t> sorted = keep;
    std::sort(sorted.begin(), sorted.end());
    BlockGraph g;
    g.k = k;
    g.alphabet_size = alphabet_size;
    for (std::uint32_t v : sorted) {
      map[v] = static_cast<std::int64_t>(g.states.size());
      g.states.push_back(states[v]);
    }
    g.out.assign(g.states.size(), {});
    for (const auto& e : edges)
      if (map[e.src] >= 0 && map[e.dst] >= 0) {
        g.out[static_cast<std::size_t>(map[e.src])].push_back(static_cast<std::uint32_t>(g.edges.size()));
        g.edges.push_back({static_cast<std::uint32_t>(map[e.src]), static_cast<std::uint32_t>(map[e.dst]), e.word});
      }
    return g;
  }

  // Subgraph keeping the listed edges and the states they touch.
  BlockGraph edge_subgraph(const std::vector<std::uint32_t>& keep_edges) const {
    std::vector<bool> used(size(), false);
    for (auto e : keep_edges) used[edges[e].src] = used[edges[e].dst] = true;
    std::vector<std::int64_t> map(size(), -1);
    BlockGraph g;
    g.k = k;
    g.alphabet_size = alphabet_size;
    for (std::uint32_t v = 0; v < size(); ++v)
      if (used[v]) {
        map[v] = static_cast<std::int64_t>(g.states.size());
        g.states.push_back(states[v]);
      }
    g.out.assign(g.states.size(), {});
    std::vector<std::uint32_t> sorted = keep_edges;
    std::sort(sorted.begin(), sorted.end());
    for (auto id : sorted) {
      const auto& e = edges[id];
      auto s = static_cast<std::uint32_t>(map[e.src]);
      g.out[s].push_back(static_cast<std::uint32_t>(g.edges.size()));
      g.edges.push_back({s, static_cast<std::uint32_t>(map[e.dst]), e.word});
    }
    return g;
  }
};

inline BlockGraph block_graph(const LanguageOracle& lang, std::size_t k) {
  if (k == 0) fail(ErrorCode::InvalidSpec, "block length must be >= 1");
  require_horizon(lang, k + 1);
  BlockGraph g;
  g.k = k;
  g.alphabet_size = lang.alphabet().size();
  g.states = enumerate_words(lang, k);
  g.out.assign(g.states.size(), {});
  for_each_word(lang, k + 1, [&](WordView w) {
    auto s = g.state_of(w.first(k));
    auto d = g.state_of(w.subspan(1));
    if (!s || !d) return;  // cannot happen for a factorial language
    g.out[*s].push_back(static_cast<std::uint32_t>(g.edges.size()));
    g.edges.push_back({*s, *d, Word(w.begin(), w.end())});
  });
  return g;
}

// Strongly connected component of largest topological entropy (ties: the one
// containing the smallest state id).
inline std::vector<std::uint32_t> main_component(const BlockGraph& g) {
  auto arcs = g.arcs();
  auto scc = strongly_connected_components(g.size(), arcs);
  auto cyclic = cyclic_components(scc, arcs);
  std::optional<std::size_t> best;
  double best_h = 0;
  for (std::size_t c = 0; c < scc.components.size(); ++c) {
    if (!cyclic[c]) continue;
    const auto& members = scc.components[c];
    std::vector<std::int64_t> local(g.size(), -1);
    for (std::size_t i = 0; i < members.size(); ++i) local[members[i]] = static_cast<std::int64_t>(i);
    LogMatrix m(members.size());
    for (const auto& a : arcs)
      if (local[a.src] >= 0 && local[a.dst] >= 0)
        m.accumulate(static_cast<std::size_t>(local[a.src]), static_cast<std::size_t>(local[a.dst]), 0.0);
    double h = perron_log(m).log_rho;
    auto smallest = *std::min_element(members.begin(), members.end());
    if (!best || h > best_h + 1e-12 ||
        (std::abs(h - best_h) <= 1e-12 && smallest < *std::min_element(scc.components[*best].begin(), scc.components[*best].end()))) {
      best = c;
      best_h = h;
    }
  }
  if (!best) fail(ErrorCode::NoCycle, "block graph has no cycle");
  auto v = scc.components[*best];
  std::sort(v.begin(), v.end());
  return v;
}

// ---------------------------------------------------------------------------
// Potentials

// phi(x) = table[x_0 .. x_{r-1}].
class LocallyConstantPotential {
 public:
  LocallyConstantPotential() = default;
  LocallyConstantPotential(std::size_t range, std::map<Word, double> table) : range_(range), table_(std::move(table)) {
    if (range_ == 0) fail(ErrorCode::InvalidSpec, "potential range must be >= 1");
    for (const auto& [w, v] : table_)
      if (w.size() != range_) fail(ErrorCode::InvalidSpec, "potential word " + symdyn::to_text(w) + " has wrong length");
  }

  // Every r-word of lang gets fn(word).
  static LocallyConstantPotential from_function(const LanguageOracle& lang, std::size_t range,
                                                const std::function<double(WordView)>& fn) {
    std::map<Word, double> t;
    for_each_word(lang, range, [&](WordView w) { t.emplace(Word(w.begin(), w.end()), fn(w)); });
    return {range, std::move(t)};
  }

  static LocallyConstantPotential constant(const LanguageOracle& lang, double c) {
    return from_function(lang, 1, [c](WordView) { return c; });
  }

  // Lines "word value"; '#' starts a comment. All words share one length.
  // Words are digit runs ("121") or comma-separated symbols ("10,2").
  static LocallyConstantPotential from_text(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::map<Word, double> t;
    std::size_t range = 0;
    while (std::getline(in, line)) {
      if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
      std::istringstream ls(line);
      std::string word;
      double value;
      if (!(ls >> word)) continue;
      if (!(ls >> value)) fail(ErrorCode::InvalidSpec, "potential line lacks a value: " + line);
      std::replace(word.begin(), word.end(), ',', ' ');
      Word w = parse_word(word);
      if (range == 0) range = w.size();
      t[w] = value;
    }
    if (t.empty()) fail(ErrorCode::InvalidSpec, "potential file is empty");
    return {range, std::move(t)};
  }

  std::string to_text() const {
    std::ostringstream os;
    os.precision(17);
    for (const auto& [w, v] : table_) {
      const bool wide = std::any_of(w.begin(), w.end(), [](Symbol a) { return a > 9; });
      std::string token;
      for (Symbol a : w) token += (wide && !token.empty() ? "," : "") + std::to_string(a);
      os << token << ' ' << v << '\n';
    }
    return os.str();
  }

  std::size_t range() const { return range_; }
  const std::map<Word, double>& table() const { return table_; }

  double operator()(WordView x) const {
    if (x.size() < range_) fail(ErrorCode::InvalidSpec, "potential needs " + std::to_string(range_) + " symbols");
    auto it = table_.find(Word(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(range_)));
    if (it == table_.end()) fail(ErrorCode::InvalidSpec, "potential undefined on " + symdyn::to_text(x.first(range_)));
    return it->second;
  }

  double sup() const {
    double m = -std::numeric_limits<double>::infinity();
    for (const auto& [w, v] : table_) m = std::max(m, v);
    return m;
  }
  double inf() const {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& [w, v] : table_) m = std::min(m, v);
    return m;
  }

  LocallyConstantPotential shifted(double c) const {
    auto t = table_;
    for (auto& [w, v] : t) v += c;
    return {range_, std::move(t)};
  }
  LocallyConstantPotential scaled(double c) const {
    auto t = table_;
    for (auto& [w, v] : t) v *= c;
    return {range_, std::move(t)};
  }

 private:
  std::size_t range_ = 1;
  std::map<Word, double> table_;
};

// Block length that lets every edge word carry the potential.
inline std::size_t block_length_for(const LocallyConstantPotential& phi) { return std::max<std::size_t>(1, phi.range() - 1); }

// ---------------------------------------------------------------------------
// Partition sums

// sup over [w] of S_n phi: the windows inside w are fixed, the last r-1 ones
// are maximised over legal right extensions of length r-1.
inline double sup_birkhoff_sum(const LanguageOracle& lang, WordView w, const LocallyConstantPotential& phi) {
  const std::size_t n = w.size(), r = phi.range();
  require_horizon(lang, n + r - 1);
  auto state = run(lang, w);
  if (!state) fail(ErrorCode::InvalidSpec, to_text(w) + " is not in the language");
  double fixed = 0;
  for (std::size_t i = 0; i + r <= n; ++i) fixed += phi(w.subspan(i, r));
  if (r == 1) return fixed;
  const std::size_t first_open = n >= r - 1 ? n - (r - 1) : 0;
  Word x(w.begin(), w.end());
  double best = -std::numeric_limits<double>::infinity();
  std::function<void(StateId)> dfs = [&](StateId s) {
    if (x.size() == n + r - 1) {
      double tail = 0;
      for (std::size_t i = first_open; i < n; ++i) tail += phi(WordView(x).subspan(i, r));
      best = std::max(best, tail);
      return;
    }
    for (Symbol a = 1; a <= lang.alphabet().size(); ++a)
      if (auto t = lang.next_state(s, a)) {
        x.push_back(a);
        dfs(*t);
        x.pop_back();
      }
  };
  dfs(*state);
  return fixed + best;
}

// log Lambda_n(D, phi) for the given words of one length n.
inline double log_partition_sum(const LanguageOracle& lang, const std::vector<Word>& words,
                                const LocallyConstantPotential& phi) {
  std::vector<double> terms;
  terms.reserve(words.size());
  for (const Word& w : words) terms.push_back(sup_birkhoff_sum(lang, w, phi));
  return log_sum(terms);
}

inline double partition_sum(const LanguageOracle& lang, const std::vector<Word>& words,
                            const LocallyConstantPotential& phi) {
  return std::exp(log_partition_sum(lang, words, phi));
}

// D given as a predicate on L_n.
inline double log_partition_sum(const LanguageOracle& lang, const std::function<bool(WordView)>& in_d,
                                const LocallyConstantPotential& phi, std::size_t n) {
  std::vector<double> terms;
  for_each_word(lang, n, [&](WordView w) {
    if (in_d(w)) terms.push_back(sup_birkhoff_sum(lang, w, phi));
  });
  return log_sum(terms);
}

// ---------------------------------------------------------------------------
// Pressure

struct PressureReport {
  double value = 0;
  double bracket_lo = 0, bracket_hi = 0;
  double beta = 1;
  std::string method = "transfer-matrix";
};

namespace detail {

inline void require_edges_carry(const BlockGraph& g, const LocallyConstantPotential& phi) {
  if (phi.range() > g.k + 1)
    fail(ErrorCode::InvalidSpec, "potential range " + std::to_string(phi.range()) + " exceeds block edge length " +
                                     std::to_string(g.k + 1));
}

inline LogMatrix weighted_matrix(const BlockGraph& g, const LocallyConstantPotential& phi, double beta,
                                 const std::vector<std::int64_t>& local, std::size_t n) {
  LogMatrix m(n);
  for (const auto& e : g.edges)
    if (local[e.src] >= 0 && local[e.dst] >= 0)
      m.accumulate(static_cast<std::size_t>(local[e.src]), static_cast<std::size_t>(local[e.dst]),
                   beta == 0 ? 0.0 : beta * phi(e.word));
  return m;
}

}  // namespace detail

// log spectral radius of exp(beta phi(e)) on edges, maximised over components.
inline PressureReport pressure(const BlockGraph& g, const LocallyConstantPotential& phi, double beta = 1.0,
                               double tol = 1e-12) {
  detail::require_edges_carry(g, phi);
  auto arcs = g.arcs();
  auto scc = strongly_connected_components(g.size(), arcs);
  auto cyclic = cyclic_components(scc, arcs);
  PressureReport rep;
  rep.beta = beta;
  bool any = false;
  for (std::size_t c = 0; c < scc.components.size(); ++c) {
    if (!cyclic[c]) continue;
    const auto& members = scc.components[c];
    std::vector<std::int64_t> local(g.size(), -1);
    for (std::size_t i = 0; i < members.size(); ++i) local[members[i]] = static_cast<std::int64_t>(i);
    auto r = perron_log(detail::weighted_matrix(g, phi, beta, local, members.size()), tol);
    if (!any || r.log_rho > rep.value) {
      rep.value = r.log_rho;
      rep.bracket_lo = r.log_lo;
      rep.bracket_hi = r.log_hi;
      any = true;
    }
  }
  if (!any) fail(ErrorCode::NoCycle, "graph has no cycle");
  return rep;
}

// ---------------------------------------------------------------------------
// Markov measures

struct MarkovMeasure {
  std::shared_ptr<const BlockGraph> graph;
  std::vector<double> prob;        // per edge, row-stochastic over out edges
  std::vector<double> stationary;  // per state

  // mu([w]) for a word over the graph's alphabet.
  double cylinder(WordView w) const {
    const std::size_t k = graph->k;
    if (w.size() < k) {
      double s = 0;
      for (std::uint32_t v = 0; v < graph->size(); ++v)
        if (std::equal(w.begin(), w.end(), graph->states[v].begin())) s += stationary[v];
      return s;
    }
    auto v = graph->state_of(w.first(k));
    if (!v) return 0;
    double m = stationary[*v];
    std::uint32_t cur = *v;
    for (std::size_t i = k; i < w.size() && m > 0; ++i) {
      auto e = graph->edge_from(cur, w[i]);
      if (!e) return 0;
      m *= prob[*e];
      cur = graph->edges[*e].dst;
    }
    return m;
  }

  double stationarity_residual() const {
    std::vector<double> next(stationary.size(), 0);
    for (std::size_t e = 0; e < graph->edges.size(); ++e)
      next[graph->edges[e].dst] += stationary[graph->edges[e].src] * prob[e];
    double r = 0;
    for (std::size_t i = 0; i < next.size(); ++i) r = std::max(r, std::abs(next[i] - stationary[i]));
    return r;
  }

  // Mass carried by edge e under the stationary chain.
  double edge_mass(std::size_t e) const { return stationary[graph->edges[e].src] * prob[e]; }
};

inline double measure_entropy(const MarkovMeasure& mu) {
  double h = 0;
  for (std::size_t e = 0; e < mu.graph->edges.size(); ++e) {
    double p = mu.prob[e];
    if (p > 0) h -= mu.edge_mass(e) * std::log(p);
  }
  return std::max(0.0, h);
}

inline double integral(const MarkovMeasure& mu, const LocallyConstantPotential& phi) {
  detail::require_edges_carry(*mu.graph, phi);
  double s = 0;
  for (std::size_t e = 0; e < mu.graph->edges.size(); ++e) {
    double m = mu.edge_mass(e);
    if (m > 0) s += m * phi(mu.graph->edges[e].word);
  }
  return s;
}

namespace detail {

// Lazy power iteration pi <- (pi + pi P)/2 removes the residual left by the
// eigenvector solve; it converges for periodic chains too.
inline void polish_stationary(MarkovMeasure& mu) {
  for (int it = 0; it < 100000 && mu.stationarity_residual() > 1e-15; ++it) {
    std::vector<double> next(mu.stationary.size(), 0);
    for (std::size_t e = 0; e < mu.graph->edges.size(); ++e)
      next[mu.graph->edges[e].dst] += mu.stationary[mu.graph->edges[e].src] * mu.prob[e];
    double total = 0;
    for (std::size_t i = 0; i < next.size(); ++i) {
      next[i] = 0.5 * (next[i] + mu.stationary[i]);
      total += next[i];
    }
    for (double& x : next) x /= total;
    mu.stationary = std::move(next);
  }
}

}  // namespace detail

// Gibbs-Markov measure of beta phi on an irreducible block graph.
inline MarkovMeasure equilibrium_markov(std::shared_ptr<const BlockGraph> g, const LocallyConstantPotential& phi,
                                        double beta = 1.0) {
  detail::require_edges_carry(*g, phi);
  if (g->edges.empty()) fail(ErrorCode::NoCycle, "graph has no edges");
  if (!is_strongly_connected(g->size(), g->arcs()))
    fail(ErrorCode::Reducible, "equilibrium_markov needs an irreducible graph; pass a component");
  std::vector<std::int64_t> local(g->size());
  for (std::size_t i = 0; i < local.size(); ++i) local[i] = static_cast<std::int64_t>(i);
  auto r = perron_log(detail::weighted_matrix(*g, phi, beta, local, g->size()));
  MarkovMeasure mu;
  mu.graph = g;
  mu.prob.resize(g->edges.size());
  for (std::size_t e = 0; e < g->edges.size(); ++e) {
    const auto& ed = g->edges[e];
    mu.prob[e] = std::exp((beta == 0 ? 0.0 : beta * phi(ed.word)) + r.log_right[ed.dst] - r.log_rho - r.log_right[ed.src]);
  }
  for (std::uint32_t v = 0; v < g->size(); ++v) {
    double s = 0;
    for (auto e : g->out[v]) s += mu.prob[e];
    for (auto e : g->out[v]) mu.prob[e] /= s;
  }
  std::vector<double> logs(g->size());
  for (std::size_t i = 0; i < logs.size(); ++i) logs[i] = r.log_left[i] + r.log_right[i];
  double z = log_sum(logs);
  mu.stationary.resize(g->size());
  for (std::size_t i = 0; i < logs.size(); ++i) mu.stationary[i] = std::exp(logs[i] - z);
  detail::polish_stationary(mu);
  return mu;
}

// Periodic orbit measure on a cycle given as edge ids (each state once).
inline MarkovMeasure cycle_measure(std::shared_ptr<const BlockGraph> g, const std::vector<std::uint32_t>& cycle) {
  if (cycle.empty()) fail(ErrorCode::NoCycle, "empty cycle");
  MarkovMeasure mu;
  mu.graph = g;
  mu.prob.assign(g->edges.size(), 0.0);
  mu.stationary.assign(g->size(), 0.0);
  for (auto e : cycle) {
    mu.prob[e] = 1.0;
    mu.stationary[g->edges[e].src] = 1.0 / static_cast<double>(cycle.size());
  }
  // states off the cycle keep a valid (unused) row
  for (std::uint32_t v = 0; v < g->size(); ++v)
    if (mu.stationary[v] == 0 && !g->out[v].empty()) mu.prob[g->out[v].front()] = 1.0;
  return mu;
}

// i.i.d. measure on the full shift over probs.size() symbols (graph k = 1).
inline MarkovMeasure bernoulli_measure(const std::vector<double>& probs) {
  auto g = std::make_shared<BlockGraph>();
  const int n = static_cast<int>(probs.size());
  if (n < 1) fail(ErrorCode::InvalidSpec, "need at least one symbol");
  double total = 0;
  for (double p : probs) {
    if (!(p >= 0)) fail(ErrorCode::InvalidSpec, "negative probability");
    total += p;
  }
  if (std::abs(total - 1) > 1e-12) fail(ErrorCode::InvalidSpec, "probabilities must sum to 1");
  g->k = 1;
  g->alphabet_size = n;
  for (Symbol a = 1; a <= n; ++a) g->states.push_back(Word{a});
  g->out.assign(static_cast<std::size_t>(n), {});
  MarkovMeasure mu;
  for (Symbol a = 1; a <= n; ++a)
    for (Symbol b = 1; b <= n; ++b) {
      g->out[static_cast<std::size_t>(a - 1)].push_back(static_cast<std::uint32_t>(g->edges.size()));
      g->edges.push_back({static_cast<std::uint32_t>(a - 1), static_cast<std::uint32_t>(b - 1), Word{a, b}});
      mu.prob.push_back(probs[static_cast<std::size_t>(b - 1)]);
    }
  mu.graph = g;
  mu.stationary = probs;
  return mu;
}

// ---------------------------------------------------------------------------
// Weak Gibbs audit

struct GibbsAudit {
  double min_ratio = std::numeric_limits<double>::infinity();
  double max_ratio = 0;
  std::size_t words = 0;
};

// mu([w]) / exp(-P n + beta sup_[w] S_n phi) over the supplied words; lang
// supplies the extensions for the sup.
inline GibbsAudit weak_gibbs_audit(const LanguageOracle& lang, const MarkovMeasure& mu,
                                   const LocallyConstantPotential& phi, double beta, double p,
                                   const std::vector<Word>& words) {
  GibbsAudit a;
  for (const Word& w : words) {
    double s = beta == 0 ? 0.0 : beta * sup_birkhoff_sum(lang, w, phi);
    double m = mu.cylinder(w);
    double log_ratio = (m > 0 ? std::log(m) : -std::numeric_limits<double>::infinity()) + p * static_cast<double>(w.size()) - s;
    double ratio = std::exp(log_ratio);
    a.min_ratio = std::min(a.min_ratio, ratio);
    a.max_ratio = std::max(a.max_ratio, ratio);
    ++a.words;
  }
  return a;
}

// ---------------------------------------------------------------------------
// Zero temperature

struct TemperaturePoint {
  double beta = 0;
  MarkovMeasure measure;
  double entropy = 0;
  double mean = 0;      // integral of f
  double pressure = 0;  // P(beta f)
};

inline std::vector<double> geometric_schedule(double start, double ratio, double stop) {
  if (!(start > 0) || !(ratio > 1) || stop < start) fail(ErrorCode::InvalidSpec, "bad beta schedule");
  std::vector<double> out;
  for (double b = start; b <= stop * (1 + 1e-12); b *= ratio) out.push_back(b);
  return out;
}

// "a:r:b" -> geometric schedule a, a r, ... <= b.
inline std::vector<double> parse_schedule(const std::string& spec) {
  double a, r, b;
  char c1, c2;
  std::istringstream in(spec);
  if (!(in >> a >> c1 >> r >> c2 >> b) || c1 != ':' || c2 != ':')
    fail(ErrorCode::InvalidSpec, "schedule must look like start:ratio:stop");
  return geometric_schedule(a, r, b);
}

inline std::vector<TemperaturePoint> zero_temperature_path(std::shared_ptr<const BlockGraph> g,
                                                           const LocallyConstantPotential& f,
                                                           const std::vector<double>& betas) {
  for (std::size_t i = 1; i < betas.size(); ++i)
    if (!(betas[i] > betas[i - 1])) fail(ErrorCode::InvalidSpec, "schedule must increase");
  std::vector<TemperaturePoint> out;
  for (double b : betas) {
    TemperaturePoint p;
    p.beta = b;
    p.measure = equilibrium_markov(g, f, b);
    p.entropy = measure_entropy(p.measure);
    p.mean = integral(p.measure, f);
    p.pressure = pressure(*g, f, b).value;
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace symdyn
