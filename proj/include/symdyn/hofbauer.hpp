#pragma once

#include <algorithm>
#include <deque>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "entropy.hpp"
#include "graph.hpp"
#include "language.hpp"
#include "quadratic.hpp"
#include "word.hpp"

namespace symdyn {

// x -> slope * x + intercept on [lo, hi].
struct Branch {
  Quadratic lo, hi, slope, intercept;

  Quadratic apply(const Quadratic& x) const { return slope * x + intercept; }
  bool increasing() const { return slope.sign() > 0; }
};

class PiecewiseMonotoneMap {
 public:
  PiecewiseMonotoneMap(std::vector<Branch> branches, std::string name)
      : branches_(std::move(branches)), name_(std::move(name)) {
    if (branches_.empty()) fail(ErrorCode::InvalidSpec, "map needs at least one branch");
    if (branches_.front().lo != Quadratic(0) || branches_.back().hi != Quadratic(1))
      fail(ErrorCode::InvalidSpec, "branch domains must cover [0,1]");
    for (std::size_t i = 0; i < branches_.size(); ++i) {
      const Branch& b = branches_[i];
      if (!(b.lo < b.hi)) fail(ErrorCode::InvalidSpec, "branch " + std::to_string(i + 1) + " has empty interior");
      if (i + 1 < branches_.size() && b.hi != branches_[i + 1].lo)
        fail(ErrorCode::InvalidSpec, "branch domains must be contiguous");
      if (b.slope.sign() == 0) fail(ErrorCode::InvalidSpec, "branch slope must be nonzero");
      Quadratic y0 = b.apply(b.lo), y1 = b.apply(b.hi);
      Quadratic mn = std::min(y0, y1), mx = std::max(y0, y1);
      if (mn < Quadratic(0) || mx > Quadratic(1))
        fail(ErrorCode::InvalidSpec, "branch " + std::to_string(i + 1) + " image leaves [0,1]");
    }
  }

  // x -> beta x + alpha mod 1, branches cut where beta x + alpha hits an integer.
  static PiecewiseMonotoneMap alpha_beta(const Quadratic& alpha, const Quadratic& beta) {
    if (beta <= Quadratic(1)) fail(ErrorCode::InvalidSpec, "beta must exceed 1");
    if (alpha < Quadratic(0) || alpha >= Quadratic(1)) fail(ErrorCode::InvalidSpec, "alpha must lie in [0,1)");
    std::vector<Branch> out;
    Quadratic lo(0);
    for (long long k = 0;; ++k) {
      Quadratic cut = (Quadratic(k + 1) - alpha) / beta;
      Quadratic hi = cut < Quadratic(1) ? cut : Quadratic(1);
      out.push_back({lo, hi, beta, alpha - Quadratic(k)});
      if (!(cut < Quadratic(1))) break;
      lo = hi;
    }
    return PiecewiseMonotoneMap(std::move(out),
                                "alphabeta:alpha=" + alpha.str() + ":beta=" + beta.str());
  }

  // Orientation-reversing beta map x -> floor(beta x) + 1 - beta x.
  static PiecewiseMonotoneMap neg_beta(const Quadratic& beta) {
    if (beta <= Quadratic(1)) fail(ErrorCode::InvalidSpec, "beta must exceed 1");
    std::vector<Branch> out;
    for (long long k = 0;; ++k) {
      Quadratic lo = Quadratic(k) / beta;
      Quadratic cut = Quadratic(k + 1) / beta;
      Quadratic hi = cut < Quadratic(1) ? cut : Quadratic(1);
      out.push_back({lo, hi, -beta, Quadratic(k + 1)});
      if (!(cut < Quadratic(1))) break;
    }
    return PiecewiseMonotoneMap(std::move(out), "negbeta:beta=" + beta.str());
  }

  // One branch per line: "lo hi slope intercept"; '#' starts a comment.
  static PiecewiseMonotoneMap from_text(const std::string& text, std::string name = "pwm") {
    std::istringstream in(text);
    std::string line;
    std::vector<Branch> out;
    while (std::getline(in, line)) {
      auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      std::istringstream fields(line);
      std::vector<std::string> tok;
      std::string t;
      while (fields >> t) tok.push_back(t);
      if (tok.empty()) continue;
      if (tok.size() != 4) fail(ErrorCode::InvalidSpec, "branch line needs 4 fields: " + line);
      out.push_back({Quadratic::parse(tok[0]), Quadratic::parse(tok[1]), Quadratic::parse(tok[2]),
                     Quadratic::parse(tok[3])});
    }
    return PiecewiseMonotoneMap(std::move(out), std::move(name));
  }

  std::size_t branch_count() const { return branches_.size(); }
  const Branch& branch(std::size_t i) const { return branches_[i]; }
  const std::vector<Branch>& branches() const { return branches_; }
  const std::string& name() const { return name_; }

  // Index of the branch whose interior contains x; nullopt on endpoints.
  std::optional<std::size_t> locate(const Quadratic& x) const {
    for (std::size_t i = 0; i < branches_.size(); ++i) {
      if (x == branches_[i].lo || x == branches_[i].hi) return std::nullopt;
      if (branches_[i].lo < x && x < branches_[i].hi) return i;
    }
    return std::nullopt;
  }

 private:
  std::vector<Branch> branches_;
  std::string name_;
};

// Itinerary of x of length n; nullopt when some iterate hits a partition
// endpoint (including 0 and 1) or leaves [0,1].
inline std::optional<Word> code_point(const PiecewiseMonotoneMap& t, Quadratic x, std::size_t n) {
  if (n == 0) fail(ErrorCode::InvalidSpec, "itinerary length must be >= 1");
  Word out;
  for (std::size_t i = 0; i < n; ++i) {
    auto b = t.locate(x);
    if (!b) return std::nullopt;
    out.push_back(static_cast<Symbol>(*b + 1));
    x = t.branch(*b).apply(x);
  }
  return out;
}

struct DiagramVertex {
  Symbol symbol;
  Quadratic lo, hi;
  std::size_t level;   // first n with the vertex in D_n
  bool expanded;       // successors computed
};

struct DiagramEdge {
  std::uint32_t src;
  Symbol label;
  std::uint32_t dst;
};

struct MarkovDiagram {
  std::shared_ptr<const PiecewiseMonotoneMap> map;
  std::vector<DiagramVertex> vertices;
  std::vector<DiagramEdge> edges;
  std::vector<std::vector<std::uint32_t>> out_edges;  // edge indices per vertex
  std::size_t depth = 0;
  bool complete = false;

  std::size_t size() const { return vertices.size(); }

  std::vector<Arc> arcs() const {
    std::vector<Arc> a;
    for (const auto& e : edges) a.push_back({e.src, e.dst});
    return a;
  }

  std::optional<std::uint32_t> successor(std::uint32_t v, Symbol label) const {
    for (std::uint32_t e : out_edges[v])
      if (edges[e].label == label) return edges[e].dst;
    return std::nullopt;
  }

  std::optional<std::uint32_t> root(Symbol s) const {
    for (std::uint32_t v = 0; v < vertices.size(); ++v)
      if (vertices[v].level == 0 && vertices[v].symbol == s) return v;
    return std::nullopt;
  }

  // "id symbol lo hi" lines, then "src label dst" lines.
  std::string to_text() const {
    std::ostringstream os;
    os << "# vertices: id symbol lo hi level\n";
    for (std::size_t v = 0; v < vertices.size(); ++v)
      os << v << ' ' << vertices[v].symbol << ' ' << vertices[v].lo.str() << ' ' << vertices[v].hi.str() << ' '
         << vertices[v].level << '\n';
    os << "# edges: src label dst\n";
    for (const auto& e : edges) os << e.src << ' ' << e.label << ' ' << e.dst << '\n';
    return os.str();
  }
};

// The successor recursion D_{n+1} = D_n + {successors of D_n}. A successor of
// a vertex (j, J) along label i is (i, T_j(J) cap I_i) when that intersection
// has nonempty interior. Vertices at level max_depth stay unexpanded unless
// the recursion closes earlier; edges between known vertices are still added
// for them so the graph is as large as the truncation allows.
inline MarkovDiagram build_diagram(std::shared_ptr<const PiecewiseMonotoneMap> map, std::size_t max_depth) {
  MarkovDiagram d;
  d.map = map;
  const auto& t = *map;
  using Key = std::tuple<Symbol, Quadratic, Quadratic>;
  auto less = [](const Key& x, const Key& y) {
    if (std::get<0>(x) != std::get<0>(y)) return std::get<0>(x) < std::get<0>(y);
    int c = (std::get<1>(x) - std::get<1>(y)).sign();
    if (c != 0) return c < 0;
    return (std::get<2>(x) - std::get<2>(y)).sign() < 0;
  };
  std::map<Key, std::uint32_t, decltype(less)> index(less);

  auto add_vertex = [&](Symbol s, const Quadratic& lo, const Quadratic& hi, std::size_t level) {
    Key k{s, lo, hi};
    auto it = index.find(k);
    if (it != index.end()) return std::make_pair(it->second, false);
    auto id = static_cast<std::uint32_t>(d.vertices.size());
    d.vertices.push_back({s, lo, hi, level, false});
    d.out_edges.emplace_back();
    index.emplace(k, id);
    return std::make_pair(id, true);
  };

  std::vector<std::uint32_t> frontier;
  for (std::size_t j = 0; j < t.branch_count(); ++j)
    frontier.push_back(add_vertex(static_cast<Symbol>(j + 1), t.branch(j).lo, t.branch(j).hi, 0).first);

  auto successors = [&](std::uint32_t v) {
    const DiagramVertex& vx = d.vertices[v];
    const Branch& b = t.branch(vx.symbol - 1);
    Quadratic y0 = b.apply(vx.lo), y1 = b.apply(vx.hi);
    Quadratic lo = std::min(y0, y1), hi = std::max(y0, y1);
    std::vector<std::tuple<Symbol, Quadratic, Quadratic>> out;
    for (std::size_t j = 0; j < t.branch_count(); ++j) {
      Quadratic a = std::max(lo, t.branch(j).lo);
      Quadratic c = std::min(hi, t.branch(j).hi);
      if (a < c) out.emplace_back(static_cast<Symbol>(j + 1), a, c);
    }
    return out;
  };

  std::size_t step = 0;
  while (step < max_depth) {
    ++step;
    std::vector<std::uint32_t> next;
    for (std::uint32_t v : frontier) {
      for (auto& [s, lo, hi] : successors(v)) {
        auto [id, fresh] = add_vertex(s, lo, hi, step);
        if (fresh) next.push_back(id);
        d.edges.push_back({v, s, id});
        d.out_edges[v].push_back(static_cast<std::uint32_t>(d.edges.size() - 1));
      }
      d.vertices[v].expanded = true;
    }
    frontier = std::move(next);
    if (frontier.empty()) {
      d.complete = true;
      break;
    }
  }
  d.depth = step;
  if (!d.complete) {
    for (std::uint32_t v : frontier)
      for (auto& [s, lo, hi] : successors(v)) {
        auto it = index.find(Key{s, lo, hi});
        if (it == index.end()) continue;
        d.edges.push_back({v, s, it->second});
        d.out_edges[v].push_back(static_cast<std::uint32_t>(d.edges.size() - 1));
      }
  }
  return d;
}

inline MarkovDiagram build_diagram(const PiecewiseMonotoneMap& map, std::size_t max_depth) {
  return build_diagram(std::make_shared<const PiecewiseMonotoneMap>(map), max_depth);
}

// Words read along diagram paths that start in D_0. Exact up to depth + 1,
// or at every length once the diagram is complete.
class DiagramLanguage : public LanguageOracle {
 public:
  explicit DiagramLanguage(std::shared_ptr<const MarkovDiagram> d)
      : LanguageOracle(Alphabet(static_cast<int>(d->map->branch_count())),
                       d->complete ? kUnboundedHorizon : d->depth + 1),
        d_(std::move(d)) {}

  StateId initial_state() const override { return 0; }
  std::optional<StateId> next_state(StateId s, Symbol a) const override {
    if (!alphabet().contains(a)) return std::nullopt;
    std::optional<std::uint32_t> v = s == 0 ? d_->root(a) : d_->successor(s - 1, a);
    if (!v) return std::nullopt;
    return *v + 1;
  }
  std::string describe() const override {
    return "hofbauer(" + d_->map->name() + ", depth " + std::to_string(d_->depth) + ")";
  }
  const MarkovDiagram& diagram() const { return *d_; }
  std::shared_ptr<const MarkovDiagram> diagram_ptr() const { return d_; }

 private:
  std::shared_ptr<const MarkovDiagram> d_;
};

struct ComponentResult {
  std::vector<std::uint32_t> vertices;
  double log_perron = 0;
  bool closed = false;  // no edge leaves it and all its vertices were expanded
};

// Among strongly connected components with an internal edge, prefer those
// closed under successors and take the largest Perron value (smallest vertex
// id on ties). Falls back to non-closed components with closed = false.
inline ComponentResult closed_component(std::size_t n, const std::vector<Arc>& arcs,
                                        const std::vector<bool>& expanded) {
  auto scc = strongly_connected_components(n, arcs);
  auto cyclic = cyclic_components(scc, arcs);
  std::vector<bool> closed(scc.components.size(), true);
  for (const Arc& a : arcs)
    if (scc.component_of[a.src] != scc.component_of[a.dst]) closed[scc.component_of[a.src]] = false;
  for (std::uint32_t v = 0; v < n; ++v)
    if (!expanded.empty() && !expanded[v]) closed[scc.component_of[v]] = false;

  std::optional<std::size_t> best;
  double best_value = 0;
  bool best_closed = false;
  for (std::size_t c = 0; c < scc.components.size(); ++c) {
    if (!cyclic[c]) continue;
    std::vector<Arc> inner;
    const auto& comp = scc.components[c];
    std::vector<std::int64_t> local(n, -1);
    for (std::size_t i = 0; i < comp.size(); ++i) local[comp[i]] = static_cast<std::int64_t>(i);
    for (const Arc& a : arcs)
      if (local[a.src] >= 0 && local[a.dst] >= 0)
        inner.push_back({static_cast<std::uint32_t>(local[a.src]), static_cast<std::uint32_t>(local[a.dst])});
    double value = perron_entropy(comp.size(), inner).value;
    auto better = [&] {
      if (!best) return true;
      if (closed[c] != best_closed) return static_cast<bool>(closed[c]);
      if (std::fabs(value - best_value) > 1e-12) return value > best_value;
      return comp.front() < scc.components[*best].front();
    };
    if (better()) {
      best = c;
      best_value = value;
      best_closed = closed[c];
    }
  }
  if (!best) fail(ErrorCode::NoComponent, "no strongly connected component carries a cycle");
  return {scc.components[*best], best_value, best_closed};
}

inline ComponentResult closed_component(const MarkovDiagram& d) {
  std::vector<bool> expanded(d.size());
  for (std::size_t v = 0; v < d.size(); ++v) expanded[v] = d.vertices[v].expanded || d.complete;
  return closed_component(d.size(), d.arcs(), expanded);
}

}  // namespace symdyn
