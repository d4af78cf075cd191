#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

namespace symdyn {

struct Arc {
  std::uint32_t src;
  std::uint32_t dst;
};

// Tarjan's algorithm, iterative. Components come out in reverse topological
// order of the condensation (sinks first).
struct SccResult {
  std::vector<std::vector<std::uint32_t>> components;
  std::vector<std::uint32_t> component_of;
};

inline SccResult strongly_connected_components(std::size_t n, const std::vector<Arc>& arcs) {
  std::vector<std::vector<std::uint32_t>> adj(n);
  for (const Arc& a : arcs) adj[a.src].push_back(a.dst);
  SccResult out;
  out.component_of.assign(n, 0);
  std::vector<std::int64_t> index(n, -1), low(n, 0);
  std::vector<bool> on_stack(n, false);
  std::vector<std::uint32_t> stack;
  std::int64_t counter = 0;
  struct Frame {
    std::uint32_t v;
    std::size_t next;
  };
  for (std::uint32_t root = 0; root < n; ++root) {
    if (index[root] >= 0) continue;
    std::vector<Frame> call{{root, 0}};
    index[root] = low[root] = counter++;
    stack.push_back(root);
    on_stack[root] = true;
    while (!call.empty()) {
      Frame& f = call.back();
      if (f.next < adj[f.v].size()) {
        std::uint32_t w = adj[f.v][f.next++];
        if (index[w] < 0) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = true;
          call.push_back({w, 0});
        } else if (on_stack[w]) {
          low[f.v] = std::min(low[f.v], index[w]);
        }
        continue;
      }
      std::uint32_t v = f.v;
      if (low[v] == index[v]) {
        std::vector<std::uint32_t> comp;
        std::uint32_t w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = false;
          out.component_of[w] = static_cast<std::uint32_t>(out.components.size());
          comp.push_back(w);
        } while (w != v);
        std::sort(comp.begin(), comp.end());
        out.components.push_back(std::move(comp));
      }
      call.pop_back();
      if (!call.empty()) low[call.back().v] = std::min(low[call.back().v], low[v]);
    }
  }
  return out;
}

// A component carries a cycle when it has an internal arc.
inline std::vector<bool> cyclic_components(const SccResult& scc, const std::vector<Arc>& arcs) {
  std::vector<bool> cyclic(scc.components.size(), false);
  for (const Arc& a : arcs)
    if (scc.component_of[a.src] == scc.component_of[a.dst]) cyclic[scc.component_of[a.src]] = true;
  return cyclic;
}

inline bool is_strongly_connected(std::size_t n, const std::vector<Arc>& arcs) {
  if (n == 0) return false;
  auto scc = strongly_connected_components(n, arcs);
  return scc.components.size() == 1 && cyclic_components(scc, arcs)[0];
}

template <typename W>
struct WeightedArc {
  std::uint32_t src;
  std::uint32_t dst;
  W weight;
};

// Karp's maximum mean cycle. D[k][v] is the best weight of a k-arc walk
// ending at v from anywhere. Returns nullopt when the graph is acyclic.
template <typename W>
struct KarpTable {
  std::size_t n = 0;
  std::vector<std::vector<std::optional<W>>> best;  // (n+1) x n
};

template <typename W>
KarpTable<W> karp_table(std::size_t n, const std::vector<WeightedArc<W>>& arcs) {
  KarpTable<W> t;
  t.n = n;
  t.best.assign(n + 1, std::vector<std::optional<W>>(n));
  for (std::size_t v = 0; v < n; ++v) t.best[0][v] = W(0);
  for (std::size_t k = 1; k <= n; ++k)
    for (const auto& a : arcs) {
      const auto& prev = t.best[k - 1][a.src];
      if (!prev) continue;
      W cand = *prev + a.weight;
      auto& slot = t.best[k][a.dst];
      if (!slot || cand > *slot) slot = cand;
    }
  return t;
}

template <typename W>
std::optional<W> max_cycle_mean(std::size_t n, const std::vector<WeightedArc<W>>& arcs) {
  if (n == 0) return std::nullopt;
  auto t = karp_table(n, arcs);
  std::optional<W> best;
  for (std::size_t v = 0; v < n; ++v) {
    if (!t.best[n][v]) continue;
    std::optional<W> worst;
    for (std::size_t k = 0; k < n; ++k) {
      if (!t.best[k][v]) continue;
      W mean = (*t.best[n][v] - *t.best[k][v]) / W(static_cast<long long>(n - k));
      if (!worst || mean < *worst) worst = mean;
    }
    if (worst && (!best || *worst > *best)) best = worst;
  }
  return best;
}

}  // namespace symdyn
