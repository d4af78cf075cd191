#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "errors.hpp"
#include "gap_set.hpp"
#include "graph.hpp"
#include "language.hpp"
#include "perron.hpp"

namespace symdyn {

enum class EntropyMethod { Growth, Perron, Root };

constexpr const char* to_string(EntropyMethod m) {
  switch (m) {
    case EntropyMethod::Growth: return "growth";
    case EntropyMethod::Perron: return "perron";
    case EntropyMethod::Root: return "root";
  }
  return "?";
}

// Entropies are in nats.
struct EntropyEstimate {
  double value = 0;
  EntropyMethod method = EntropyMethod::Growth;
  std::size_t n_used = 0;
  double tolerance = 0;
  double upper_hint = 0;
  double bracket_lo = 0;
  double bracket_hi = 0;
  std::vector<double> per_n;       // growth: (1/n) log c_n for n = 1..n_used
  std::optional<double> aitken;    // advisory extrapolation, growth only
  std::optional<double> root_x;    // root method: the characteristic root x0
  std::vector<std::string> flags;
};

// Aitken delta-squared on the last three terms; nullopt when degenerate.
inline std::optional<double> aitken_extrapolate(const std::vector<double>& s) {
  if (s.size() < 3) return std::nullopt;
  double a = s[s.size() - 3], b = s[s.size() - 2], c = s[s.size() - 1];
  double denom = c - 2 * b + a;
  if (!std::isfinite(denom) || std::fabs(denom) < 1e-300) return std::nullopt;
  return c - (c - b) * (c - b) / denom;
}

// (1/n) log #L_n from explicit counts c_0..c_n.
inline EntropyEstimate growth_from_counts(const std::vector<BigInt>& counts) {
  EntropyEstimate e;
  e.method = EntropyMethod::Growth;
  e.n_used = counts.size() - 1;
  for (std::size_t n = 1; n < counts.size(); ++n)
    e.per_n.push_back(counts[n] > 0 ? log_big(counts[n]) / static_cast<double>(n) : 0.0);
  e.value = e.per_n.empty() ? 0.0 : e.per_n.back();
  e.upper_hint = e.value;
  e.bracket_lo = 0;
  e.bracket_hi = e.value;
  e.aitken = aitken_extrapolate(e.per_n);
  return e;
}

inline EntropyEstimate growth_entropy(const LanguageOracle& lang, std::size_t n_max) {
  if (n_max == 0) fail(ErrorCode::InvalidSpec, "growth entropy needs n >= 1");
  return growth_from_counts(count_sequence(lang, n_max));
}

// Log spectral radius of a multigraph's adjacency matrix, maximised over its
// strongly connected components.
inline EntropyEstimate perron_entropy(std::size_t n, const std::vector<Arc>& arcs, double tol = 1e-12) {
  auto scc = strongly_connected_components(n, arcs);
  auto cyclic = cyclic_components(scc, arcs);
  EntropyEstimate best;
  best.method = EntropyMethod::Perron;
  best.tolerance = tol;
  bool any = false;
  for (std::size_t c = 0; c < scc.components.size(); ++c) {
    if (!cyclic[c]) continue;
    const auto& comp = scc.components[c];
    std::vector<std::int64_t> local(n, -1);
    for (std::size_t i = 0; i < comp.size(); ++i) local[comp[i]] = static_cast<std::int64_t>(i);
    LogMatrix m(comp.size());
    for (const Arc& a : arcs)
      if (local[a.src] >= 0 && local[a.dst] >= 0)
        m.accumulate(static_cast<std::size_t>(local[a.src]), static_cast<std::size_t>(local[a.dst]), 0.0);
    auto r = perron_log(m, tol);
    if (!any || r.log_rho > best.value) {
      best.value = std::max(0.0, r.log_rho);
      best.bracket_lo = std::max(0.0, r.log_lo);
      best.bracket_hi = std::max(0.0, r.log_hi);
      best.upper_hint = best.bracket_hi;
    }
    any = true;
  }
  if (!any) fail(ErrorCode::NoCycle, "graph is acyclic; entropy is 0");
  return best;
}

inline EntropyEstimate perron_entropy(const AutomatonGraph& g, double tol = 1e-12) {
  std::vector<Arc> arcs;
  for (const auto& e : g.edges) arcs.push_back({e.src, e.dst});
  return perron_entropy(g.states.size(), arcs, tol);
}

// Root of N-1 = sum_{n in S} y^{n+1} with y = (N-1)x, by certified bisection.
// Terms with n > K are bounded by y^{K+2}/(1-y); K grows until that tail is
// below tol/10, so every sign decision is certified. The entropy is
// log(1/x0) = log(N-1) - log(y0).
inline EntropyEstimate gap_entropy_root(const GapSet& gaps, int n_symbols, double tol = 1e-10) {
  if (n_symbols < 2) fail(ErrorCode::InvalidSpec, "gap entropy needs N >= 2");
  if (!(tol > 0)) fail(ErrorCode::InvalidSpec, "tolerance must be positive");
  const double target = static_cast<double>(n_symbols - 1);

  // Lower and upper bounds on sum_{n in S} y^{n+1}, tail below tail_cap.
  auto series = [&](double y, double tail_cap) -> std::pair<double, double> {
    std::uint64_t cutoff;
    double tail = 0;
    if (!gaps.infinite()) {
      cutoff = *gaps.max_member();
    } else {
      if (y >= 1) return {std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
      double need = std::log(tail_cap * (1 - y)) / std::log(y) - 2;
      cutoff = static_cast<std::uint64_t>(std::max(1.0, std::ceil(need)));
      tail = std::pow(y, static_cast<double>(cutoff + 2)) / (1 - y);
    }
    double s = 0;
    for (std::uint64_t n : gaps.members_up_to(cutoff)) s += std::pow(y, static_cast<double>(n + 1));
    return {s, s + tail};
  };

  double lo = 0, hi = 1;
  if (!gaps.infinite()) {
    while (series(hi, tol).first < target) hi *= 2;
  }
  int iterations = 0;
  auto width = [&] { return lo > 0 ? std::log(hi) - std::log(lo) : std::numeric_limits<double>::infinity(); };
  while (width() > tol) {
    if (++iterations > 1000000) fail(ErrorCode::NonConvergence, "bisection did not reach tolerance");
    double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    int side = 0;
    for (double cap = tol / 10; cap > 1e-30 && side == 0; cap *= 1e-3) {
      auto [slo, shi] = series(mid, cap);
      if (shi < target) side = -1;
      else if (slo > target) side = 1;
    }
    if (side == 0) {
      // Indistinguishable from the root in double precision.
      lo = hi = mid;
      break;
    }
    (side < 0 ? lo : hi) = mid;
  }
  EntropyEstimate e;
  e.method = EntropyMethod::Root;
  e.tolerance = tol;
  const double base = std::log(target);
  e.bracket_lo = base - std::log(hi);
  e.bracket_hi = base - std::log(lo);
  double y0 = 0.5 * (lo + hi);
  e.value = base - std::log(y0);
  e.upper_hint = e.bracket_hi;
  e.root_x = y0 / target;
  e.n_used = static_cast<std::size_t>(iterations);
  return e;
}

}  // namespace symdyn
