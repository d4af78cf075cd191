#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <vector>

#include "language.hpp"

namespace symdyn {

// Nondeterministic automaton over symbols 1..alphabet_size; delta[q][a-1] lists
// the successors of q on a.
struct Nfa {
  int alphabet_size = 1;
  std::vector<std::vector<std::vector<std::uint32_t>>> delta;

  std::uint32_t add_state() {
    delta.emplace_back(static_cast<std::size_t>(alphabet_size));
    return static_cast<std::uint32_t>(delta.size() - 1);
  }
  void add_edge(std::uint32_t q, Symbol a, std::uint32_t r) { delta[q][a - 1].push_back(r); }
  std::size_t size() const { return delta.size(); }
};

// Keeps only states from which arbitrarily long runs exist.
inline std::vector<bool> live_states(const Nfa& nfa) {
  const std::size_t n = nfa.size();
  std::vector<std::size_t> out_degree(n, 0);
  std::vector<std::vector<std::uint32_t>> reverse(n);
  for (std::uint32_t q = 0; q < n; ++q)
    for (const auto& targets : nfa.delta[q])
      for (std::uint32_t r : targets) {
        ++out_degree[q];
        reverse[r].push_back(q);
      }
  std::vector<bool> live(n, true);
  std::vector<std::uint32_t> stack;
  for (std::uint32_t q = 0; q < n; ++q)
    if (out_degree[q] == 0) {
      live[q] = false;
      stack.push_back(q);
    }
  while (!stack.empty()) {
    std::uint32_t r = stack.back();
    stack.pop_back();
    for (std::uint32_t q : reverse[r])
      if (live[q] && --out_degree[q] == 0) {
        live[q] = false;
        stack.push_back(q);
      }
  }
  return live;
}

// Subset construction performed on demand. Subsets are sorted state lists;
// the empty subset is never stored (it is the dead state).
class LazySubsetDfa {
 public:
  LazySubsetDfa(Nfa nfa, std::vector<std::uint32_t> initial) : nfa_(std::move(nfa)) {
    std::sort(initial.begin(), initial.end());
    initial.erase(std::unique(initial.begin(), initial.end()), initial.end());
    intern(std::move(initial));
  }

  LazySubsetDfa(const LazySubsetDfa&) = delete;
  LazySubsetDfa& operator=(const LazySubsetDfa&) = delete;

  StateId initial() const { return 0; }

  std::optional<StateId> next(StateId s, Symbol a) const {
    std::lock_guard<std::mutex> lock(mu_);
    if (trans_[s][a - 1] == kUnknown) {
      std::vector<std::uint32_t> target;
      for (std::uint32_t q : subsets_[s])
        for (std::uint32_t r : nfa_.delta[q][a - 1]) target.push_back(r);
      std::sort(target.begin(), target.end());
      target.erase(std::unique(target.begin(), target.end()), target.end());
      // intern() may grow trans_, so index again afterwards.
      std::int64_t value = target.empty() ? kDead : static_cast<std::int64_t>(intern(std::move(target)));
      trans_[s][a - 1] = value;
    }
    std::int64_t v = trans_[s][a - 1];
    if (v == kDead) return std::nullopt;
    return static_cast<StateId>(v);
  }

  std::vector<std::uint32_t> subset(StateId s) const {
    std::lock_guard<std::mutex> lock(mu_);
    return subsets_[s];
  }

  std::size_t discovered() const {
    std::lock_guard<std::mutex> lock(mu_);
    return subsets_.size();
  }

  const Nfa& nfa() const { return nfa_; }

 private:
  static constexpr std::int64_t kUnknown = -2;
  static constexpr std::int64_t kDead = -1;

  StateId intern(std::vector<std::uint32_t> set) const {
    auto it = index_.find(set);
    if (it != index_.end()) return it->second;
    StateId id = static_cast<StateId>(subsets_.size());
    index_.emplace(set, id);
    subsets_.push_back(std::move(set));
    trans_.emplace_back(static_cast<std::size_t>(nfa_.alphabet_size), kUnknown);
    return id;
  }

  Nfa nfa_;
  mutable std::mutex mu_;
  mutable std::vector<std::vector<std::uint32_t>> subsets_;
  mutable std::map<std::vector<std::uint32_t>, StateId> index_;
  mutable std::vector<std::vector<std::int64_t>> trans_;
};

}  // namespace symdyn
