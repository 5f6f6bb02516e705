// Copyright 2026 The QPM Toolkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef QPM_CLIQUE_HPP
#define QPM_CLIQUE_HPP

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace qpm {

/// Undirected simple graph stored as adjacency bitsets.
class BitGraph {
 public:
  explicit BitGraph(std::size_t n)
      : n_(n), words_((n + 63) / 64), adj_(n, std::vector<std::uint64_t>(words_, 0)) {}

  std::size_t size() const { return n_; }

  void add_edge(std::size_t a, std::size_t b) {
    if (a == b) return;
    adj_[a][b / 64] |= std::uint64_t{1} << (b % 64);
    adj_[b][a / 64] |= std::uint64_t{1} << (a % 64);
  }

  bool has_edge(std::size_t a, std::size_t b) const {
    return (adj_[a][b / 64] >> (b % 64)) & 1u;
  }

  std::size_t degree(std::size_t v) const {
    std::size_t d = 0;
    for (auto w : adj_[v]) d += static_cast<std::size_t>(std::popcount(w));
    return d;
  }

  const std::vector<std::uint64_t>& neighbors(std::size_t v) const {
    return adj_[v];
  }
  std::size_t words() const { return words_; }

 private:
  std::size_t n_;
  std::size_t words_;
  std::vector<std::vector<std::uint64_t>> adj_;
};

/// Smallest-last (degeneracy) ordering. Vertices removed later sit in denser
/// cores. Ties go to the lowest index.
inline std::vector<std::size_t> degeneracy_order(const BitGraph& g) {
  const std::size_t n = g.size();
  std::vector<std::size_t> degree(n);
  for (std::size_t v = 0; v < n; ++v) degree[v] = g.degree(v);
  std::vector<bool> removed(n, false);
  std::vector<std::size_t> order;
  order.reserve(n);
  for (std::size_t step = 0; step < n; ++step) {
    std::size_t best = n;
    for (std::size_t v = 0; v < n; ++v) {
      if (!removed[v] && (best == n || degree[v] < degree[best])) best = v;
    }
    removed[best] = true;
    order.push_back(best);
    for (std::size_t u = 0; u < n; ++u) {
      if (!removed[u] && g.has_edge(best, u)) --degree[u];
    }
  }
  return order;
}

/// Greedy clique search seeded from every vertex, densest cores first. Stops
/// as soon as a clique of `target` vertices is found. Returns the largest
/// clique seen, sorted.
inline std::vector<std::size_t> greedy_clique(const BitGraph& g,
                                              std::size_t target) {
  const std::size_t n = g.size();
  std::vector<std::size_t> best;
  if (n == 0) return best;
  auto order = degeneracy_order(g);
  std::vector<std::uint64_t> cand(g.words());
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    std::size_t seed = *it;
    if (g.degree(seed) + 1 <= best.size()) continue;
    std::vector<std::size_t> clique{seed};
    cand = g.neighbors(seed);
    while (true) {
      std::size_t pick = n;
      std::size_t pick_deg = 0;
      for (std::size_t wi = 0; wi < cand.size(); ++wi) {
        std::uint64_t bits = cand[wi];
        while (bits) {
          std::size_t u = wi * 64 + static_cast<std::size_t>(std::countr_zero(bits));
          bits &= bits - 1;
          std::size_t d = 0;
          const auto& nu = g.neighbors(u);
          for (std::size_t k = 0; k < cand.size(); ++k) {
            d += static_cast<std::size_t>(std::popcount(nu[k] & cand[k]));
          }
          if (pick == n || d > pick_deg) {
            pick = u;
            pick_deg = d;
          }
        }
      }
      if (pick == n) break;
      clique.push_back(pick);
      const auto& np = g.neighbors(pick);
      for (std::size_t k = 0; k < cand.size(); ++k) cand[k] &= np[k];
    }
    if (clique.size() > best.size()) {
      best = clique;
      if (best.size() >= target) break;
    }
  }
  std::sort(best.begin(), best.end());
  return best;
}

namespace detail {

inline bool extend_clique(const BitGraph& g, std::vector<std::size_t>& clique,
                          std::size_t next, std::size_t target) {
  if (clique.size() == target) return true;
  for (std::size_t v = next; v < g.size(); ++v) {
    if (clique.size() + (g.size() - v) < target) return false;
    bool ok = true;
    for (auto u : clique) {
      if (!g.has_edge(u, v)) {
        ok = false;
        break;
      }
    }
    if (!ok) continue;
    clique.push_back(v);
    if (extend_clique(g, clique, v + 1, target)) return true;
    clique.pop_back();
  }
  return false;
}

}  // namespace detail

/// Exhaustive search for a clique of exactly `size` vertices. Only meant for
/// small graphs. Returns the lexicographically first one, or empty.
inline std::vector<std::size_t> exhaustive_clique(const BitGraph& g,
                                                  std::size_t size) {
  std::vector<std::size_t> clique;
  if (size == 0) return clique;
  if (detail::extend_clique(g, clique, 0, size)) return clique;
  return {};
}

}  // namespace qpm

#endif  // QPM_CLIQUE_HPP
