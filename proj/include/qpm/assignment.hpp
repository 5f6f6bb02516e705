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

#ifndef QPM_ASSIGNMENT_HPP
#define QPM_ASSIGNMENT_HPP

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <queue>
#include <set>
#include <span>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "qpm/matrix.hpp"
#include "qpm/problem.hpp"

namespace qpm {

/// The chosen selection admits fewer distinct per-class sets than classes.
class InfeasibleSelection : public Error {
 public:
  using Error::Error;
};

namespace detail {

struct IndexListHash {
  template <typename T>
  std::size_t operator()(const std::vector<T>& v) const noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (auto x : v) {
      h ^= static_cast<std::uint64_t>(x) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    }
    return static_cast<std::size_t>(h);
  }
};

}  // namespace detail

struct ScoredSubset {
  std::vector<std::size_t> features;  // ascending
  double value = 0.0;
};

/// Candidates ordered by value, highest first, lowest index on ties.
inline std::vector<std::size_t> rank_candidates(std::span<const double> values,
                                                std::span<const std::size_t> candidates) {
  std::vector<std::size_t> order(candidates.begin(), candidates.end());
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    if (values[x] != values[y]) return values[x] > values[y];
    return x < y;
  });
  return order;
}

/// The `count` best `m`-subsets of `candidates` by summed value, best first.
/// Ties are ordered lexicographically over rank positions.
inline std::vector<ScoredSubset> best_subsets(std::span<const double> values,
                                              std::span<const std::size_t> candidates,
                                              std::size_t m, std::size_t count) {
  std::vector<ScoredSubset> out;
  const auto ranked = rank_candidates(values, candidates);
  const std::size_t n = ranked.size();
  if (m > n || count == 0) return out;

  using Positions = std::vector<std::uint32_t>;
  auto value_of = [&](const Positions& p) {
    double v = 0.0;
    for (auto i : p) v += values[ranked[i]];
    return v;
  };
  struct Entry {
    double value;
    Positions pos;
  };
  auto worse = [](const Entry& x, const Entry& y) {
    if (x.value != y.value) return x.value < y.value;
    return x.pos > y.pos;
  };
  std::priority_queue<Entry, std::vector<Entry>, decltype(worse)> heap(worse);
  std::unordered_set<Positions, detail::IndexListHash> seen;

  Positions first(m);
  for (std::size_t i = 0; i < m; ++i) first[i] = static_cast<std::uint32_t>(i);
  heap.push({value_of(first), first});
  seen.insert(first);
  while (!heap.empty() && out.size() < count) {
    Entry e = heap.top();
    heap.pop();
    ScoredSubset s;
    s.value = e.value;
    for (auto i : e.pos) s.features.push_back(ranked[i]);
    std::sort(s.features.begin(), s.features.end());
    out.push_back(std::move(s));
    for (std::size_t i = 0; i < m; ++i) {
      std::uint32_t next = e.pos[i] + 1;
      bool room = (i + 1 < m) ? next < e.pos[i + 1] : next < n;
      if (!room) continue;
      Positions p = e.pos;
      p[i] = next;
      if (seen.insert(p).second) heap.push({value_of(p), p});
    }
  }
  return out;
}

/// Maximum-weight assignment of every row to a distinct column (rows <=
/// cols). Returns the column per row.
inline std::vector<std::size_t> max_weight_assignment(const DenseMatrix& weight) {
  const std::size_t n = weight.rows(), m = weight.cols();
  if (n > m) throw Error("assignment needs at least as many columns as rows");
  const double inf = std::numeric_limits<double>::infinity();
  // Shortest augmenting path with potentials on cost = -weight; 1-based.
  std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
  std::vector<std::size_t> p(m + 1, 0), way(m + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(m + 1, inf);
    std::vector<char> used(m + 1, 0);
    do {
      used[j0] = 1;
      std::size_t i0 = p[j0], j1 = 0;
      double delta = inf;
      for (std::size_t j = 1; j <= m; ++j) {
        if (used[j]) continue;
        double cur = -weight(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= m; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0);
  }
  std::vector<std::size_t> col(n, 0);
  for (std::size_t j = 1; j <= m; ++j) {
    if (p[j] != 0) col[p[j] - 1] = j - 1;
  }
  return col;
}

inline std::vector<std::size_t> selected_indices(const BinaryVector& select) {
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < select.size(); ++k) {
    if (select[k]) out.push_back(k);
  }
  return out;
}

/// Top-m features of every class among `candidates` (the W^m matrix).
inline BinaryMatrix top_m_assignment(const ProblemInstance& inst,
                                     std::span<const std::size_t> candidates) {
  BinaryMatrix w(inst.classes(), inst.features(), 0);
  for (std::size_t c = 0; c < inst.classes(); ++c) {
    auto ranked = rank_candidates(inst.a.row(c), candidates);
    for (std::size_t i = 0; i < inst.per_class && i < ranked.size(); ++i) {
      w(c, ranked[i]) = 1;
    }
  }
  return w;
}

inline bool rows_unique(const BinaryMatrix& w) {
  std::set<std::vector<unsigned char>> seen;
  for (std::size_t c = 0; c < w.rows(); ++c) {
    auto r = w.row(c);
    if (!seen.emplace(r.begin(), r.end()).second) return false;
  }
  return true;
}

namespace detail {

inline void finish(const ProblemInstance& inst, Solution& sol) {
  sol.objective = objective(inst, sol);
  sol.status = SolveStatus::kFeasible;
}

// Relaxed (total-count) assignment for a fixed selection; see
// relaxed_assignment.
std::optional<Solution> relaxed_assignment_impl(const ProblemInstance& inst,
                                                const BinaryVector& select,
                                                const LazyCuts& cuts,
                                                bool require_unique_all);

}  // namespace detail

/// Best assignment of exactly per_class features to every class on a fixed
/// selection with all class sets distinct.
///
/// The top-m sets are used directly when they are already distinct. Otherwise
/// each class keeps only its n_c best sets as candidates (one of them is
/// always free in some optimal matching) and a maximum-weight matching picks
/// one per class.
inline Solution assign_given_selection(const ProblemInstance& inst,
                                       const BinaryVector& select) {
  const std::size_t q = inst.features(), nc = inst.classes();
  if (select.size() != q) throw Error("selection has the wrong length");
  auto sel = selected_indices(select);
  if (sel.size() != inst.n_select) {
    throw Error("selection holds " + std::to_string(sel.size()) + " features, expected " +
                std::to_string(inst.n_select));
  }
  if (inst.mode == SparsityMode::kAverage) {
    auto sol = detail::relaxed_assignment_impl(inst, select, LazyCuts::none(q), true);
    if (!sol) throw InfeasibleSelection("no unique average-sparsity assignment found");
    return *sol;
  }
  Solution sol;
  sol.select = select;
  sol.assign = top_m_assignment(inst, sel);
  if (rows_unique(sol.assign)) {
    detail::finish(inst, sol);
    return sol;
  }
  std::unordered_map<std::vector<std::size_t>, std::size_t, detail::IndexListHash> column_of;
  std::vector<std::vector<std::size_t>> columns;
  for (std::size_t c = 0; c < nc; ++c) {
    for (auto& s : best_subsets(inst.a.row(c), sel, inst.per_class, nc)) {
      if (column_of.emplace(s.features, columns.size()).second) {
        columns.push_back(s.features);
      }
    }
  }
  if (columns.size() < nc) {
    throw InfeasibleSelection("selection admits only " + std::to_string(columns.size()) +
                              " distinct class sets for " + std::to_string(nc) +
                              " classes");
  }
  DenseMatrix weight(nc, columns.size(), 0.0);
  for (std::size_t c = 0; c < nc; ++c) {
    for (std::size_t j = 0; j < columns.size(); ++j) {
      double v = 0.0;
      for (auto k : columns[j]) v += inst.a(c, k);
      weight(c, j) = v;
    }
  }
  auto pick = max_weight_assignment(weight);
  sol.assign = BinaryMatrix(nc, q, 0);
  for (std::size_t c = 0; c < nc; ++c) {
    for (auto k : columns[pick[c]]) sol.assign(c, k) = 1;
  }
  detail::finish(inst, sol);
  return sol;
}

/// Assignment for the relaxed model on a fixed selection: per_class *
/// n_classes assignments in total, classes in `cuts.sparse` keep per_class
/// features inside Gamma, and pairs in `cuts.duplicates` overlap on fewer than
/// per_class Gamma features. Without duplicate cuts (and without
/// `require_unique_all`) the result is optimal: sparse classes take their
/// best Gamma features, then the best remaining entries fill the total.
/// Duplicate cuts are restored by swap repair. Returns nullopt when the
/// selection cannot satisfy the cuts.
inline std::optional<Solution> relaxed_assignment(const ProblemInstance& inst,
                                                  const BinaryVector& select,
                                                  const LazyCuts& cuts,
                                                  bool require_unique_all = false) {
  return detail::relaxed_assignment_impl(inst, select, cuts, require_unique_all);
}

namespace detail {

// Swap repair state. Class rows are mirrored as bitsets over the selection
// so overlap and equality checks cost a few words each.
class RepairContext {
 public:
  RepairContext(const ProblemInstance& inst, const LazyCuts& cuts,
                const std::vector<std::size_t>& sel, bool require_unique_all, BinaryMatrix& w)
      : inst_(inst), cuts_(cuts), sel_(sel), unique_all_(require_unique_all), w_(w),
        words_((sel.size() + 63) / 64), bits_(w.rows() * words_, 0), gamma_(words_, 0),
        partners_(w.rows()) {
    for (std::size_t i = 0; i < sel.size(); ++i) {
      if (cuts.gamma[sel[i]]) gamma_[i / 64] |= std::uint64_t{1} << (i % 64);
      for (std::size_t c = 0; c < w.rows(); ++c) {
        if (w(c, sel[i])) flip(c, i);
      }
    }
    for (auto [c, c2] : cuts.duplicates) {
      partners_[c].push_back(c2);
      partners_[c2].push_back(c);
    }
  }

  bool violates(std::size_t c, std::size_t c2) const {
    if (unique_all_ && same_bits(c, c2)) return true;
    auto key = std::minmax(c, c2);
    return cuts_.duplicates.count({key.first, key.second}) &&
           gamma_overlap(c, c2) >= inst_.per_class;
  }

  bool class_ok(std::size_t c) const {
    for (auto c2 : partners_[c]) {
      if (gamma_overlap(c, c2) >= inst_.per_class) return false;
    }
    if (unique_all_) {
      for (std::size_t c2 = 0; c2 < w_.rows(); ++c2) {
        if (c2 != c && same_bits(c, c2)) return false;
      }
    }
    return true;
  }

  // Lexicographically smallest violating pair.
  std::optional<std::pair<std::size_t, std::size_t>> first_violation() const {
    std::optional<std::pair<std::size_t, std::size_t>> best;
    for (auto [c, c2] : cuts_.duplicates) {
      if (gamma_overlap(c, c2) >= inst_.per_class) {
        best = std::pair{c, c2};
        break;
      }
    }
    if (unique_all_) {
      std::map<std::vector<std::uint64_t>, std::size_t> first_with;
      for (std::size_t c2 = 0; c2 < w_.rows(); ++c2) {
        auto [it, fresh] = first_with.emplace(row_bits(c2), c2);
        if (!fresh && (!best || std::pair{it->second, c2} < *best)) best = std::pair{it->second, c2};
      }
    }
    return best;
  }

  // Swaps one assignment of class c: drops its lowest entry among `shared`
  // features and adds its best candidate that leaves c violation-free.
  bool swap_in_class(std::size_t c, std::size_t other) {
    const bool sparse = cuts_.sparse.count(c) > 0;
    std::vector<std::size_t> removable;
    for (std::size_t i = 0; i < sel_.size(); ++i) {
      auto k = sel_[i];
      if (!w_(c, k)) continue;
      bool shared = w_(other, k) && (unique_all_ || cuts_.gamma[k]);
      if (shared) removable.push_back(i);
    }
    std::stable_sort(removable.begin(), removable.end(), [&](std::size_t x, std::size_t y) {
      double ax = inst_.a(c, sel_[x]), ay = inst_.a(c, sel_[y]);
      if (ax != ay) return ax < ay;
      return x < y;
    });
    for (auto drop : removable) {
      set(c, drop, false);
      const bool need_gamma = sparse && gamma_count(c) < inst_.per_class;
      std::optional<std::size_t> best;
      for (std::size_t i = 0; i < sel_.size(); ++i) {
        auto k = sel_[i];
        if (i == drop || w_(c, k)) continue;
        if (need_gamma && !cuts_.gamma[k]) continue;
        if (best && inst_.a(c, k) <= inst_.a(c, sel_[*best])) continue;
        set(c, i, true);
        bool ok = class_ok(c);
        set(c, i, false);
        if (ok) best = i;
      }
      if (best) {
        set(c, *best, true);
        return true;
      }
      set(c, drop, true);
    }
    return false;
  }

 private:
  const std::uint64_t* row(std::size_t c) const { return bits_.data() + c * words_; }

  std::vector<std::uint64_t> row_bits(std::size_t c) const {
    return std::vector<std::uint64_t>(row(c), row(c) + words_);
  }

  bool same_bits(std::size_t c, std::size_t c2) const {
    return std::equal(row(c), row(c) + words_, row(c2));
  }

  std::size_t gamma_overlap(std::size_t c, std::size_t c2) const {
    std::size_t n = 0;
    for (std::size_t i = 0; i < words_; ++i) {
      n += static_cast<std::size_t>(std::popcount(row(c)[i] & row(c2)[i] & gamma_[i]));
    }
    return n;
  }

  std::size_t gamma_count(std::size_t c) const {
    std::size_t n = 0;
    for (std::size_t i = 0; i < words_; ++i) {
      n += static_cast<std::size_t>(std::popcount(row(c)[i] & gamma_[i]));
    }
    return n;
  }

  void flip(std::size_t c, std::size_t i) {
    bits_[c * words_ + i / 64] ^= std::uint64_t{1} << (i % 64);
  }

  void set(std::size_t c, std::size_t i, bool on) {
    if (static_cast<bool>(w_(c, sel_[i])) == on) return;
    w_(c, sel_[i]) = on;
    flip(c, i);
  }

  const ProblemInstance& inst_;
  const LazyCuts& cuts_;
  const std::vector<std::size_t>& sel_;
  bool unique_all_;
  BinaryMatrix& w_;
  std::size_t words_;
  std::vector<std::uint64_t> bits_;
  std::vector<std::uint64_t> gamma_;
  std::vector<std::vector<std::size_t>> partners_;
};

inline std::optional<Solution> relaxed_assignment_impl(const ProblemInstance& inst,
                                                       const BinaryVector& select,
                                                       const LazyCuts& cuts,
                                                       bool require_unique_all) {
  const std::size_t q = inst.features(), nc = inst.classes(), m = inst.per_class;
  auto sel = selected_indices(select);
  Solution sol;
  sol.select = select;
  sol.assign = BinaryMatrix(nc, q, 0);
  BinaryMatrix& w = sol.assign;

  std::size_t forced = 0;
  for (auto c : cuts.sparse) {
    std::vector<std::size_t> in_gamma;
    for (auto k : sel) {
      if (cuts.gamma[k]) in_gamma.push_back(k);
    }
    if (in_gamma.size() < m) return std::nullopt;
    auto ranked = rank_candidates(inst.a.row(c), in_gamma);
    for (std::size_t i = 0; i < m; ++i) w(c, ranked[i]) = 1;
    forced += m;
  }
  const std::size_t total = inst.total_assignments();
  if (forced > total || total > nc * sel.size()) return std::nullopt;

  struct Entry {
    double value;
    std::size_t k, c;
  };
  std::vector<Entry> entries;
  entries.reserve(nc * sel.size());
  for (auto k : sel) {
    for (std::size_t c = 0; c < nc; ++c) {
      if (!w(c, k)) entries.push_back({inst.a(c, k), k, c});
    }
  }
  const std::size_t fill = total - forced;
  auto better = [](const Entry& x, const Entry& y) {
    if (x.value != y.value) return x.value > y.value;
    if (x.k != y.k) return x.k < y.k;
    return x.c < y.c;
  };
  if (fill < entries.size()) {
    std::nth_element(entries.begin(), entries.begin() + static_cast<std::ptrdiff_t>(fill),
                     entries.end(), better);
  }
  for (std::size_t i = 0; i < fill; ++i) w(entries[i].c, entries[i].k) = 1;

  if (!cuts.duplicates.empty() || require_unique_all) {
    RepairContext ctx(inst, cuts, sel, require_unique_all, w);
    const std::size_t cap = 4 * nc * nc + 16;
    for (std::size_t it = 0;; ++it) {
      auto v = ctx.first_violation();
      if (!v) break;
      if (it >= cap) return std::nullopt;
      auto [c, c2] = *v;
      // Drop from the class whose cheapest shared entry is lower.
      auto cheapest = [&](std::size_t x, std::size_t y) {
        double lo = std::numeric_limits<double>::infinity();
        for (auto k : sel) {
          if (w(x, k) && w(y, k)) lo = std::min(lo, inst.a(x, k));
        }
        return lo;
      };
      std::size_t first = cheapest(c, c2) <= cheapest(c2, c) ? c : c2;
      std::size_t second = first == c ? c2 : c;
      if (!ctx.swap_in_class(first, second) && !ctx.swap_in_class(second, first)) {
        return std::nullopt;
      }
    }
  }
  finish(inst, sol);
  return sol;
}

}  // namespace detail

}  // namespace qpm

#endif  // QPM_ASSIGNMENT_HPP
