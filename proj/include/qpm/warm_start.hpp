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

#ifndef QPM_WARM_START_HPP
#define QPM_WARM_START_HPP

#include <cstddef>
#include <optional>
#include <set>
#include <vector>

#include "qpm/assignment.hpp"
#include "qpm/problem.hpp"

namespace qpm {

struct WarmStart {
  Solution solution;
  std::size_t swaps = 0;       // Mini/Maxi exchanges applied
  bool fallback = false;       // dedup stalled; next-best distinct sets used
  bool from_prior = false;     // the previous incumbent was kept
};

namespace detail {

// Candidate features of class c: the selection, restricted to Gamma for
// sparse classes when Gamma covers enough of it.
inline std::vector<std::size_t> class_candidates(const ProblemInstance& inst,
                                                 const LazyCuts& cuts,
                                                 const std::vector<std::size_t>& sel,
                                                 std::size_t c) {
  if (!cuts.sparse.count(c)) return sel;
  std::vector<std::size_t> in_gamma;
  for (auto k : sel) {
    if (cuts.gamma[k]) in_gamma.push_back(k);
  }
  return in_gamma.size() >= inst.per_class ? in_gamma : sel;
}

inline bool row_taken(const BinaryMatrix& w, std::size_t c) {
  for (std::size_t o = 0; o < w.rows(); ++o) {
    if (o != c && same_row(w, c, o)) return true;
  }
  return false;
}

// One exchange on class c: drop its weakest feature, add its strongest
// unassigned candidate whose resulting row is not used by another class.
inline bool mini_maxi(const ProblemInstance& inst, const std::vector<std::size_t>& cand,
                      BinaryMatrix& w, std::size_t c) {
  std::optional<std::size_t> drop;
  for (auto k : cand) {
    if (w(c, k) && (!drop || inst.a(c, k) < inst.a(c, *drop))) drop = k;
  }
  if (!drop) return false;
  w(c, *drop) = 0;
  std::optional<std::size_t> add;
  for (auto k : cand) {
    if (k == *drop || w(c, k)) continue;
    w(c, k) = 1;
    bool bounded = !row_taken(w, c);
    w(c, k) = 0;
    if (bounded && (!add || inst.a(c, k) > inst.a(c, *add))) add = k;
  }
  if (!add) {
    w(c, *drop) = 1;
    return false;
  }
  w(c, *add) = 1;
  return true;
}

inline double weakest(const ProblemInstance& inst, const BinaryMatrix& w, std::size_t c) {
  double lo = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < w.cols(); ++k) {
    if (w(c, k)) lo = std::min(lo, inst.a(c, k));
  }
  return lo;
}

}  // namespace detail

/// Feasible start for a fixed selection. Begins from every class's top
/// per_class features (inside Gamma for sparse classes), then resolves equal
/// class sets by exchanging the weakest feature of one class for its best
/// unused candidate. Per-class counts are preserved, so the result is
/// feasible for both the exact and the relaxed model. When exchanges stall,
/// the remaining collisions take each class's best unused distinct set.
/// A feasible `prior` on the same selection with a higher objective wins.
inline WarmStart warm_start(const ProblemInstance& inst, const BinaryVector& select,
                            const LazyCuts& cuts, const Solution* prior = nullptr) {
  const std::size_t nc = inst.classes();
  auto sel = selected_indices(select);
  if (sel.size() != inst.n_select) throw Error("warm start needs a full selection");
  std::vector<std::vector<std::size_t>> cand(nc);
  for (std::size_t c = 0; c < nc; ++c) cand[c] = detail::class_candidates(inst, cuts, sel, c);

  WarmStart out;
  Solution& sol = out.solution;
  sol.select = select;
  sol.assign = BinaryMatrix(nc, inst.features(), 0);
  for (std::size_t c = 0; c < nc; ++c) {
    auto ranked = rank_candidates(inst.a.row(c), cand[c]);
    for (std::size_t i = 0; i < inst.per_class; ++i) sol.assign(c, ranked[i]) = 1;
  }
  BinaryMatrix& w = sol.assign;

  for (bool progress = true; progress;) {
    progress = false;
    for (std::size_t c = 0; c < nc; ++c) {
      for (std::size_t c2 = c + 1; c2 < nc; ++c2) {
        if (!detail::same_row(w, c, c2)) continue;
        std::size_t first = detail::weakest(inst, w, c) <= detail::weakest(inst, w, c2) ? c : c2;
        std::size_t second = first == c ? c2 : c;
        if (detail::mini_maxi(inst, cand[first], w, first) ||
            detail::mini_maxi(inst, cand[second], w, second)) {
          ++out.swaps;
          progress = true;
        }
      }
    }
  }

  if (!rows_unique(w)) {
    out.fallback = true;
    std::set<std::vector<unsigned char>> used;
    std::vector<std::size_t> pending;
    for (std::size_t c = 0; c < nc; ++c) {
      auto r = w.row(c);
      if (!used.emplace(r.begin(), r.end()).second) pending.push_back(c);
    }
    for (auto c : pending) {
      bool placed = false;
      for (auto& s : best_subsets(inst.a.row(c), cand[c], inst.per_class, nc)) {
        std::vector<unsigned char> row(inst.features(), 0);
        for (auto k : s.features) row[k] = 1;
        if (used.count(row)) continue;
        std::copy(row.begin(), row.end(), w.row(c).begin());
        used.insert(row);
        placed = true;
        break;
      }
      if (!placed) throw InfeasibleSelection("no distinct class set left for class " +
                                             std::to_string(c));
    }
  }
  detail::finish(inst, sol);

  if (prior && prior->select == select && prior->feasible()) {
    auto rep = cuts.empty() ? validate(inst, *prior) : validate_relaxed(inst, cuts, *prior);
    double z = objective(inst, *prior);
    if (rep.passed() && z > sol.objective) {
      out.solution = *prior;
      out.solution.objective = z;
      out.solution.status = SolveStatus::kFeasible;
      out.from_prior = true;
    }
  }
  return out;
}

}  // namespace qpm

#endif  // QPM_WARM_START_HPP
