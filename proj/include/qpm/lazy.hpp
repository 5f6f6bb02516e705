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

#ifndef QPM_LAZY_HPP
#define QPM_LAZY_HPP

#include <algorithm>
#include <cstddef>
#include <optional>
#include <vector>

#include "qpm/assignment.hpp"
#include "qpm/branch_and_bound.hpp"
#include "qpm/problem.hpp"
#include "qpm/warm_start.hpp"

namespace qpm {

struct LazyState {
  LazyCuts cuts;
  std::size_t iteration = 0;
  Budget iteration_budget;
};

struct LazyOptions {
  Budget iteration_budget{200000, 0.0, 1e-4};
  std::size_t max_iterations = 50;
  // Exact per-class search seeded with the lazy result; 0 nodes disables it.
  Budget polish_budget{200000, 0.0, 1e-4};
};

struct LazyIteration {
  double objective = 0.0;
  std::size_t sparse_added = 0;
  std::size_t duplicates_added = 0;
  std::size_t nodes = 0;
  bool warm_fallback = false;
  // Cut state after this iteration.
  std::size_t gamma_size = 0;
  std::size_t sparse_total = 0;
  std::size_t duplicates_total = 0;
};

struct LazyResult {
  Solution solution;
  LazyState state;
  bool conformant = false;
  std::vector<LazyIteration> log;
};

/// Greedy selection by marginal value: bias minus redundancy with the
/// current picks plus positive class similarity.
inline BinaryVector greedy_selection(const ProblemInstance& inst) {
  const std::size_t q = inst.features(), nc = inst.classes();
  std::vector<double> gain(q, 0.0);
  for (std::size_t k = 0; k < q; ++k) {
    gain[k] = inst.b[k];
    for (std::size_t c = 0; c < nc; ++c) gain[k] += std::max(inst.a(c, k), 0.0);
  }
  BinaryVector select(q, 0);
  for (std::size_t n = 0; n < inst.n_select; ++n) {
    std::optional<std::size_t> best;
    for (std::size_t k = 0; k < q; ++k) {
      if (!select[k] && (!best || gain[k] > gain[*best])) best = k;
    }
    select[*best] = 1;
    for (std::size_t k = 0; k < q; ++k) gain[k] -= 2.0 * inst.r(*best, k);
  }
  return select;
}

/// Lazy constraint generation on the exact per-class model. Each iteration
/// solves the relaxed model (total assignment count only, plus recorded
/// cuts) from a warm start on the previous selection. Classes with too few
/// features join the sparse set and their best selected features join Gamma;
/// once counts hold, identical class pairs become duplicate cuts. A
/// conformant result is then polished by exact search from its selection.
inline LazyResult lazy_constraint_solve(const ProblemInstance& inst,
                                        const LazyOptions& options = {}) {
  inst.check();
  if (inst.mode != SparsityMode::kExactPerClass) {
    throw Error("the lazy loop solves the exact per-class model");
  }
  const std::size_t q = inst.features(), nc = inst.classes(), m = inst.per_class;
  LazyResult out;
  LazyState& state = out.state;
  state.cuts = LazyCuts::none(q);
  state.iteration_budget = options.iteration_budget;

  BinaryVector select = greedy_selection(inst);
  std::optional<Solution> prior;
  Solution current;
  bool have = false;

  while (state.iteration < options.max_iterations) {
    ++state.iteration;
    LazyIteration entry;
    std::optional<Solution> start;
    try {
      auto ws = warm_start(inst, select, state.cuts, prior ? &*prior : nullptr);
      entry.warm_fallback = ws.fallback;
      if (validate_relaxed(inst, state.cuts, ws.solution).passed()) start = ws.solution;
    } catch (const InfeasibleSelection&) {
    }
    Solution sol = solve_relaxed(inst, state.cuts, options.iteration_budget,
                                 start ? &*start : nullptr);
    entry.nodes = sol.nodes;
    if (!sol.feasible()) {
      entry.gamma_size = state.cuts.gamma_size();
      entry.sparse_total = state.cuts.sparse.size();
      entry.duplicates_total = state.cuts.duplicates.size();
      out.log.push_back(entry);
      break;
    }
    current = sol;
    have = true;
    entry.objective = sol.objective;

    auto sel = selected_indices(sol.select);
    std::vector<std::size_t> short_classes;
    for (std::size_t c = 0; c < nc; ++c) {
      if (detail::assigned_count(sol, c) < m) short_classes.push_back(c);
    }
    bool violated = !short_classes.empty();
    for (auto c : short_classes) {
      if (state.cuts.sparse.insert(c).second) ++entry.sparse_added;
    }
    if (short_classes.empty()) {
      for (std::size_t c = 0; c < nc; ++c) {
        for (std::size_t c2 = c + 1; c2 < nc; ++c2) {
          if (!detail::same_row(sol.assign, c, c2)) continue;
          violated = true;
          if (state.cuts.duplicates.insert({c, c2}).second) ++entry.duplicates_added;
        }
      }
    }
    // Gamma takes the whole violating selection, so the exact replay of this
    // selection stays feasible under every cut recorded so far.
    if (violated) {
      for (auto k : sel) state.cuts.gamma[k] = 1;
    }
    entry.gamma_size = state.cuts.gamma_size();
    entry.sparse_total = state.cuts.sparse.size();
    entry.duplicates_total = state.cuts.duplicates.size();
    out.log.push_back(entry);
    if (short_classes.empty() && validate(inst, sol).passed()) {
      out.conformant = true;
      break;
    }
    select = sol.select;
    prior = sol;
  }

  if (!have) {
    out.solution = Solution::empty(nc, q);
    return out;
  }
  if (out.conformant) {
    Solution seeded = assign_given_selection(inst, current.select);
    if (seeded.objective < current.objective) seeded = current;
    if (options.polish_budget.node_cap > 0 || options.polish_budget.wallclock_seconds > 0) {
      Solution polished = branch_and_bound_solve(inst, options.polish_budget, &seeded);
      if (polished.feasible() && polished.objective > seeded.objective) {
        seeded = polished;
      } else {
        seeded.gap = polished.gap;
        seeded.bound = polished.bound;
        seeded.status = polished.status;
        seeded.nodes = polished.nodes;
      }
    }
    out.solution = seeded;
  } else {
    out.solution = current;
  }
  return out;
}

}  // namespace qpm

#endif  // QPM_LAZY_HPP
