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

#ifndef QPM_BRANCH_AND_BOUND_HPP
#define QPM_BRANCH_AND_BOUND_HPP

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include "qpm/assignment.hpp"
#include "qpm/problem.hpp"

namespace qpm {

struct Budget {
  std::size_t node_cap = 0;         // 0 = unlimited
  double wallclock_seconds = 0.0;   // 0 = unlimited; not reproducible when hit
  double target_gap = 1e-4;         // relative
};

namespace detail {

// Depth-first search over selection bits. Nodes fix a prefix of the feature
// order; the bound relaxes uniqueness and treats the assignment part and the
// selection part (bias minus redundancy) independently.
class SelectionSearch {
 public:
  using Leaf = std::function<std::optional<Solution>(const BinaryVector&)>;

  SelectionSearch(const ProblemInstance& inst, const Budget& budget, bool total_only, Leaf leaf)
      : inst_(inst), budget_(budget), total_only_(total_only), leaf_(std::move(leaf)) {
    const std::size_t q = inst.features(), nc = inst.classes();
    order_.resize(q);
    std::vector<double> score(q, 0.0);
    for (std::size_t k = 0; k < q; ++k) {
      order_[k] = k;
      score[k] = inst.b[k];
      for (std::size_t c = 0; c < nc; ++c) score[k] += std::max(inst.a(c, k), 0.0);
    }
    std::stable_sort(order_.begin(), order_.end(), [&](std::size_t x, std::size_t y) {
      return score[x] > score[y];
    });
    build_suffix_tops();
    r_in_.assign(q, 0.0);
    chosen_.assign(q, 0);
  }

  Solution run(const Solution* start) {
    const std::size_t q = inst_.features(), nc = inst_.classes();
    started_ = std::chrono::steady_clock::now();
    best_ = Solution::empty(nc, q);
    if (start) {
      best_ = *start;
      best_.objective = objective(inst_, *start);
      have_ = true;
    }
    root_bound_ = bound(0);
    descend(0, root_bound_);

    double ub = std::max(open_bound_, pruned_bound_);
    Solution out = best_;
    out.nodes = nodes_;
    if (!have_) {
      out.status = SolveStatus::kInfeasible;
      out.bound = std::max(ub, exhausted_ ? root_bound_ : ub);
      out.gap = std::numeric_limits<double>::infinity();
      return out;
    }
    ub = std::max(ub, out.objective);
    out.bound = ub;
    out.gap = (ub - out.objective) / std::max(std::abs(out.objective), 1e-9);
    if (out.gap <= 1e-12) out.gap = 0.0;
    out.status = out.gap == 0.0 ? SolveStatus::kOptimal : SolveStatus::kFeasible;
    return out;
  }

 private:
  void build_suffix_tops() {
    const std::size_t q = inst_.features(), nc = inst_.classes(), m = inst_.per_class;
    const std::size_t t = inst_.total_assignments();
    if (total_only_) {
      suffix_total_.assign(q + 1, {});
      for (std::size_t d = q; d-- > 0;) {
        auto& cur = suffix_total_[d];
        cur = suffix_total_[d + 1];
        for (std::size_t c = 0; c < nc; ++c) cur.push_back(inst_.a(c, order_[d]));
        std::sort(cur.begin(), cur.end(), std::greater<>());
        if (cur.size() > t) cur.resize(t);
      }
    } else {
      suffix_class_.assign((q + 1) * nc, {});
      for (std::size_t d = q; d-- > 0;) {
        for (std::size_t c = 0; c < nc; ++c) {
          auto& cur = suffix_class_[d * nc + c];
          cur = suffix_class_[(d + 1) * nc + c];
          cur.push_back(inst_.a(c, order_[d]));
          std::sort(cur.begin(), cur.end(), std::greater<>());
          if (cur.size() > m) cur.resize(m);
        }
      }
    }
  }

  static double top_sum(std::vector<double>& v, std::size_t n) {
    if (n < v.size()) {
      std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(n), v.end(),
                       std::greater<>());
      v.resize(n);
    }
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }

  double bound(std::size_t d) {
    const std::size_t nc = inst_.classes(), q = inst_.features();
    const std::size_t open = inst_.n_select - included_.size();
    scratch_.clear();
    for (std::size_t i = d; i < q && open > 0; ++i) {
      auto k = order_[i];
      scratch_.push_back(inst_.b[k] - 2.0 * r_in_[k]);
    }
    double value = b_in_ - penalty_in_ + top_sum(scratch_, open);

    if (total_only_) {
      scratch_.clear();
      for (auto k : included_) {
        for (std::size_t c = 0; c < nc; ++c) scratch_.push_back(inst_.a(c, k));
      }
      if (open > 0) {
        const auto& tail = suffix_total_[d];
        scratch_.insert(scratch_.end(), tail.begin(), tail.end());
      }
      value += top_sum(scratch_, inst_.total_assignments());
    } else {
      for (std::size_t c = 0; c < nc; ++c) {
        scratch_.clear();
        for (auto k : included_) scratch_.push_back(inst_.a(c, k));
        if (open > 0) {
          const auto& tail = suffix_class_[d * nc + c];
          scratch_.insert(scratch_.end(), tail.begin(), tail.end());
        }
        value += top_sum(scratch_, inst_.per_class);
      }
    }
    return value;
  }

  bool out_of_budget() {
    if (exhausted_) return true;
    if (budget_.node_cap && nodes_ >= budget_.node_cap) exhausted_ = true;
    if (!exhausted_ && budget_.wallclock_seconds > 0 && (nodes_ & 1023u) == 0) {
      std::chrono::duration<double> spent = std::chrono::steady_clock::now() - started_;
      if (spent.count() > budget_.wallclock_seconds) exhausted_ = true;
    }
    return exhausted_;
  }

  double tolerance() const {
    double inc = std::abs(best_.objective);
    return budget_.target_gap * inc + 1e-12 * (1.0 + inc);
  }

  void include(std::size_t k) {
    penalty_in_ += 2.0 * r_in_[k] + inst_.r(k, k);
    for (std::size_t j = 0; j < inst_.features(); ++j) r_in_[j] += inst_.r(k, j);
    b_in_ += inst_.b[k];
    included_.push_back(k);
    chosen_[k] = 1;
  }

  void exclude_last() {
    auto k = included_.back();
    included_.pop_back();
    chosen_[k] = 0;
    b_in_ -= inst_.b[k];
    for (std::size_t j = 0; j < inst_.features(); ++j) r_in_[j] -= inst_.r(k, j);
    penalty_in_ -= 2.0 * r_in_[k] + inst_.r(k, k);
  }

  void evaluate_leaf() {
    auto sol = leaf_(chosen_);
    if (!sol) return;
    if (!have_ || sol->objective > best_.objective) {
      best_ = std::move(*sol);
      have_ = true;
    }
  }

  void descend(std::size_t d, double parent_bound) {
    if (out_of_budget()) {
      open_bound_ = std::max(open_bound_, parent_bound);
      return;
    }
    ++nodes_;
    const double ub = d == 0 ? parent_bound : bound(d);
    if (have_ && ub <= best_.objective + tolerance()) {
      if (ub > best_.objective + 1e-12 * (1.0 + std::abs(best_.objective))) {
        pruned_bound_ = std::max(pruned_bound_, ub);
      }
      return;
    }
    const std::size_t q = inst_.features();
    const std::size_t open = inst_.n_select - included_.size();
    if (open == 0) {
      evaluate_leaf();
      return;
    }
    if (q - d == open) {
      for (std::size_t i = d; i < q; ++i) include(order_[i]);
      evaluate_leaf();
      for (std::size_t i = d; i < q; ++i) exclude_last();
      return;
    }
    include(order_[d]);
    descend(d + 1, ub);
    exclude_last();
    descend(d + 1, ub);
  }

  const ProblemInstance& inst_;
  Budget budget_;
  bool total_only_;
  Leaf leaf_;
  std::vector<std::size_t> order_;
  std::vector<std::vector<double>> suffix_class_;
  std::vector<std::vector<double>> suffix_total_;
  std::vector<double> scratch_;

  std::vector<std::size_t> included_;
  BinaryVector chosen_;
  std::vector<double> r_in_;
  double b_in_ = 0.0;
  double penalty_in_ = 0.0;

  Solution best_;
  bool have_ = false;
  std::size_t nodes_ = 0;
  bool exhausted_ = false;
  double root_bound_ = 0.0;
  double open_bound_ = -std::numeric_limits<double>::infinity();
  double pruned_bound_ = -std::numeric_limits<double>::infinity();
  std::chrono::steady_clock::time_point started_;
};

}  // namespace detail

/// Branch-and-bound over the selection with exact leaves. In exact mode each
/// leaf is assign_given_selection; in average mode leaves use the relaxed
/// assignment with all class sets required distinct. `start`, when feasible,
/// seeds the incumbent.
inline Solution branch_and_bound_solve(const ProblemInstance& inst, const Budget& budget = {},
                                       const Solution* start = nullptr) {
  inst.check();
  const bool average = inst.mode == SparsityMode::kAverage;
  auto leaf = [&](const BinaryVector& select) -> std::optional<Solution> {
    if (average) return relaxed_assignment(inst, select, LazyCuts::none(inst.features()), true);
    try {
      return assign_given_selection(inst, select);
    } catch (const InfeasibleSelection&) {
      return std::nullopt;
    }
  };
  const Solution* seed = start && start->feasible() && validate(inst, *start).passed() ? start
                                                                                        : nullptr;
  return detail::SelectionSearch(inst, budget, average, leaf).run(seed);
}

/// Branch-and-bound on the relaxed model of the lazy loop: per_class * n_classes
/// assignments in total plus the recorded cuts.
inline Solution solve_relaxed(const ProblemInstance& inst, const LazyCuts& cuts,
                              const Budget& budget, const Solution* start = nullptr) {
  inst.check();
  auto leaf = [&](const BinaryVector& select) {
    return relaxed_assignment(inst, select, cuts, false);
  };
  const Solution* seed =
      start && start->feasible() && validate_relaxed(inst, cuts, *start).passed() ? start
                                                                                  : nullptr;
  return detail::SelectionSearch(inst, budget, true, leaf).run(seed);
}

}  // namespace qpm

#endif  // QPM_BRANCH_AND_BOUND_HPP
