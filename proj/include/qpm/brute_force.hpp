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

#ifndef QPM_BRUTE_FORCE_HPP
#define QPM_BRUTE_FORCE_HPP

#include <cmath>
#include <cstddef>
#include <bit>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "qpm/problem.hpp"

namespace qpm {

/// The instance exceeds the enumeration guard.
class GuardExceeded : public Error {
 public:
  using Error::Error;
};

inline constexpr double kBruteForceGuard = 1e7;

/// Size of the search space: selections times unique per-class assignments.
inline double brute_force_space(const ProblemInstance& inst) {
  const double nc = static_cast<double>(inst.classes());
  double per_selection = 1.0;
  if (inst.mode == SparsityMode::kExactPerClass) {
    const double sets = binomial(inst.n_select, inst.per_class);
    for (double i = 0; i < nc; ++i) per_selection *= std::max(sets - i, 0.0);
  } else {
    per_selection = std::pow(std::ldexp(1.0, static_cast<int>(inst.n_select)), nc);
  }
  return binomial(inst.features(), inst.n_select) * per_selection;
}

namespace detail {

class Enumerator {
 public:
  explicit Enumerator(const ProblemInstance& inst) : inst_(inst) {}

  Solution run() {
    const std::size_t q = inst_.features(), ns = inst_.n_select;
    std::vector<std::size_t> pick(ns);
    for (std::size_t i = 0; i < ns; ++i) pick[i] = i;
    while (true) {
      visit(pick);
      std::size_t i = ns;
      while (i > 0 && pick[i - 1] == q - ns + i - 1) --i;
      if (i == 0) break;
      ++pick[i - 1];
      for (std::size_t j = i; j < ns; ++j) pick[j] = pick[j - 1] + 1;
    }
    Solution sol = Solution::empty(inst_.classes(), q);
    if (!found_) return sol;
    sol.select.assign(q, 0);
    for (auto k : best_pick_) sol.select[k] = 1;
    for (std::size_t c = 0; c < inst_.classes(); ++c) {
      for (std::size_t i = 0; i < ns; ++i) {
        if (best_masks_[c] >> i & 1u) sol.assign(c, best_pick_[i]) = 1;
      }
    }
    sol.objective = objective(inst_, sol);
    sol.bound = sol.objective;
    sol.gap = 0.0;
    sol.status = SolveStatus::kOptimal;
    sol.nodes = leaves_;
    return sol;
  }

 private:
  void visit(const std::vector<std::size_t>& pick) {
    const std::size_t ns = pick.size(), nc = inst_.classes();
    double base = 0.0;
    for (std::size_t i = 0; i < ns; ++i) {
      base += inst_.b[pick[i]];
      for (std::size_t j = 0; j < ns; ++j) base -= inst_.r(pick[i], pick[j]);
    }
    // Candidate masks over the picked positions with their per-class values.
    masks_.clear();
    const std::uint32_t full = 1u << ns;
    for (std::uint32_t mask = 0; mask < full; ++mask) {
      auto bits = static_cast<std::size_t>(std::popcount(mask));
      bool ok = inst_.mode == SparsityMode::kExactPerClass ? bits == inst_.per_class
                                                            : bits <= inst_.total_assignments();
      if (ok) masks_.push_back(mask);
    }
    values_.assign(nc * masks_.size(), 0.0);
    for (std::size_t c = 0; c < nc; ++c) {
      for (std::size_t j = 0; j < masks_.size(); ++j) {
        double v = 0.0;
        for (std::size_t i = 0; i < ns; ++i) {
          if (masks_[j] >> i & 1u) v += inst_.a(c, pick[i]);
        }
        values_[c * masks_.size() + j] = v;
      }
    }
    used_.assign(masks_.size(), 0);
    current_.assign(nc, 0);
    pick_ = &pick;
    base_ = base;
    descend(0, 0.0, 0);
  }

  void descend(std::size_t c, double acc, std::size_t count) {
    const std::size_t nc = inst_.classes();
    if (c == nc) {
      ++leaves_;
      if (inst_.mode == SparsityMode::kAverage && count != inst_.total_assignments()) return;
      double z = base_ + acc;
      if (!found_ || z > best_) {
        found_ = true;
        best_ = z;
        best_pick_ = *pick_;
        best_masks_ = current_;
      }
      return;
    }
    for (std::size_t j = 0; j < masks_.size(); ++j) {
      if (used_[j]) continue;
      auto bits = static_cast<std::size_t>(std::popcount(masks_[j]));
      if (count + bits > inst_.total_assignments()) continue;
      used_[j] = 1;
      current_[c] = masks_[j];
      descend(c + 1, acc + values_[c * masks_.size() + j], count + bits);
      used_[j] = 0;
    }
  }

  const ProblemInstance& inst_;
  std::vector<std::uint32_t> masks_;
  std::vector<double> values_;
  std::vector<unsigned char> used_;
  std::vector<std::uint32_t> current_;
  const std::vector<std::size_t>* pick_ = nullptr;
  double base_ = 0.0;
  bool found_ = false;
  double best_ = -std::numeric_limits<double>::infinity();
  std::vector<std::size_t> best_pick_;
  std::vector<std::uint32_t> best_masks_;
  std::size_t leaves_ = 0;
};

}  // namespace detail

/// Global optimum by exhaustive enumeration of selections and distinct
/// per-class assignments. The first optimum in lexicographic order wins.
inline Solution brute_force_solve(const ProblemInstance& inst,
                                  double guard = kBruteForceGuard) {
  inst.check();
  const double space = brute_force_space(inst);
  if (!(space <= guard) || inst.n_select > 30) {
    throw GuardExceeded("search space " + std::to_string(space) + " exceeds the guard " +
                        std::to_string(guard));
  }
  return detail::Enumerator(inst).run();
}

}  // namespace qpm

#endif  // QPM_BRUTE_FORCE_HPP
