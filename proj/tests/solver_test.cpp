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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <vector>

#include "test_util.hpp"

namespace qpm {
namespace {

using testing::naive_objective;
using testing::random_instance;
using testing::random_selection;
using testing::toy_instance;
using testing::uniform;

std::vector<std::vector<std::size_t>> subsets_of(const std::vector<std::size_t>& items,
                                                 std::size_t m) {
  std::vector<std::vector<std::size_t>> out;
  std::vector<std::size_t> cur;
  auto rec = [&](auto&& self, std::size_t from) -> void {
    if (cur.size() == m) {
      out.push_back(cur);
      return;
    }
    for (std::size_t i = from; i < items.size(); ++i) {
      cur.push_back(items[i]);
      self(self, i + 1);
      cur.pop_back();
    }
  };
  rec(rec, 0);
  return out;
}

// Best distinct assignment on a fixed selection by trying every tuple of
// subsets, classes in reverse order.
double oracle_assignment_value(const ProblemInstance& inst, const std::vector<std::size_t>& sel) {
  auto sets = subsets_of(sel, inst.per_class);
  const std::size_t nc = inst.classes();
  double best = -std::numeric_limits<double>::infinity();
  std::vector<std::size_t> used;
  auto rec = [&](auto&& self, std::size_t depth, double acc) -> void {
    if (depth == nc) {
      best = std::max(best, acc);
      return;
    }
    std::size_t c = nc - 1 - depth;
    for (std::size_t s = sets.size(); s-- > 0;) {
      if (std::find(used.begin(), used.end(), s) != used.end()) continue;
      double v = 0.0;
      for (auto k : sets[s]) v += inst.a(c, k);
      used.push_back(s);
      self(self, depth + 1, acc + v);
      used.pop_back();
    }
  };
  rec(rec, 0, 0.0);
  return best;
}

double selection_value(const ProblemInstance& inst, const std::vector<std::size_t>& sel) {
  double v = 0.0;
  for (auto i : sel) {
    v += inst.b[i];
    for (auto j : sel) v -= inst.r(i, j);
  }
  return v;
}

// Global optimum: every selection in reverse lexicographic order.
double oracle_optimum(const ProblemInstance& inst) {
  std::vector<std::size_t> all(inst.features());
  std::iota(all.begin(), all.end(), 0);
  auto selections = subsets_of(all, inst.n_select);
  double best = -std::numeric_limits<double>::infinity();
  for (auto it = selections.rbegin(); it != selections.rend(); ++it) {
    double a = oracle_assignment_value(inst, *it);
    if (std::isfinite(a)) best = std::max(best, a + selection_value(inst, *it));
  }
  return best;
}

Solution make_solution(std::size_t nc, std::size_t q, const std::vector<std::size_t>& sel,
                       const std::vector<std::vector<std::size_t>>& sets) {
  auto sol = Solution::empty(nc, q);
  for (auto k : sel) sol.select[k] = 1;
  for (std::size_t c = 0; c < sets.size(); ++c) {
    for (auto k : sets[c]) sol.assign(c, k) = 1;
  }
  return sol;
}

// --- objective --------------------------------------------------------------

TEST(Objective, ToyDepictedSolution) {
  auto inst = toy_instance();
  auto sol = make_solution(2, 4, {0, 1, 2}, {{0, 1}, {0, 2}});
  EXPECT_NEAR(objective(inst, sol), 6.5, 1e-12);
}

TEST(Objective, EmptyAssignmentIsRedundancyOnly) {
  std::mt19937_64 g(2);
  auto inst = random_instance(g, 6, 2, 3, 2);
  auto sol = Solution::empty(2, 6);
  sol.select = random_selection(g, 6, 3);
  auto sel = selected_indices(sol.select);
  double expected = 0.0;
  for (auto i : sel) {
    expected += inst.b[i];
    for (auto j : sel) expected -= inst.r(i, j);
  }
  EXPECT_NEAR(objective(inst, sol), expected, 1e-12);
}

TEST(Objective, MatchesNaiveLoops) {
  std::mt19937_64 g(5);
  for (int t = 0; t < 100; ++t) {
    auto inst = random_instance(g, 7, 3, 4, 2);
    Solution sol = Solution::empty(3, 7);
    for (auto& v : sol.select) v = g() & 1u;
    for (auto& v : sol.assign.data()) v = g() & 1u;
    EXPECT_NEAR(objective(inst, sol), naive_objective(inst, sol), 1e-12);
  }
}

TEST(Objective, StandardFormAgrees) {
  auto toy = toy_instance();
  auto sf = standard_form(toy);
  EXPECT_EQ(evaluate(sf, std::vector<double>(4 + 8, 0.0)), 0.0);
  auto depicted = make_solution(2, 4, {0, 1, 2}, {{0, 1}, {0, 2}});
  EXPECT_NEAR(evaluate(sf, encode_x(depicted)), 6.5, 1e-12);

  std::mt19937_64 g(9);
  auto inst = random_instance(g, 6, 3, 3, 2);
  auto form = standard_form(inst);
  for (int t = 0; t < 100; ++t) {
    Solution sol = Solution::empty(3, 6);
    for (auto& v : sol.select) v = g() & 1u;
    for (auto& v : sol.assign.data()) v = g() & 1u;
    EXPECT_NEAR(evaluate(form, encode_x(sol)), naive_objective(inst, sol), 1e-12);
  }
}

TEST(Instance, CheckRejectsBadInput) {
  auto inst = toy_instance();
  auto bad = inst;
  bad.r(0, 1) = 1.0;
  EXPECT_THROW(bad.check(), Error);
  bad = inst;
  bad.r(0, 0) = 1.0;
  EXPECT_THROW(bad.check(), Error);
  bad = inst;
  bad.per_class = 4;
  EXPECT_THROW(bad.check(), Error);
  bad = inst;
  bad.n_select = 2;
  bad.per_class = 2;
  EXPECT_THROW(bad.check(), Error);  // one distinct set for two classes
  bad = inst;
  bad.b.pop_back();
  EXPECT_THROW(bad.check(), Error);
}

// --- validation -------------------------------------------------------------

TEST(Validate, ReportsEachViolation) {
  auto inst = toy_instance();
  auto good = make_solution(2, 4, {0, 1, 3}, {{1, 3}, {0, 3}});
  EXPECT_TRUE(validate(inst, good).passed());

  auto dup = make_solution(2, 4, {0, 1, 3}, {{1, 3}, {1, 3}});
  auto rep = validate(inst, dup);
  EXPECT_FALSE(rep.passed());
  EXPECT_EQ(rep.duplicates.size(), 1u);

  auto off = make_solution(2, 4, {0, 1, 3}, {{1, 2}, {0, 3}});
  rep = validate(inst, off);
  EXPECT_FALSE(rep.passed());
  EXPECT_EQ(rep.off_selection.size(), 1u);

  auto count = make_solution(2, 4, {0, 1, 3}, {{1}, {0, 3}});
  rep = validate(inst, count);
  EXPECT_FALSE(rep.passed());
  EXPECT_EQ(rep.count_violations.size(), 1u);
  EXPECT_FALSE(rep.describe().empty());

  auto too_many = make_solution(2, 4, {0, 1, 2, 3}, {{1, 3}, {0, 3}});
  EXPECT_FALSE(validate(inst, too_many).passed());
}

// --- assignment building blocks ---------------------------------------------

TEST(Assignment, HungarianMatchesPermutationSearch) {
  std::mt19937_64 g(13);
  for (int t = 0; t < 200; ++t) {
    std::size_t rows = 1 + g() % 4, cols = rows + g() % 3;
    DenseMatrix w(rows, cols, 0.0);
    for (double& v : w.data()) v = uniform(g, -5, 5);
    auto pick = max_weight_assignment(w);
    ASSERT_EQ(pick.size(), rows);
    double got = 0.0;
    for (std::size_t r = 0; r < rows; ++r) got += w(r, pick[r]);
    auto sorted = pick;
    std::sort(sorted.begin(), sorted.end());
    EXPECT_EQ(std::adjacent_find(sorted.begin(), sorted.end()), sorted.end());

    std::vector<std::size_t> perm(cols);
    std::iota(perm.begin(), perm.end(), 0);
    double best = -1e300;
    do {
      double v = 0.0;
      for (std::size_t r = 0; r < rows; ++r) v += w(r, perm[r]);
      best = std::max(best, v);
    } while (std::next_permutation(perm.begin(), perm.end()));
    EXPECT_NEAR(got, best, 1e-9);
  }
}

TEST(Assignment, BestSubsetsAreTheTopValues) {
  std::mt19937_64 g(14);
  for (int t = 0; t < 50; ++t) {
    std::vector<double> values(8);
    for (double& v : values) v = std::round(uniform(g, 0, 4));  // ties on purpose
    std::vector<std::size_t> cand{0, 2, 3, 5, 6, 7};
    auto best = best_subsets(values, cand, 3, 7);
    auto all = subsets_of(cand, 3);
    std::vector<double> sums;
    for (auto& s : all) sums.push_back(values[s[0]] + values[s[1]] + values[s[2]]);
    std::sort(sums.rbegin(), sums.rend());
    ASSERT_EQ(best.size(), 7u);
    std::set<std::vector<std::size_t>> seen;
    for (std::size_t i = 0; i < best.size(); ++i) {
      EXPECT_DOUBLE_EQ(best[i].value, sums[i]);
      EXPECT_TRUE(seen.insert(best[i].features).second);
    }
  }
}

TEST(Assignment, HandTrace) {
  ProblemInstance inst;
  inst.a = DenseMatrix(2, 3, std::vector<double>{0.9, 0.8, 0.1, 0.85, 0.7, 0.2});
  inst.r = DenseMatrix(3, 3, 0.0);
  inst.b.assign(3, 0.0);
  inst.n_select = 3;
  inst.per_class = 2;
  auto sol = assign_given_selection(inst, {1, 1, 1});
  EXPECT_NEAR(sol.objective, 2.75, 1e-12);
  EXPECT_EQ(sol.class_sets(), (std::vector<std::vector<std::size_t>>{{0, 1}, {0, 2}}));
  EXPECT_TRUE(validate(inst, sol).passed());
}

TEST(Assignment, SingleClassTakesTopM) {
  ProblemInstance inst;
  inst.a = DenseMatrix(1, 5, std::vector<double>{0.1, 0.5, 0.3, 0.9, 0.2});
  inst.r = DenseMatrix(5, 5, 0.0);
  inst.b.assign(5, 0.0);
  inst.n_select = 4;
  inst.per_class = 2;
  auto sol = assign_given_selection(inst, {1, 1, 1, 0, 1});
  EXPECT_EQ(sol.class_sets()[0], (std::vector<std::size_t>{1, 2}));
  EXPECT_NEAR(sol.objective, 0.8, 1e-12);
}

TEST(Assignment, AllEqualTiesStayDistinct) {
  ProblemInstance inst;
  inst.a = DenseMatrix(3, 4, 1.0);
  inst.r = DenseMatrix(4, 4, 0.0);
  inst.b.assign(4, 0.0);
  inst.n_select = 4;
  inst.per_class = 2;
  auto sol = assign_given_selection(inst, {1, 1, 1, 1});
  EXPECT_NEAR(sol.objective, 6.0, 1e-12);
  EXPECT_TRUE(validate(inst, sol).passed());
  EXPECT_EQ(assign_given_selection(inst, {1, 1, 1, 1}).assign, sol.assign);
}

TEST(Assignment, OptimalOnRandomSelections) {
  std::mt19937_64 g(15);
  for (int t = 0; t < 150; ++t) {
    std::size_t nc = 2 + g() % 3;
    auto inst = random_instance(g, 7, nc, 4, 2);
    auto select = random_selection(g, 7, 4);
    auto sol = assign_given_selection(inst, select);
    EXPECT_TRUE(validate(inst, sol).passed());
    double expected = oracle_assignment_value(inst, selected_indices(select)) +
                      selection_value(inst, selected_indices(select));
    EXPECT_NEAR(sol.objective, expected, 1e-9);
  }
}

TEST(Assignment, RejectsUnsatisfiableInput) {
  ProblemInstance inst;
  inst.a = DenseMatrix(4, 4, 1.0);
  inst.r = DenseMatrix(4, 4, 0.0);
  inst.b.assign(4, 0.0);
  inst.n_select = 3;
  inst.per_class = 2;
  EXPECT_THROW(inst.check(), Error);  // three 2-subsets for four classes
  inst.a = DenseMatrix(3, 4, 1.0);
  auto sol = assign_given_selection(inst, {1, 1, 0, 1});
  EXPECT_TRUE(validate(inst, sol).passed());
  EXPECT_THROW(assign_given_selection(inst, {1, 1, 1, 1}), Error);
}

TEST(Assignment, RelaxedTotalCountIsOptimal) {
  std::mt19937_64 g(16);
  for (int t = 0; t < 100; ++t) {
    auto inst = random_instance(g, 7, 3, 4, 2);
    auto select = random_selection(g, 7, 4);
    auto sol = relaxed_assignment(inst, select, LazyCuts::none(7));
    ASSERT_TRUE(sol.has_value());
    std::vector<double> entries;
    for (std::size_t c = 0; c < 3; ++c) {
      for (auto k : selected_indices(select)) entries.push_back(inst.a(c, k));
    }
    std::sort(entries.rbegin(), entries.rend());
    double a_part = std::accumulate(entries.begin(), entries.begin() + 6, 0.0);
    EXPECT_NEAR(sol->objective, a_part + selection_value(inst, selected_indices(select)), 1e-9);
  }
}

TEST(Assignment, RelaxedHonoursCuts) {
  std::mt19937_64 g(17);
  for (int t = 0; t < 100; ++t) {
    auto inst = random_instance(g, 7, 3, 5, 2);
    auto select = random_selection(g, 7, 5);
    auto cuts = LazyCuts::none(7);
    auto sel = selected_indices(select);
    for (std::size_t i = 0; i < 3; ++i) cuts.gamma[sel[i]] = 1;
    cuts.sparse.insert(t % 3);
    cuts.duplicates.insert({0, 1});
    auto sol = relaxed_assignment(inst, select, cuts);
    if (!sol) continue;
    EXPECT_TRUE(validate_relaxed(inst, cuts, *sol).passed()) << validate_relaxed(inst, cuts, *sol).describe();
  }
}

// --- warm start -------------------------------------------------------------

TEST(WarmStart, MiniMaxiHandTrace) {
  ProblemInstance inst;
  inst.a = DenseMatrix(2, 3, std::vector<double>{0.9, 0.8, 0.1, 0.85, 0.7, 0.2});
  inst.r = DenseMatrix(3, 3, 0.0);
  inst.b.assign(3, 0.0);
  inst.n_select = 3;
  inst.per_class = 2;
  auto ws = warm_start(inst, {1, 1, 1}, LazyCuts::none(3));
  EXPECT_EQ(ws.swaps, 1u);
  EXPECT_FALSE(ws.fallback);
  EXPECT_EQ(ws.solution.class_sets(), (std::vector<std::vector<std::size_t>>{{0, 1}, {0, 2}}));
}

TEST(WarmStart, DistinctTopSetsAreKept) {
  auto inst = toy_instance();
  auto ws = warm_start(inst, {1, 1, 0, 1}, LazyCuts::none(4));
  EXPECT_EQ(ws.swaps, 0u);
  EXPECT_NEAR(ws.solution.objective, 7.3, 1e-12);
}

TEST(WarmStart, AlwaysValidOnRandomInstances) {
  std::mt19937_64 g(18);
  for (int t = 0; t < 200; ++t) {
    std::size_t nc = 2 + g() % 4;
    ProblemInstance inst = random_instance(g, 8, nc, 4, 2);
    // Make classes agree so dedup has work to do.
    for (std::size_t c = 1; c < nc; ++c) {
      for (std::size_t k = 0; k < 8; ++k) inst.a(c, k) = inst.a(0, k) + uniform(g, 0, 0.1);
    }
    auto select = random_selection(g, 8, 4);
    auto ws = warm_start(inst, select, LazyCuts::none(8));
    EXPECT_TRUE(validate(inst, ws.solution).passed()) << ws.solution.select.size();
    EXPECT_NEAR(ws.solution.objective, objective(inst, ws.solution), 1e-12);
  }
}

TEST(WarmStart, IdenticalRowsGetDistinctSets) {
  ProblemInstance inst;
  inst.a = DenseMatrix(5, 5, 0.0);
  for (std::size_t c = 0; c < 5; ++c) {
    for (std::size_t k = 0; k < 5; ++k) inst.a(c, k) = 1.0 + 0.1 * static_cast<double>(k);
  }
  inst.r = DenseMatrix(5, 5, 0.0);
  inst.b.assign(5, 0.0);
  inst.n_select = 4;
  inst.per_class = 2;
  auto ws = warm_start(inst, {1, 1, 0, 1, 1}, LazyCuts::none(5));
  auto sets = ws.solution.class_sets();
  std::sort(sets.begin(), sets.end());
  EXPECT_EQ(std::adjacent_find(sets.begin(), sets.end()), sets.end());
  EXPECT_TRUE(validate(inst, ws.solution).passed());
}

TEST(WarmStart, KeepsBetterPrior) {
  // Mini/Maxi moves class 0 (weaker runner-up), which costs more than moving
  // class 1.
  ProblemInstance inst;
  inst.a = DenseMatrix(2, 3, std::vector<double>{1.0, 0.9, 0.0, 1.0, 0.95, 0.94});
  inst.r = DenseMatrix(3, 3, 0.0);
  inst.b.assign(3, 0.0);
  inst.n_select = 3;
  inst.per_class = 2;
  auto plain = warm_start(inst, {1, 1, 1}, LazyCuts::none(3));
  EXPECT_NEAR(plain.solution.objective, 2.95, 1e-12);
  auto prior = make_solution(2, 3, {0, 1, 2}, {{0, 1}, {0, 2}});
  prior.status = SolveStatus::kFeasible;
  auto ws = warm_start(inst, {1, 1, 1}, LazyCuts::none(3), &prior);
  EXPECT_TRUE(ws.from_prior);
  EXPECT_NEAR(ws.solution.objective, 3.84, 1e-12);
  auto other = make_solution(2, 3, {0, 1, 2}, {{0, 1}, {0, 1}});
  other.status = SolveStatus::kFeasible;
  EXPECT_FALSE(warm_start(inst, {1, 1, 1}, LazyCuts::none(3), &other).from_prior);
}

// --- brute force ------------------------------------------------------------

TEST(BruteForce, ToyOptimum) {
  auto inst = toy_instance();
  auto sol = brute_force_solve(inst);
  EXPECT_NEAR(sol.objective, 7.3, 1e-12);
  EXPECT_NEAR(oracle_optimum(inst), 7.3, 1e-12);
  EXPECT_EQ(sol.selected(), (std::vector<std::size_t>{0, 1, 3}));
  EXPECT_EQ(sol.class_sets(), (std::vector<std::vector<std::size_t>>{{1, 3}, {0, 3}}));
  EXPECT_EQ(sol.status, SolveStatus::kOptimal);
  EXPECT_EQ(sol.gap, 0.0);
}

TEST(BruteForce, MatchesReverseOrderOracle) {
  std::mt19937_64 g(19);
  for (int t = 0; t < 40; ++t) {
    std::size_t q = 5 + g() % 2, nc = 2 + g() % 2;
    auto inst = random_instance(g, q, nc, 3 + g() % 2, 2);
    auto sol = brute_force_solve(inst);
    EXPECT_TRUE(validate(inst, sol).passed());
    EXPECT_NEAR(sol.objective, oracle_optimum(inst), 1e-9);
  }
}

TEST(BruteForce, GuardAndSpace) {
  auto toy = toy_instance();
  // C(4,3) selections, 3 * 2 ordered distinct pairs of 2-subsets.
  EXPECT_DOUBLE_EQ(brute_force_space(toy), 4.0 * 3.0 * 2.0);
  std::mt19937_64 g(20);
  auto big = random_instance(g, 30, 5, 10, 3);
  EXPECT_GT(brute_force_space(big), kBruteForceGuard);
  EXPECT_THROW(brute_force_solve(big), GuardExceeded);
  EXPECT_THROW(brute_force_solve(toy, 10.0), GuardExceeded);
}

TEST(BruteForce, SelectAll) {
  std::mt19937_64 g(21);
  auto inst = random_instance(g, 4, 2, 4, 2);
  auto sol = brute_force_solve(inst);
  EXPECT_EQ(sol.selected().size(), 4u);
  EXPECT_NEAR(sol.objective, oracle_optimum(inst), 1e-9);
}

// --- branch and bound -------------------------------------------------------

TEST(BranchAndBound, MatchesBruteForceAtZeroGap) {
  std::mt19937_64 g(22);
  Budget exact{0, 0.0, 0.0};
  for (int t = 0; t < 60; ++t) {
    std::size_t q = 5 + g() % 4, nc = 2 + g() % 2;
    auto inst = random_instance(g, q, nc, 3 + g() % 2, 2);
    auto bf = brute_force_solve(inst);
    auto bb = branch_and_bound_solve(inst, exact);
    EXPECT_TRUE(validate(inst, bb).passed());
    EXPECT_NEAR(bb.objective, bf.objective, 1e-9) << "trial " << t;
    EXPECT_EQ(bb.status, SolveStatus::kOptimal);
    EXPECT_GE(bb.bound, bb.objective - 1e-9);
  }
}

TEST(BranchAndBound, SeedDoesNotChangeOptimum) {
  std::mt19937_64 g(23);
  Budget exact{0, 0.0, 0.0};
  for (int t = 0; t < 20; ++t) {
    auto inst = random_instance(g, 7, 3, 4, 2);
    auto seed = assign_given_selection(inst, greedy_selection(inst));
    auto a = branch_and_bound_solve(inst, exact, &seed);
    EXPECT_NEAR(a.objective, brute_force_solve(inst).objective, 1e-9);
  }
}

TEST(BranchAndBound, NodeCapReportsGap) {
  std::mt19937_64 g(24);
  auto inst = random_instance(g, 16, 3, 6, 2);
  auto sol = branch_and_bound_solve(inst, Budget{3, 0.0, 0.0});
  if (sol.feasible()) {
    EXPECT_GE(sol.bound, sol.objective);
    EXPECT_GE(sol.gap, 0.0);
  }
  EXPECT_LE(sol.nodes, 3u + 1u);
}

TEST(BranchAndBound, HeavyRedundancyPairIsSplit) {
  std::mt19937_64 g(25);
  for (int t = 0; t < 10; ++t) {
    auto inst = random_instance(g, 7, 2, 3, 2);
    inst.a(0, 0) = inst.a(0, 1) = inst.a(1, 0) = inst.a(1, 1) = 50.0;
    inst.r(0, 1) = inst.r(1, 0) = 1e6;
    auto sol = branch_and_bound_solve(inst, Budget{0, 0.0, 0.0});
    EXPECT_FALSE(sol.select[0] && sol.select[1]);
  }
}

TEST(BranchAndBound, AverageModeIsFeasibleAndBounded) {
  std::mt19937_64 g(26);
  for (int t = 0; t < 20; ++t) {
    auto inst = random_instance(g, 6, 2, 3, 2, SparsityMode::kAverage);
    auto sol = branch_and_bound_solve(inst, Budget{0, 0.0, 0.0});
    ASSERT_TRUE(sol.feasible());
    EXPECT_TRUE(validate(inst, sol).passed()) << validate(inst, sol).describe();
    EXPECT_LE(sol.objective, brute_force_solve(inst).objective + 1e-9);
  }
}

// --- properties -------------------------------------------------------------

TEST(Properties, ScalingEquivariance) {
  std::mt19937_64 g(27);
  for (double alpha : {0.25, 3.0, 10.0}) {
    auto inst = random_instance(g, 7, 3, 4, 2);
    auto scaled = inst;
    for (double& v : scaled.a.data()) v *= alpha;
    for (double& v : scaled.r.data()) v *= alpha;
    for (double& v : scaled.b) v *= alpha;
    auto s1 = brute_force_solve(inst);
    auto s2 = brute_force_solve(scaled);
    EXPECT_NEAR(s2.objective, alpha * s1.objective, 1e-9 * alpha);
    auto b2 = branch_and_bound_solve(scaled, Budget{0, 0.0, 0.0});
    EXPECT_NEAR(b2.objective, alpha * s1.objective, 1e-9 * alpha);
  }
}

TEST(Properties, SolversAreDeterministic) {
  std::mt19937_64 g(28);
  auto inst = random_instance(g, 12, 3, 5, 2);
  auto a = branch_and_bound_solve(inst);
  auto b = branch_and_bound_solve(inst);
  EXPECT_EQ(a.select, b.select);
  EXPECT_EQ(a.assign, b.assign);
  EXPECT_EQ(a.objective, b.objective);
  EXPECT_EQ(a.nodes, b.nodes);
}

}  // namespace
}  // namespace qpm
