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

#ifndef QPM_PROBLEM_HPP
#define QPM_PROBLEM_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "qpm/matrix.hpp"
#include "qpm/similarity.hpp"

namespace qpm {

enum class SparsityMode {
  kExactPerClass,  // every class gets exactly per_class features
  kAverage,        // per_class * n_classes assignments in total
};

/// Binomial coefficient as a double, saturating at +inf.
inline double binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0.0;
  k = std::min(k, n - k);
  double r = 1.0;
  for (std::size_t i = 1; i <= k; ++i) {
    r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
  }
  return std::round(r);
}

/// Constants and cardinalities of one selection-and-assignment problem.
struct ProblemInstance {
  DenseMatrix a;          // n_c x q, class-feature similarity (scaled)
  DenseMatrix r;          // q x q, feature redundancy
  std::vector<double> b;  // q, selection bias
  std::size_t n_select = 0;
  std::size_t per_class = 0;
  SparsityMode mode = SparsityMode::kExactPerClass;

  std::size_t features() const { return a.cols(); }
  std::size_t classes() const { return a.rows(); }
  std::size_t total_assignments() const { return per_class * classes(); }

  /// Throws Error when an invariant does not hold.
  void check() const {
    const std::size_t q = features();
    if (classes() == 0 || q == 0) throw Error("empty problem instance");
    if (r.rows() != q || r.cols() != q) throw Error("R must be q x q");
    if (b.size() != q) throw Error("B must have q entries");
    if (n_select == 0 || n_select > q) throw Error("n_select must be in [1, q]");
    if (per_class == 0 || per_class > n_select) {
      throw Error("per_class must be in [1, n_select]");
    }
    if (mode == SparsityMode::kExactPerClass &&
        binomial(n_select, per_class) < static_cast<double>(classes())) {
      throw Error("uniqueness unsatisfiable: C(n_select, per_class) < n_classes");
    }
    for (std::size_t i = 0; i < q; ++i) {
      if (r(i, i) != 0.0) throw Error("R must have a zero diagonal");
      for (std::size_t j = 0; j < q; ++j) {
        if (r(i, j) < 0.0) throw Error("R must be non-negative");
        if (r(i, j) != r(j, i)) throw Error("R must be symmetric");
      }
    }
  }

  static ProblemInstance from(const SimilarityMatrix& sim,
                              const FeatureSimilarityMatrix& redundancy,
                              const BiasVector& bias, std::size_t n_select,
                              std::size_t per_class,
                              SparsityMode mode = SparsityMode::kExactPerClass) {
    ProblemInstance inst{sim.a, redundancy.r, bias.b, n_select, per_class, mode};
    inst.check();
    return inst;
  }
};

enum class SolveStatus { kOptimal, kFeasible, kInfeasible };

inline const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::kOptimal:
      return "optimal";
    case SolveStatus::kFeasible:
      return "feasible";
    default:
      return "infeasible";
  }
}

/// Feature selection s and assignment W.
struct Solution {
  BinaryVector select;
  BinaryMatrix assign;  // n_c x q
  double objective = -std::numeric_limits<double>::infinity();
  double gap = 0.0;
  double bound = std::numeric_limits<double>::infinity();
  SolveStatus status = SolveStatus::kInfeasible;
  std::size_t nodes = 0;

  static Solution empty(std::size_t n_classes, std::size_t q) {
    Solution s;
    s.select.assign(q, 0);
    s.assign = BinaryMatrix(n_classes, q, 0);
    return s;
  }

  bool feasible() const { return status != SolveStatus::kInfeasible; }

  /// Sorted feature indices assigned to each class.
  std::vector<std::vector<std::size_t>> class_sets() const {
    std::vector<std::vector<std::size_t>> sets(assign.rows());
    for (std::size_t c = 0; c < assign.rows(); ++c) {
      for (std::size_t k = 0; k < assign.cols(); ++k) {
        if (assign(c, k)) sets[c].push_back(k);
      }
    }
    return sets;
  }

  std::vector<std::size_t> selected() const {
    std::vector<std::size_t> out;
    for (std::size_t k = 0; k < select.size(); ++k) {
      if (select[k]) out.push_back(k);
    }
    return out;
  }
};

/// Z = sum_c (a_c o w_c)^T s - s^T R s + B^T s.
inline double objective(const ProblemInstance& inst, const BinaryVector& select,
                        const BinaryMatrix& assign) {
  const std::size_t q = inst.features();
  if (select.size() != q || assign.rows() != inst.classes() || assign.cols() != q) {
    throw Error("solution dimensions do not match the problem instance");
  }
  double z_a = 0.0;
  for (std::size_t c = 0; c < inst.classes(); ++c) {
    for (std::size_t k = 0; k < q; ++k) {
      if (assign(c, k) && select[k]) z_a += inst.a(c, k);
    }
  }
  double z_r = 0.0;
  for (std::size_t k = 0; k < q; ++k) {
    if (!select[k]) continue;
    for (std::size_t k2 = 0; k2 < q; ++k2) {
      if (select[k2]) z_r += inst.r(k, k2);
    }
  }
  double z_b = 0.0;
  for (std::size_t k = 0; k < q; ++k) {
    if (select[k]) z_b += inst.b[k];
  }
  return z_a - z_r + z_b;
}

inline double objective(const ProblemInstance& inst, const Solution& sol) {
  return objective(inst, sol.select, sol.assign);
}

// --- Lazy constraint bookkeeping -------------------------------------------

/// Constraints of the relaxed model: the running feature set Gamma, classes
/// that must keep per_class features inside Gamma, and class pairs that must
/// differ inside Gamma.
struct LazyCuts {
  std::vector<unsigned char> gamma;
  std::set<std::size_t> sparse;
  std::set<std::pair<std::size_t, std::size_t>> duplicates;

  static LazyCuts none(std::size_t q) { return LazyCuts{std::vector<unsigned char>(q, 0), {}, {}}; }
  bool empty() const { return sparse.empty() && duplicates.empty(); }
  std::size_t gamma_size() const {
    std::size_t n = 0;
    for (auto g : gamma) n += g;
    return n;
  }
};

// --- Validation ---------------------------------------------------------

struct ValidationReport {
  std::size_t selected = 0;
  std::size_t expected_selected = 0;
  /// (class, count) for classes not holding the required count.
  std::vector<std::pair<std::size_t, std::size_t>> count_violations;
  std::size_t total_assigned = 0;
  std::size_t expected_total = 0;
  bool total_ok = true;
  /// (class, feature) assignments on unselected features.
  std::vector<std::pair<std::size_t, std::size_t>> off_selection;
  /// Pairs of classes with identical assigned sets (or violating a cut).
  std::vector<std::pair<std::size_t, std::size_t>> duplicates;

  bool selection_ok() const { return selected == expected_selected; }
  bool passed() const {
    return selection_ok() && count_violations.empty() && total_ok &&
           off_selection.empty() && duplicates.empty();
  }

  std::string describe() const {
    std::ostringstream out;
    out << "selection-count: " << (selection_ok() ? "pass" : "FAIL") << " ("
        << selected << " of " << expected_selected << ")\n";
    out << "per-class-count: " << (count_violations.empty() && total_ok ? "pass" : "FAIL");
    if (!total_ok) out << " total " << total_assigned << " != " << expected_total;
    for (auto [c, n] : count_violations) out << " class " << c << " has " << n;
    out << "\n";
    out << "off-selection: " << (off_selection.empty() ? "pass" : "FAIL");
    for (auto [c, k] : off_selection) out << " (" << c << "," << k << ")";
    out << "\n";
    out << "uniqueness: " << (duplicates.empty() ? "pass" : "FAIL");
    for (auto [c, c2] : duplicates) out << " (" << c << "," << c2 << ")";
    out << "\n";
    return out.str();
  }
};

namespace detail {

inline void check_common(const ProblemInstance& inst, const Solution& sol,
                         ValidationReport& rep) {
  const std::size_t q = inst.features();
  if (sol.select.size() != q || sol.assign.rows() != inst.classes() ||
      sol.assign.cols() != q) {
    throw Error("solution dimensions do not match the problem instance");
  }
  rep.expected_selected = inst.n_select;
  for (auto s : sol.select) rep.selected += s ? 1 : 0;
  for (std::size_t c = 0; c < inst.classes(); ++c) {
    for (std::size_t k = 0; k < q; ++k) {
      if (sol.assign(c, k) && !sol.select[k]) rep.off_selection.emplace_back(c, k);
    }
  }
}

inline std::size_t assigned_count(const Solution& sol, std::size_t c,
                                  const std::vector<unsigned char>* within = nullptr) {
  std::size_t n = 0;
  for (std::size_t k = 0; k < sol.assign.cols(); ++k) {
    if (sol.assign(c, k) && sol.select[k] && (!within || (*within)[k])) ++n;
  }
  return n;
}

inline bool same_row(const BinaryMatrix& w, std::size_t c, std::size_t c2) {
  auto r1 = w.row(c);
  auto r2 = w.row(c2);
  return std::equal(r1.begin(), r1.end(), r2.begin());
}

}  // namespace detail

/// Checks the feature count, per-class (or total) counts, off-selection
/// assignments and uniqueness of class sets.
inline ValidationReport validate(const ProblemInstance& inst, const Solution& sol) {
  ValidationReport rep;
  detail::check_common(inst, sol, rep);
  const std::size_t nc = inst.classes();
  rep.expected_total = inst.total_assignments();
  for (std::size_t c = 0; c < nc; ++c) {
    std::size_t n = detail::assigned_count(sol, c);
    rep.total_assigned += n;
    if (inst.mode == SparsityMode::kExactPerClass && n != inst.per_class) {
      rep.count_violations.emplace_back(c, n);
    }
  }
  rep.total_ok = rep.total_assigned == rep.expected_total;
  for (std::size_t c = 0; c < nc; ++c) {
    for (std::size_t c2 = c + 1; c2 < nc; ++c2) {
      if (detail::same_row(sol.assign, c, c2)) rep.duplicates.emplace_back(c, c2);
    }
  }
  return rep;
}

/// Feasibility for the relaxed model used inside the lazy loop: total
/// assignment count, per_class features inside Gamma for sparse classes, and
/// overlap below per_class inside Gamma for recorded duplicate pairs.
inline ValidationReport validate_relaxed(const ProblemInstance& inst,
                                         const LazyCuts& cuts, const Solution& sol) {
  ValidationReport rep;
  detail::check_common(inst, sol, rep);
  rep.expected_total = inst.total_assignments();
  for (std::size_t c = 0; c < inst.classes(); ++c) {
    rep.total_assigned += detail::assigned_count(sol, c);
  }
  rep.total_ok = rep.total_assigned == rep.expected_total;
  for (auto c : cuts.sparse) {
    std::size_t n = detail::assigned_count(sol, c, &cuts.gamma);
    if (n < inst.per_class) rep.count_violations.emplace_back(c, n);
  }
  for (auto [c, c2] : cuts.duplicates) {
    std::size_t overlap = 0;
    for (std::size_t k = 0; k < inst.features(); ++k) {
      if (cuts.gamma[k] && sol.select[k] && sol.assign(c, k) && sol.assign(c2, k)) {
        ++overlap;
      }
    }
    if (overlap >= inst.per_class) rep.duplicates.emplace_back(c, c2);
  }
  return rep;
}

// --- Standard form -----------------------------------------------------------

/// Dense standard-form matrices for x = (s, vec(W)), vec(W) class-major
/// (index q + c * q + k).
///
/// Q has -R in the top-left block and the stacked diag(a_c) blocks in the
/// lower-left block; c = (B, 0). The value x^T Q x + c^T x (no 1/2 factor)
/// equals the direct objective for every binary x without off-selection
/// assignments: the top-left block yields -s^T R s once, and each
/// lower-left entry a_ck pairs w_ck with s_k exactly once.
struct StandardForm {
  DenseMatrix qmat;
  std::vector<double> cvec;
  std::string convention =
      "value(x) = x^T Q x + c^T x, evaluated without a 1/2 factor";
};

inline StandardForm standard_form(const ProblemInstance& inst) {
  const std::size_t q = inst.features(), nc = inst.classes();
  const std::size_t dim = q + nc * q;
  StandardForm sf;
  sf.qmat = DenseMatrix(dim, dim, 0.0);
  for (std::size_t i = 0; i < q; ++i) {
    for (std::size_t j = 0; j < q; ++j) sf.qmat(i, j) = -inst.r(i, j);
  }
  for (std::size_t c = 0; c < nc; ++c) {
    for (std::size_t k = 0; k < q; ++k) sf.qmat(q + c * q + k, k) = inst.a(c, k);
  }
  sf.cvec.assign(dim, 0.0);
  for (std::size_t k = 0; k < q; ++k) sf.cvec[k] = inst.b[k];
  return sf;
}

inline std::vector<double> encode_x(const Solution& sol) {
  const std::size_t q = sol.select.size();
  std::vector<double> x(q + sol.assign.size(), 0.0);
  for (std::size_t k = 0; k < q; ++k) x[k] = sol.select[k];
  for (std::size_t i = 0; i < sol.assign.size(); ++i) x[q + i] = sol.assign.data()[i];
  return x;
}

inline double evaluate(const StandardForm& sf, const std::vector<double>& x) {
  const std::size_t dim = sf.cvec.size();
  if (x.size() != dim) throw Error("x has the wrong dimension");
  double v = 0.0;
  for (std::size_t i = 0; i < dim; ++i) {
    if (x[i] == 0.0) continue;
    double row = 0.0;
    for (std::size_t j = 0; j < dim; ++j) row += sf.qmat(i, j) * x[j];
    v += x[i] * row;
  }
  for (std::size_t i = 0; i < dim; ++i) v += sf.cvec[i] * x[i];
  return v;
}

}  // namespace qpm

#endif  // QPM_PROBLEM_HPP
