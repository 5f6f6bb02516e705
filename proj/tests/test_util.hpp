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

#ifndef QPM_TESTS_TEST_UTIL_HPP
#define QPM_TESTS_TEST_UTIL_HPP

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "qpm/qpm.hpp"

namespace qpm::testing {

// Uniform double in [lo, hi) from raw engine bits.
inline double uniform(std::mt19937_64& g, double lo, double hi) {
  return lo + (hi - lo) * static_cast<double>(g() >> 11) * 0x1.0p-53;
}

inline double gaussian(std::mt19937_64& g) {
  double u1 = uniform(g, 1e-300, 1.0), u2 = uniform(g, 0.0, 1.0);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
}

// Symmetric, non-negative, zero-diagonal R with roughly `density` nonzeros.
inline DenseMatrix random_redundancy(std::mt19937_64& g, std::size_t q, double scale,
                                     double density = 0.5) {
  DenseMatrix r(q, q, 0.0);
  for (std::size_t i = 0; i < q; ++i) {
    for (std::size_t j = i + 1; j < q; ++j) {
      if (uniform(g, 0, 1) < density) r(i, j) = r(j, i) = uniform(g, 0, scale);
    }
  }
  return r;
}

inline ProblemInstance random_instance(std::mt19937_64& g, std::size_t q, std::size_t nc,
                                       std::size_t n_select, std::size_t per_class,
                                       SparsityMode mode = SparsityMode::kExactPerClass) {
  ProblemInstance inst;
  inst.a = DenseMatrix(nc, q, 0.0);
  for (double& v : inst.a.data()) v = uniform(g, -1.0, 2.0);
  inst.r = random_redundancy(g, q, 0.6);
  inst.b.resize(q);
  for (double& v : inst.b) v = uniform(g, -0.5, 0.5);
  inst.n_select = n_select;
  inst.per_class = per_class;
  inst.mode = mode;
  inst.check();
  return inst;
}

inline BinaryVector random_selection(std::mt19937_64& g, std::size_t q, std::size_t n) {
  std::vector<std::size_t> idx(q);
  for (std::size_t i = 0; i < q; ++i) idx[i] = i;
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t j = i + g() % (q - i);
    std::swap(idx[i], idx[j]);
  }
  BinaryVector s(q, 0);
  for (std::size_t i = 0; i < n; ++i) s[idx[i]] = 1;
  return s;
}

// Triple loop over the objective definition.
inline double naive_objective(const ProblemInstance& inst, const Solution& sol) {
  double z = 0.0;
  const std::size_t q = inst.features();
  for (std::size_t c = 0; c < inst.classes(); ++c) {
    for (std::size_t k = 0; k < q; ++k) z += inst.a(c, k) * sol.assign(c, k) * sol.select[k];
  }
  for (std::size_t i = 0; i < q; ++i) {
    for (std::size_t j = 0; j < q; ++j) z -= sol.select[i] * inst.r(i, j) * sol.select[j];
    z += inst.b[i] * sol.select[i];
  }
  return z;
}

// Two classes over four features, R = 0 and B = 0.
inline ProblemInstance toy_instance() {
  ProblemInstance inst;
  inst.a = DenseMatrix(2, 4, std::vector<double>{1.4, 1.5, 0.2, 2.1, 1.9, -2.0, 1.7, 1.8});
  inst.r = DenseMatrix(4, 4, 0.0);
  inst.b.assign(4, 0.0);
  inst.n_select = 3;
  inst.per_class = 2;
  inst.check();
  return inst;
}

inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("qpm_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace qpm::testing

#endif  // QPM_TESTS_TEST_UTIL_HPP
