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

#ifndef QPM_SOLUTION_IO_HPP
#define QPM_SOLUTION_IO_HPP

#include <filesystem>
#include <sstream>
#include <string>

#include "qpm/problem.hpp"
#include "qpm/qpmt.hpp"

namespace qpm::io {

inline constexpr const char* kSelectFile = "select.qpmt";
inline constexpr const char* kAssignFile = "assign.qpmt";
inline constexpr const char* kClassesFile = "classes.txt";

/// One line per class with its assigned (selected) feature indices.
inline std::string class_sets_text(const Solution& sol) {
  std::ostringstream out;
  auto sets = sol.class_sets();
  for (std::size_t c = 0; c < sets.size(); ++c) {
    out << "class " << c << ":";
    for (auto k : sets[c]) out << ' ' << k;
    out << '\n';
  }
  return out.str();
}

inline void write_solution(const std::filesystem::path& dir, const Solution& sol) {
  std::filesystem::create_directories(dir);
  write_raw(dir / kSelectFile, raw_from(sol.select));
  write_raw(dir / kAssignFile, raw_from(sol.assign));
  write_bytes(dir / kClassesFile, class_sets_text(sol));
}

inline BinaryVector to_binary_vector(const RawTensor& t) {
  if (t.rank() != 1) throw FormatError("selection must be rank 1");
  BinaryVector v(t.values.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    double x = t.values[i];
    if (x != 0.0 && x != 1.0) throw FormatError("selection entry is not binary");
    v[i] = x != 0.0;
  }
  return v;
}

inline BinaryMatrix to_binary_matrix(const RawTensor& t) {
  if (t.rank() != 2) throw FormatError("assignment must be rank 2");
  BinaryMatrix m(t.dims[0], t.dims[1], 0);
  for (std::size_t i = 0; i < t.values.size(); ++i) {
    double x = t.values[i];
    if (x != 0.0 && x != 1.0) throw FormatError("assignment entry is not binary");
    m.data()[i] = x != 0.0;
  }
  return m;
}

/// Reads select/assign back; objective and status are left for the caller.
inline Solution read_solution(const std::filesystem::path& dir) {
  Solution sol;
  sol.select = to_binary_vector(read_raw(dir / kSelectFile));
  sol.assign = to_binary_matrix(read_raw(dir / kAssignFile));
  if (sol.assign.cols() != sol.select.size()) {
    throw FormatError("assignment columns do not match selection length");
  }
  sol.status = SolveStatus::kFeasible;
  return sol;
}

}  // namespace qpm::io

#endif  // QPM_SOLUTION_IO_HPP
