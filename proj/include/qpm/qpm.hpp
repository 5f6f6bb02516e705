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

#ifndef QPM_QPM_HPP
#define QPM_QPM_HPP

#include "qpm/assignment.hpp"
#include "qpm/branch_and_bound.hpp"
#include "qpm/brute_force.hpp"
#include "qpm/clique.hpp"
#include "qpm/gmm.hpp"
#include "qpm/lazy.hpp"
#include "qpm/matrix.hpp"
#include "qpm/metrics.hpp"
#include "qpm/parallel.hpp"
#include "qpm/problem.hpp"
#include "qpm/qpmt.hpp"
#include "qpm/report.hpp"
#include "qpm/similarity.hpp"
#include "qpm/solution_io.hpp"
#include "qpm/tensor.hpp"
#include "qpm/warm_start.hpp"

#endif  // QPM_QPM_HPP
