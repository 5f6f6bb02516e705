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

#ifndef QPM_TOOLS_COMMANDS_HPP
#define QPM_TOOLS_COMMANDS_HPP

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace qpm::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kNonconformant = 2, kGuard = 3 };

struct RunConfig {
  std::string features;    // rank-2 pooled or rank-4 maps
  std::string maps;        // rank-4 maps when `features` is pooled
  std::string labels;
  std::string attributes;
  std::string similarity;  // precomputed n_c x q class-feature matrix
  std::string solution;    // solution directory for metrics (defaults to out)
  std::string out = "qpm_out";
  std::size_t n_select = 50;
  std::size_t per_class = 5;
  double lambda = 0.31622776601683794;
  std::string bias = "locality";
  bool enable_r = true;
  std::string mode = "exact";
  std::string solver = "lazy";
  std::size_t node_cap = 200000;
  double wallclock = 10800.0;
  double gap = 1e-4;
  std::uint64_t seed = 16;
  std::size_t top_pairs = 25;
  std::size_t max_iterations = 50;
  std::vector<std::string> reports;
  std::vector<std::size_t> sweep;
  std::vector<std::string> contrast;  // "c1:c2"
};

nlohmann::json to_json(const RunConfig& cfg);
void apply_json(RunConfig& cfg, const nlohmann::json& j);

int cmd_solve(const RunConfig& cfg, std::ostream& out);
int cmd_metrics(const RunConfig& cfg, std::ostream& out);
int cmd_oracle(const RunConfig& cfg, std::ostream& out);
int cmd_report(const RunConfig& cfg, std::ostream& out);

/// Parses argv and dispatches; errors are mapped to exit codes.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

std::string sha256_hex(const std::string& bytes);

}  // namespace qpm::cli

#endif  // QPM_TOOLS_COMMANDS_HPP
