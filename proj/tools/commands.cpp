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

#include "commands.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "qpm/qpm.hpp"

namespace qpm::cli {

namespace fs = std::filesystem;
using nlohmann::json;

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error("sha256 failed");
  }
  std::string hex;
  char buf[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", digest[i]);
    hex += buf;
  }
  return hex;
}

namespace {

std::string file_text(const fs::path& path) {
  auto bytes = io::read_bytes(path);
  return std::string(bytes.begin(), bytes.end());
}

std::string file_hash(const fs::path& path) { return sha256_hex(file_text(path)); }

void write_text(const fs::path& path, const std::string& text) { io::write_bytes(path, text); }

std::string number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

BiasKind parse_bias(const std::string& s) {
  if (s == "locality") return BiasKind::kLocality;
  if (s == "center") return BiasKind::kCenter;
  if (s == "none") return BiasKind::kNone;
  throw Error("unknown bias kind '" + s + "'");
}

SparsityMode parse_mode(const std::string& s) {
  if (s == "exact") return SparsityMode::kExactPerClass;
  if (s == "average") return SparsityMode::kAverage;
  throw Error("unknown sparsity mode '" + s + "'");
}

Budget budget_of(const RunConfig& cfg) { return Budget{cfg.node_cap, cfg.wallclock, cfg.gap}; }

// Inputs shared by the commands, loaded once.
struct Inputs {
  std::optional<PooledFeatures> pooled;
  std::optional<FeatureTensor> maps;
  std::optional<LabelVector> labels;
  std::optional<DenseMatrix> similarity;
  json hashes = json::object();
};

Inputs load_inputs(const RunConfig& cfg, bool need_labels) {
  Inputs in;
  auto note = [&](const char* key, const std::string& path) {
    if (!path.empty()) in.hashes[key] = file_hash(path);
  };
  if (!cfg.similarity.empty()) {
    auto raw = io::read_raw(cfg.similarity);
    if (raw.rank() != 2) throw FormatError("similarity file must be rank 2");
    in.similarity = io::to_pooled(raw).values;
    note("similarity", cfg.similarity);
  }
  if (!cfg.features.empty()) {
    auto raw = io::read_raw(cfg.features);
    if (raw.rank() == 4) {
      in.maps = io::to_feature_tensor(raw);
      in.pooled = pool(*in.maps);
    } else {
      in.pooled = io::to_pooled(raw);
    }
    note("features", cfg.features);
  }
  if (!cfg.maps.empty()) {
    in.maps = io::to_feature_tensor(io::read_raw(cfg.maps));
    note("maps", cfg.maps);
  }
  if (!cfg.labels.empty()) {
    in.labels = io::to_labels(io::read_raw(cfg.labels));
    note("labels", cfg.labels);
  } else if (need_labels) {
    throw Error("--labels is required");
  }
  if (in.maps && in.pooled && in.maps->features() != in.pooled->features()) {
    throw FormatError("maps and features disagree on the feature count");
  }
  return in;
}

struct Built {
  ProblemInstance inst;
  double epsilon = 0.0;
};

Built build_instance(const RunConfig& cfg, const Inputs& in, std::size_t n_select) {
  SimilarityMatrix sim;
  if (in.similarity) {
    sim.a = *in.similarity;
    sim.scaled = true;
  } else {
    if (!in.pooled) throw Error("--features (or --similarity) is required");
    if (!in.labels) throw Error("--labels is required");
    sim = build_class_feature_similarity(*in.pooled, *in.labels);
    sim = scale_similarity(std::move(sim), cfg.per_class, sim.classes());
  }
  const std::size_t q = sim.features();
  Built out;
  FeatureSimilarityMatrix red = zero_feature_similarity(q);
  if (cfg.enable_r) {
    red = build_feature_similarity(sim, n_select);
    out.epsilon = red.epsilon;
  }
  BiasVector bias = zero_bias(q);
  BiasKind kind = parse_bias(cfg.bias);
  if (kind != BiasKind::kNone) {
    if (!in.maps) throw Error("bias '" + cfg.bias + "' needs rank-4 feature maps (or --bias none)");
    if (in.maps->features() != q) throw FormatError("feature maps do not match the similarity width");
    bias = kind == BiasKind::kLocality ? build_locality_bias(*in.maps, cfg.lambda)
                                       : build_center_bias(*in.maps, cfg.lambda);
  }
  out.inst = ProblemInstance::from(sim, red, bias, n_select, cfg.per_class, parse_mode(cfg.mode));
  return out;
}

// Greedy selection with its best assignment; nullopt when infeasible.
std::optional<Solution> greedy_start(const ProblemInstance& inst) {
  try {
    return assign_given_selection(inst, greedy_selection(inst));
  } catch (const InfeasibleSelection&) {
    return std::nullopt;
  }
}

struct SolveOutcome {
  Solution solution;
  bool conformant = false;
  std::size_t iterations = 0;
};

SolveOutcome solve(const RunConfig& cfg, const ProblemInstance& inst) {
  SolveOutcome out;
  if (cfg.solver == "lazy" && inst.mode == SparsityMode::kExactPerClass) {
    LazyOptions opt;
    opt.iteration_budget = budget_of(cfg);
    opt.polish_budget = budget_of(cfg);
    opt.max_iterations = cfg.max_iterations;
    auto res = lazy_constraint_solve(inst, opt);
    out.solution = res.solution;
    out.iterations = res.state.iteration;
    out.conformant = res.conformant;
  } else if (cfg.solver == "bnb" || cfg.solver == "lazy") {
    auto start = greedy_start(inst);
    out.solution = branch_and_bound_solve(inst, budget_of(cfg), start ? &*start : nullptr);
    out.conformant = out.solution.feasible();
  } else {
    throw Error("unknown solver '" + cfg.solver + "'");
  }
  if (out.conformant) out.conformant = validate(inst, out.solution).passed();
  return out;
}

json manifest_base(const char* command, const RunConfig& cfg, const Inputs& in) {
  json m;
  m["command"] = command;
  m["config"] = to_json(cfg);
  m["inputs"] = in.hashes;
  return m;
}

void write_manifest(const fs::path& path, const json& m) { write_text(path, m.dump(2) + "\n"); }

std::pair<std::size_t, std::size_t> parse_pair(const std::string& s) {
  auto colon = s.find(':');
  if (colon == std::string::npos) throw Error("contrast pairs look like 3:7, got '" + s + "'");
  try {
    return {std::stoul(s.substr(0, colon)), std::stoul(s.substr(colon + 1))};
  } catch (const std::exception&) {
    throw Error("contrast pairs look like 3:7, got '" + s + "'");
  }
}

std::string join(const std::vector<std::size_t>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + std::to_string(v[i]);
  return s.empty() ? "-" : s;
}

}  // namespace

json to_json(const RunConfig& c) {
  return json{{"features", c.features},   {"maps", c.maps},
              {"labels", c.labels},       {"attributes", c.attributes},
              {"similarity", c.similarity}, {"solution", c.solution},
              {"out", c.out},             {"n_select", c.n_select},
              {"per_class", c.per_class}, {"lambda", c.lambda},
              {"bias", c.bias},           {"enable_r", c.enable_r},
              {"mode", c.mode},           {"solver", c.solver},
              {"node_cap", c.node_cap},   {"wallclock", c.wallclock},
              {"gap", c.gap},             {"seed", c.seed},
              {"top_pairs", c.top_pairs}, {"max_iterations", c.max_iterations},
              {"reports", c.reports},     {"sweep", c.sweep},
              {"contrast", c.contrast}};
}

void apply_json(RunConfig& c, const json& j) {
  if (!j.is_object()) throw Error("config must be a JSON object");
  auto take = [&](const char* key, auto& field) {
    if (j.contains(key)) j.at(key).get_to(field);
  };
  take("features", c.features);
  take("maps", c.maps);
  take("labels", c.labels);
  take("attributes", c.attributes);
  take("similarity", c.similarity);
  take("solution", c.solution);
  take("out", c.out);
  take("n_select", c.n_select);
  take("per_class", c.per_class);
  take("lambda", c.lambda);
  take("bias", c.bias);
  take("enable_r", c.enable_r);
  take("mode", c.mode);
  take("solver", c.solver);
  take("node_cap", c.node_cap);
  take("wallclock", c.wallclock);
  take("gap", c.gap);
  take("seed", c.seed);
  take("top_pairs", c.top_pairs);
  take("max_iterations", c.max_iterations);
  take("reports", c.reports);
  take("sweep", c.sweep);
  take("contrast", c.contrast);
}

int cmd_solve(const RunConfig& cfg, std::ostream& out) {
  Inputs in = load_inputs(cfg, cfg.similarity.empty());
  Built built = build_instance(cfg, in, cfg.n_select);
  const ProblemInstance& inst = built.inst;
  SolveOutcome res = solve(cfg, inst);

  fs::path dir = cfg.out;
  fs::create_directories(dir);
  json m = manifest_base("solve", cfg, in);
  json outputs = json::object();
  std::string report;
  if (res.solution.feasible()) {
    io::write_solution(dir, res.solution);
    report = validate(inst, res.solution).describe();
    for (const char* f : {io::kSelectFile, io::kAssignFile, io::kClassesFile}) {
      outputs[f] = file_hash(dir / f);
    }
  } else {
    report = "no feasible solution within the budget\n";
  }
  write_text(dir / "validate.txt", report);
  outputs["validate.txt"] = file_hash(dir / "validate.txt");
  m["outputs"] = outputs;
  m["result"] = {{"objective", res.solution.objective},
                 {"bound", res.solution.bound},
                 {"gap", res.solution.gap},
                 {"status", to_string(res.solution.status)},
                 {"conformant", res.conformant},
                 {"iterations", res.iterations},
                 {"nodes", res.solution.nodes},
                 {"epsilon", built.epsilon}};
  if (!std::isfinite(res.solution.objective)) m["result"]["objective"] = nullptr;
  if (!std::isfinite(res.solution.bound)) m["result"]["bound"] = nullptr;
  if (!std::isfinite(res.solution.gap)) m["result"]["gap"] = nullptr;
  write_manifest(dir / "manifest.json", m);

  out << "objective " << number(res.solution.objective) << "  gap " << number(res.solution.gap)
      << "  status " << to_string(res.solution.status) << '\n';
  if (res.solution.feasible()) out << io::class_sets_text(res.solution);
  out << report;
  return res.conformant ? kOk : kNonconformant;
}

int cmd_metrics(const RunConfig& cfg, std::ostream& out) {
  Inputs in = load_inputs(cfg, false);
  if (!in.pooled) throw Error("--features is required");
  fs::path sol_dir = cfg.solution.empty() ? fs::path(cfg.out) : fs::path(cfg.solution);
  Solution sol = io::read_solution(sol_dir);
  const std::size_t q = in.pooled->features();
  if (sol.select.size() != q) {
    throw FormatError("solution has " + std::to_string(sol.select.size()) +
                      " features, the feature file has " + std::to_string(q));
  }
  if (in.labels && in.labels->size() != in.pooled->samples()) {
    throw FormatError("label count does not match sample count");
  }

  MetricsReport rep;
  GmmOptions gmm;
  gmm.seed = cfg.seed;
  rep.contrastiveness = contrastiveness(*in.pooled, sol.select, gmm);
  if (in.labels) rep.class_independence = class_independence(*in.pooled, *in.labels, sol.select);
  auto sets = sol.class_sets();
  if (in.maps) {
    rep.sid5 = sid5(*in.maps, sets);
    rep.legacy_diversity5 = legacy_diversity5(*in.maps, sets);
    rep.feature_diversity_loss = solution_diversity_loss(*in.maps, sol);
  }
  DenseMatrix rows = binary_rows(sol);
  if (!cfg.attributes.empty()) {
    auto attrs = io::to_attributes(io::read_raw(cfg.attributes));
    in.hashes["attributes"] = file_hash(cfg.attributes);
    if (attrs.rows.rows() != sol.assign.rows()) {
      throw FormatError("attribute rows do not match the solution's class count");
    }
    std::size_t pairs = std::min(cfg.top_pairs, rows.rows() * (rows.rows() - 1) / 2);
    rep.structural_grounding = structural_grounding(rows, attrs, pairs);
  }
  if (sol.selected().size() >= 2) rep.correlation = correlation_metric(*in.pooled, sol.select);

  std::ostringstream explain;
  explain << io::class_sets_text(sol);
  if (rows.rows() >= 2) {
    explain << "max class cosine " << number(max_pairwise_cosine(rows));
    std::size_t m = sets.empty() ? 0 : sets[0].size();
    bool equal = std::all_of(sets.begin(), sets.end(), [&](auto& s) { return s.size() == m; });
    if (equal && m > 0) explain << " (cap " << number(binary_cosine_cap(m)) << ")";
    explain << '\n';
  }
  for (const auto& pair_text : cfg.contrast) {
    auto [c1, c2] = parse_pair(pair_text);
    auto cc = contrast_classes(sol, c1, c2);
    explain << "class " << c1 << " vs class " << c2 << ": shared " << join(cc.shared) << "; only "
            << c1 << ": " << join(cc.only_first) << "; only " << c2 << ": "
            << join(cc.only_second) << '\n';
  }

  fs::path dir = cfg.out;
  fs::create_directories(dir);
  write_text(dir / "metrics.csv", rep.csv());
  write_text(dir / "metrics.txt", rep.table());
  write_text(dir / "explanation.txt", explain.str());
  json m = manifest_base("metrics", cfg, in);
  m["solution"] = {{"select", file_hash(sol_dir / io::kSelectFile)},
                   {"assign", file_hash(sol_dir / io::kAssignFile)}};
  json outputs = json::object();
  for (const char* f : {"metrics.csv", "metrics.txt", "explanation.txt"}) {
    outputs[f] = file_hash(dir / f);
  }
  m["outputs"] = outputs;
  write_manifest(dir / "metrics_manifest.json", m);

  out << rep.table() << explain.str();
  return kOk;
}

int cmd_oracle(const RunConfig& cfg, std::ostream& out) {
  Inputs in = load_inputs(cfg, cfg.similarity.empty());
  Built built = build_instance(cfg, in, cfg.n_select);
  const ProblemInstance& inst = built.inst;
  const double space = brute_force_space(inst);
  if (!(space <= kBruteForceGuard)) {
    out << "search space " << number(space) << " exceeds the oracle guard "
        << number(kBruteForceGuard) << '\n';
    return kGuard;
  }
  Solution oracle = brute_force_solve(inst);
  auto start = greedy_start(inst);
  Solution solver = branch_and_bound_solve(inst, budget_of(cfg), start ? &*start : nullptr);
  out << "oracle objective " << number(oracle.objective) << '\n';
  if (!solver.feasible()) {
    out << "solver found no feasible solution\n";
    return kNonconformant;
  }
  double diff = oracle.objective - solver.objective;
  double gap = diff / std::max(std::abs(oracle.objective), 1e-9);
  if (std::abs(diff) <= 1e-9 * (1.0 + std::abs(oracle.objective))) gap = 0.0;
  out << "solver objective " << number(solver.objective) << "  nodes " << solver.nodes
      << "  reported gap " << number(solver.gap) << '\n';
  out << "gap " << number(gap) << '\n';
  return gap == 0.0 ? kOk : kNonconformant;
}

int cmd_report(const RunConfig& cfg, std::ostream& out) {
  if (cfg.reports.empty() && cfg.sweep.empty()) {
    throw Error("report needs --reports and/or --sweep");
  }
  fs::path dir = cfg.out;
  fs::create_directories(dir);
  if (!cfg.reports.empty()) {
    std::vector<Series> series;
    for (const auto& path : cfg.reports) {
      Series s;
      s.label = fs::path(path).parent_path().filename().string();
      if (s.label.empty()) s.label = fs::path(path).stem().string();
      s.values = parse_report_means(file_text(path));
      series.push_back(std::move(s));
    }
    write_text(dir / "radar.svg", radar_svg(series));
    out << "radar.svg: " << series.size() << " series\n";
  }
  if (!cfg.sweep.empty()) {
    Inputs in = load_inputs(cfg, cfg.similarity.empty());
    std::vector<SweepPoint> points;
    for (auto n : cfg.sweep) {
      Built built = build_instance(cfg, in, n);
      auto start = greedy_start(built.inst);
      Solution sol = branch_and_bound_solve(built.inst, budget_of(cfg), start ? &*start : nullptr);
      points.push_back({n, cfg.per_class, sol.objective, sol.gap, to_string(sol.status)});
      out << "n_select " << n << ": objective " << number(sol.objective) << '\n';
    }
    write_text(dir / "sweep.csv", sweep_csv(points));
  }
  return kOk;
}

namespace {

void add_common(CLI::App* sub, RunConfig& cfg, std::string& config_path, bool& no_r) {
  sub->add_option("--config", config_path, "JSON config; flags override it");
  sub->add_option("--features", cfg.features, "pooled (rank 2) or map (rank 4) features");
  sub->add_option("--maps", cfg.maps, "rank-4 feature maps when --features is pooled");
  sub->add_option("--labels", cfg.labels, "per-sample class labels");
  sub->add_option("--attributes", cfg.attributes, "per-class attribute rows");
  sub->add_option("--similarity", cfg.similarity, "precomputed class-feature matrix");
  sub->add_option("--solution", cfg.solution, "solution directory (metrics)");
  sub->add_option("--out", cfg.out, "output directory");
  sub->add_option("--n-select", cfg.n_select, "number of selected features");
  sub->add_option("--per-class", cfg.per_class, "features per class");
  sub->add_option("--lambda", cfg.lambda, "bias magnitude");
  sub->add_option("--bias", cfg.bias, "selection bias")
      ->check(CLI::IsMember({"locality", "center", "none"}));
  sub->add_flag("--no-r", no_r, "disable the feature redundancy term");
  sub->add_option("--mode", cfg.mode, "sparsity model")->check(CLI::IsMember({"exact", "average"}));
  sub->add_option("--solver", cfg.solver, "solver")->check(CLI::IsMember({"lazy", "bnb"}));
  sub->add_option("--node-cap", cfg.node_cap, "node budget per search (0 = none)");
  sub->add_option("--wallclock", cfg.wallclock, "seconds per search (0 = none)");
  sub->add_option("--gap", cfg.gap, "relative target gap");
  sub->add_option("--seed", cfg.seed, "seed for randomized steps");
  sub->add_option("--top-pairs", cfg.top_pairs, "class pairs for structural grounding");
  sub->add_option("--max-iterations", cfg.max_iterations, "lazy loop iteration cap");
  sub->add_option("--reports", cfg.reports, "metrics CSV files (report)")->delimiter(',');
  sub->add_option("--sweep", cfg.sweep, "n_select values to sweep (report)")->delimiter(',');
  sub->add_option("--contrast", cfg.contrast, "class pairs to contrast, as c1:c2");
}

// The config file must be read before CLI11 assigns flag values on top.
std::string find_config(int argc, const char* const* argv) {
  std::string path;
  for (int i = 1; i < argc; ++i) {
    std::string a = argv[i];
    if (a == "--config" && i + 1 < argc) path = argv[i + 1];
    if (a.rfind("--config=", 0) == 0) path = a.substr(9);
  }
  return path;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  std::string config_path = find_config(argc, argv);
  try {
    if (!config_path.empty()) apply_json(cfg, json::parse(file_text(config_path)));
  } catch (const std::exception& e) {
    err << "error: config: " << e.what() << '\n';
    return kUsage;
  }
  bool no_r = false;
  CLI::App app{"Feature selection and assignment solver with interpretability metrics", "qpm"};
  app.require_subcommand(1);
  struct Command {
    const char* name;
    const char* help;
    int (*fn)(const RunConfig&, std::ostream&);
  };
  const Command commands[] = {
      {"solve", "build the QP from features and labels and solve it", cmd_solve},
      {"metrics", "evaluate a solution", cmd_metrics},
      {"oracle", "compare branch-and-bound with exhaustive search", cmd_oracle},
      {"report", "radar chart and n_select sweep", cmd_report},
  };
  for (const auto& c : commands) add_common(app.add_subcommand(c.name, c.help), cfg, config_path, no_r);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }
  if (no_r) cfg.enable_r = false;
  for (const auto& c : commands) {
    if (!app.got_subcommand(c.name)) continue;
    try {
      return c.fn(cfg, out);
    } catch (const GuardExceeded& e) {
      err << "error: " << e.what() << '\n';
      return kGuard;
    } catch (const std::exception& e) {
      err << "error: " << e.what() << '\n' << "run 'qpm " << c.name << " --help' for usage\n";
      return kUsage;
    }
  }
  return kUsage;
}

}  // namespace qpm::cli
