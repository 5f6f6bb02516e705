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

// One PASS/FAIL line per acceptance criterion. Exits non-zero if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include "qpm/qpm.hpp"
#include "test_util.hpp"

namespace fs = std::filesystem;
using namespace qpm;
using testing::gaussian;
using testing::uniform;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

// Records the first failed check; later checks still run.
struct Checker {
  Outcome out;
  void require(bool ok, const std::string& what) {
    if (!ok && out.pass) {
      out.pass = false;
      out.detail = what;
    }
  }
};

// --- oracle equivalence -------------------------------------------------------

Outcome oracle_equivalence() {
  Stopwatch clock;
  std::mt19937_64 g(101);
  Checker ck;
  double worst = 0.0;
  const int trials = 120;
  for (int t = 0; t < trials; ++t) {
    std::size_t q = 5 + g() % 4, nc = 1 + g() % 3, m = 1 + g() % 2, ns = 3 + g() % 3;
    auto inst = testing::random_instance(g, q, nc, ns, m);
    auto bf = brute_force_solve(inst);
    auto bb = branch_and_bound_solve(inst, Budget{0, 0.0, 0.0});
    double diff = std::abs(bb.objective - bf.objective);
    worst = std::max(worst, diff);
    ck.require(diff < 1e-9, "trial " + std::to_string(t) + " differs by " + fmt("%.3g", diff));
    ck.require(validate(inst, bb).passed(), "trial " + std::to_string(t) + " fails validation");
  }
  double secs = clock.seconds();
  ck.require(secs < 60.0, "took " + fmt("%.1f s", secs));
  if (ck.out.pass) {
    ck.out.detail = std::to_string(trials) + " instances, max |dZ| " + fmt("%.2g", worst) + ", " +
                    fmt("%.1f s", secs);
  }
  return ck.out;
}

// --- lazy loop on the planted instance ------------------------------------------

// Twenty planted features carry the signal. Every class rates the first one
// highest, so the unconstrained top sets collide and the loop has to add cuts.
Outcome lazy_planted() {
  Stopwatch clock;
  std::mt19937_64 g(1);
  const std::size_t q = 200, nc = 50, ns = 20, m = 3;
  std::vector<std::size_t> planted;
  for (std::size_t i = 0; i < ns; ++i) planted.push_back(i * 10 + 3);
  ProblemInstance inst;
  inst.a = DenseMatrix(nc, q, 0.0);
  for (double& v : inst.a.data()) v = uniform(g, -1.0, 0.5);
  for (std::size_t c = 0; c < nc; ++c) {
    for (auto k : planted) inst.a(c, k) = uniform(g, -0.5, 1.0);
    inst.a(c, planted[0]) = 5.0;
    // Class pairs share their two strong planted features.
    std::size_t pair = c / 2;
    std::size_t s1 = 1 + pair % (ns - 1), s2 = 1 + (pair * 7 + 3) % (ns - 1);
    if (s2 == s1) s2 = 1 + (s1 % (ns - 1));
    inst.a(c, planted[s1]) = 3.0 + uniform(g, 0, 0.1);
    inst.a(c, planted[s2]) = 3.0 + uniform(g, 0, 0.1);
  }
  inst.r = testing::random_redundancy(g, q, 0.3, 0.05);
  inst.b.resize(q);
  for (double& v : inst.b) v = uniform(g, -0.3, 0.3);
  inst.n_select = ns;
  inst.per_class = m;
  inst.check();

  BinaryVector planted_select(q, 0);
  for (auto k : planted) planted_select[k] = 1;
  const double reference = assign_given_selection(inst, planted_select).objective;

  LazyOptions opt;
  opt.max_iterations = 50;
  auto res = lazy_constraint_solve(inst, opt);
  double secs = clock.seconds();

  Checker ck;
  ck.require(res.conformant, "not conformant after " + std::to_string(res.state.iteration) +
                                 " iterations");
  ck.require(res.state.iteration <= 50, "used " + std::to_string(res.state.iteration) + " iterations");
  auto rep = validate(inst, res.solution);
  ck.require(rep.passed(), "invalid: " + rep.describe());
  ck.require(res.solution.selected().size() == ns, "wrong selection size");
  for (std::size_t c = 0; c < nc; ++c) {
    std::size_t count = 0;
    for (std::size_t k = 0; k < q; ++k) count += res.solution.assign(c, k);
    ck.require(count == m, "class " + std::to_string(c) + " holds " + std::to_string(count));
  }
  auto sets = res.solution.class_sets();
  std::sort(sets.begin(), sets.end());
  ck.require(std::adjacent_find(sets.begin(), sets.end()) == sets.end(), "duplicate class sets");
  ck.require(res.solution.objective >= reference - 0.01 * std::abs(reference),
             "objective " + fmt("%.4f", res.solution.objective) + " below 99% of " +
                 fmt("%.4f", reference));
  ck.require(secs < 600.0, "took " + fmt("%.1f s", secs));
  if (ck.out.pass) {
    ck.out.detail = std::to_string(res.state.iteration) + " iterations, Z " +
                    fmt("%.4f", res.solution.objective) + " vs planted " +
                    fmt("%.4f", reference) + ", " + fmt("%.1f s", secs);
  }
  return ck.out;
}

// --- standard form ----------------------------------------------------------------

Outcome standard_form_equivalence() {
  std::mt19937_64 g(303);
  Checker ck;
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    std::size_t q = 4 + g() % 8, nc = 1 + g() % 4, m = 1 + g() % 3;
    std::size_t ns = std::min(q, m + 1 + g() % 4);
    ProblemInstance inst;
    inst.a = DenseMatrix(nc, q, 0.0);
    for (double& v : inst.a.data()) v = uniform(g, -1, 2);
    inst.r = testing::random_redundancy(g, q, 0.6);
    inst.b.resize(q);
    for (double& v : inst.b) v = uniform(g, -0.5, 0.5);
    inst.n_select = ns;
    inst.per_class = m;
    // Feasible x: a random selection with random per-class subsets of it.
    Solution sol = Solution::empty(nc, q);
    sol.select = testing::random_selection(g, q, ns);
    auto sel = selected_indices(sol.select);
    for (std::size_t c = 0; c < nc; ++c) {
      std::shuffle(sel.begin(), sel.end(), g);
      for (std::size_t i = 0; i < std::min(m, sel.size()); ++i) sol.assign(c, sel[i]) = 1;
    }
    double diff = std::abs(evaluate(standard_form(inst), encode_x(sol)) - objective(inst, sol));
    worst = std::max(worst, diff);
    ck.require(diff < 1e-9, "trial " + std::to_string(t) + " differs by " + fmt("%.3g", diff));
  }
  if (ck.out.pass) ck.out.detail = "100 points, max diff " + fmt("%.2g", worst);
  return ck.out;
}

// --- SID@5 ------------------------------------------------------------------------

FeatureTensor spiked_tensor(std::size_t n, double amplitude) {
  const std::size_t q = 5, h = 7, w = 7;
  std::vector<double> data(n * q * h * w, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = 0; k < q; ++k) data[((j * q + k) * h * w) + (k * 9 + j) % 49] = amplitude;
  }
  return FeatureTensor(n, q, h, w, data);
}

Outcome sid_scale_invariance() {
  const std::vector<std::size_t> five{0, 1, 2, 3, 4};
  std::mt19937_64 g(404);
  Checker ck;
  double worst = 0.0;
  for (int t = 0; t < 20; ++t) {
    std::vector<double> data(4 * 5 * 5 * 5);
    for (double& v : data) v = uniform(g, -1, 2);
    FeatureTensor tensor(4, 5, 5, 5, data);
    double base = sid5(tensor, five);
    for (double alpha : {0.1, 10.0}) {
      double diff = std::abs(base - sid5(tensor.scaled(alpha), five));
      worst = std::max(worst, diff);
      ck.require(diff < 1e-9, "SID moved by " + fmt("%.3g", diff));
    }
  }
  auto spiked = spiked_tensor(4, 1.0);
  double legacy1 = legacy_diversity5(spiked, five);
  double legacy001 = legacy_diversity5(spiked.scaled(0.01), five);
  ck.require(std::abs(legacy1 - legacy001) > 0.01,
             "legacy unchanged: " + fmt("%.4f", legacy1) + " vs " + fmt("%.4f", legacy001));
  if (ck.out.pass) {
    ck.out.detail = "SID max diff " + fmt("%.2g", worst) + "; legacy " + fmt("%.4f", legacy1) +
                    " -> " + fmt("%.4f", legacy001);
  }
  return ck.out;
}

// --- contrastiveness ----------------------------------------------------------------

double simpson(const std::function<double(double)>& fn, double a, double b, double fa, double fm,
               double fb, double whole, double tol, int depth) {
  double m = 0.5 * (a + b), lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  double flm = fn(lm), frm = fn(rm);
  double left = (m - a) / 6 * (fa + 4 * flm + fm), right = (b - m) / 6 * (fm + 4 * frm + fb);
  if (depth <= 0 || std::abs(left + right - whole) <= 15 * tol) {
    return left + right + (left + right - whole) / 15;
  }
  return simpson(fn, a, m, fa, flm, fm, left, tol / 2, depth - 1) +
         simpson(fn, m, b, fm, frm, fb, right, tol / 2, depth - 1);
}

double quadrature_overlap(double m1, double s1, double m2, double s2) {
  auto fn = [&](double x) { return std::min(normal_pdf(x, m1, s1), normal_pdf(x, m2, s2)); };
  double a = std::min(m1 - 10 * s1, m2 - 10 * s2), b = std::max(m1 + 10 * s1, m2 + 10 * s2);
  const int pieces = 2000;
  double total = 0.0, h = (b - a) / pieces;
  for (int i = 0; i < pieces; ++i) {
    double lo = a + i * h, hi = lo + h, mid = 0.5 * (lo + hi);
    double flo = fn(lo), fmid = fn(mid), fhi = fn(hi);
    total += simpson(fn, lo, hi, flo, fmid, fhi, h / 6 * (flo + 4 * fmid + fhi), 1e-12, 20);
  }
  return total;
}

PooledFeatures column(const std::vector<double>& v) {
  return PooledFeatures{DenseMatrix(v.size(), 1, v)};
}

Outcome contrastiveness_endpoints() {
  Checker ck;
  std::mt19937_64 g(505);
  std::vector<double> bimodal;
  for (int i = 0; i < 500; ++i) bimodal.push_back((i % 2 ? 10.0 : 0.0) + 0.1 * gaussian(g));
  double sep = contrastiveness(column(bimodal), {1}).value;
  ck.require(sep >= 0.99, "bimodal gives " + fmt("%.4f", sep));

  GmmFit same;
  same.comp[0] = same.comp[1] = {0.5, 2.0, 1.0};
  double identical = 1.0 - component_overlap(same);
  ck.require(std::abs(identical) <= 1e-6, "identical components give " + fmt("%.3g", identical));

  std::vector<double> unimodal(1000);
  for (double& v : unimodal) v = gaussian(g);
  double uni = contrastiveness(column(unimodal), {1}).value;
  auto fit = fit_gmm2(unimodal);
  double oracle = 1.0 - quadrature_overlap(fit.comp[0].mean, fit.comp[0].sd, fit.comp[1].mean,
                                           fit.comp[1].sd);
  ck.require(std::abs(uni - oracle) <= 1e-3,
             "unimodal " + fmt("%.6f", uni) + " vs quadrature " + fmt("%.6f", oracle));
  if (ck.out.pass) {
    ck.out.detail = "bimodal " + fmt("%.4f", sep) + ", identical " + fmt("%.2g", identical) +
                    ", unimodal " + fmt("%.5f", uni) + " vs " + fmt("%.5f", oracle);
  }
  return ck.out;
}

// --- class independence -------------------------------------------------------------

Outcome tau_endpoints() {
  Checker ck;
  std::mt19937_64 g(606);
  std::vector<std::uint32_t> labels;
  for (int i = 0; i < 40; ++i) labels.push_back(static_cast<std::uint32_t>(i % 4));
  DenseMatrix detectors(40, 4, 0.0);
  for (std::size_t j = 0; j < 40; ++j) detectors(j, labels[j]) = uniform(g, 0.5, 2.0);
  double zero = class_independence(PooledFeatures{detectors}, LabelVector::from(labels),
                                   {1, 1, 1, 1})
                    .value;
  ck.require(zero == 0.0, "detectors give " + fmt("%.3g", zero));

  const std::size_t n = 10000, nc = 4;
  std::vector<std::uint32_t> many(n);
  DenseMatrix noise(n, 1, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    many[j] = static_cast<std::uint32_t>(j % nc);
    noise(j, 0) = uniform(g, 0, 1);
  }
  double tau = class_independence(PooledFeatures{noise}, LabelVector::from(many), {1}).value;
  double expected = 1.0 - 1.0 / static_cast<double>(nc);
  ck.require(std::abs(tau - expected) <= 0.02, "independent gives " + fmt("%.4f", tau));
  if (ck.out.pass) ck.out.detail = "detectors 0, independent " + fmt("%.4f", tau);
  return ck.out;
}

// --- structural grounding -------------------------------------------------------------

Outcome structural_grounding_endpoints() {
  Checker ck;
  std::mt19937_64 g(707);
  DenseMatrix rows(10, 6, 0.0);
  for (double& v : rows.data()) v = uniform(g, 0, 1);
  auto gt = AttributeMatrix::from(rows);
  double identity = structural_grounding(gt.rows, gt).value;
  ck.require(std::abs(identity - 1.0) < 1e-12, "identity gives " + fmt("%.6f", identity));
  DenseMatrix ortho(10, 10, 0.0);
  for (std::size_t c = 0; c < 10; ++c) ortho(c, c) = 1.0 + static_cast<double>(c);
  double orthogonal = structural_grounding(ortho, gt).value;
  ck.require(orthogonal == 0.0, "orthogonal gives " + fmt("%.6f", orthogonal));

  ck.require(binary_cosine_cap(5) == 0.8, "cap for m = 5 is " + fmt("%.6f", binary_cosine_cap(5)));
  double highest = 0.0;
  int solved = 0;
  for (int t = 0; t < 20; ++t) {
    auto inst = testing::random_instance(g, 14, 6, 7, 5);
    auto res = lazy_constraint_solve(inst);
    if (!res.conformant) continue;
    ++solved;
    double cos = max_pairwise_cosine(binary_rows(res.solution));
    highest = std::max(highest, cos);
    ck.require(cos <= 0.8 + 1e-12, "class cosine " + fmt("%.6f", cos) + " above cap");
  }
  ck.require(solved > 0, "no conformant solution to check");
  if (ck.out.pass) {
    ck.out.detail = "identity 100%, orthogonal 0%, max class cosine " + fmt("%.4f", highest) +
                    " over " + std::to_string(solved) + " solutions";
  }
  return ck.out;
}

// --- ablation ---------------------------------------------------------------------------

// Six strong single-class features, each with a spatially concentrated
// duplicate, and six slightly noisier features for six further classes. The
// duplicates win on A alone; R makes the distinct features worth more.
Outcome ablation_direction() {
  const std::size_t strong = 6, m = 2, nc = 2 * strong, per = 10, n = nc * per;
  const std::size_t q = 3 * strong, h = 3, w = 3, ns = 2 * strong;
  std::mt19937_64 g(1);
  std::vector<std::uint32_t> labels(n);
  std::vector<double> data(n * q * h * w, 0.0);
  auto put = [&](std::size_t j, std::size_t k, double v, bool spike) {
    for (std::size_t i = 0; i < h * w; ++i) {
      data[(j * q + k) * h * w + i] = spike ? (i == 4 ? v * 9 : 0.0) : v;
    }
  };
  for (std::size_t j = 0; j < n; ++j) {
    std::size_t c = j % nc;
    labels[j] = static_cast<std::uint32_t>(c);
    for (std::size_t s = 0; s < strong; ++s) {
      double v = c == s ? 1.0 + 0.01 * uniform(g, 0, 1) : 0.0;
      put(j, s, v, false);
      put(j, strong + s, v * (1.0 + 1e-3 * uniform(g, 0, 1)), true);
      double weak = c == strong + s ? std::max(0.0, 1.0 + 0.1 * gaussian(g)) : 0.0;
      put(j, 2 * strong + s, weak, false);
    }
  }
  FeatureTensor maps(n, q, h, w, data);
  auto pooled = pool(maps);
  auto sim = scale_similarity(
      build_class_feature_similarity(pooled, LabelVector::from(labels, nc)), m, nc);
  auto redundancy = build_feature_similarity(sim, ns);
  auto locality = build_locality_bias(maps);

  auto solve = [&](bool with_r, bool with_bias) {
    auto inst = ProblemInstance::from(sim, with_r ? redundancy : zero_feature_similarity(q),
                                      with_bias ? locality : zero_bias(q), ns, m);
    return lazy_constraint_solve(inst);
  };
  auto mean_raw_bias = [&](const Solution& sol) {
    double sum = 0.0;
    for (auto k : sol.selected()) sum += locality.raw[k];
    return sum / static_cast<double>(ns);
  };

  Checker ck;
  auto off = solve(false, false), on = solve(true, false), biased = solve(true, true);
  ck.require(off.conformant && on.conformant && biased.conformant, "a run is not conformant");
  double corr_off = correlation_metric(pooled, off.solution.select).value;
  double corr_on = correlation_metric(pooled, on.solution.select).value;
  ck.require(corr_off - corr_on >= 0.1,
             "correlation " + fmt("%.4f", corr_off) + " -> " + fmt("%.4f", corr_on));
  double b_plain = mean_raw_bias(on.solution), b_biased = mean_raw_bias(biased.solution);
  ck.require(b_biased > b_plain,
             "mean raw bias " + fmt("%.6f", b_plain) + " -> " + fmt("%.6f", b_biased));
  if (ck.out.pass) {
    ck.out.detail = "correlation " + fmt("%.4f", corr_off) + " -> " + fmt("%.4f", corr_on) +
                    ", mean raw bias " + fmt("%.5f", b_plain) + " -> " + fmt("%.5f", b_biased);
  }
  return ck.out;
}

// --- warm start -------------------------------------------------------------------------

Outcome warm_start_feasibility() {
  Checker ck;
  std::mt19937_64 g(909);
  for (int t = 0; t < 100; ++t) {
    std::size_t q = 8 + g() % 5, nc = 2 + g() % 4, ns = 4 + g() % 3;
    auto inst = testing::random_instance(g, q, nc, ns, 2);
    // Near-identical class rows give the dedup step work.
    for (std::size_t c = 1; c < nc; ++c) {
      for (std::size_t k = 0; k < q; ++k) inst.a(c, k) = inst.a(0, k) + uniform(g, 0, 0.1);
    }
    auto select = testing::random_selection(g, q, ns);
    // Strongest relaxed cuts: every class sparse, every pair a duplicate, Gamma = selection.
    LazyCuts cuts = LazyCuts::none(q);
    cuts.gamma = select;
    for (std::size_t c = 0; c < nc; ++c) {
      cuts.sparse.insert(c);
      for (std::size_t d = c + 1; d < nc; ++d) cuts.duplicates.insert({c, d});
    }
    auto ws = warm_start(inst, select, cuts);
    auto rep = validate_relaxed(inst, cuts, ws.solution);
    ck.require(rep.passed(), "trial " + std::to_string(t) + ": " + rep.describe());
    ck.require(ws.solution.select == select, "trial " + std::to_string(t) + " changed selection");
  }

  ProblemInstance hand;
  hand.a = DenseMatrix(2, 3, std::vector<double>{0.9, 0.8, 0.1, 0.85, 0.7, 0.2});
  hand.r = DenseMatrix(3, 3, 0.0);
  hand.b.assign(3, 0.0);
  hand.n_select = 3;
  hand.per_class = 2;
  auto ws = warm_start(hand, {1, 1, 1}, LazyCuts::none(3));
  std::vector<std::vector<std::size_t>> expected{{0, 1}, {0, 2}};
  ck.require(ws.swaps == 1 && !ws.fallback && ws.solution.class_sets() == expected,
             "hand trace gives " + std::to_string(ws.swaps) + " swaps");
  ck.require(std::abs(ws.solution.objective - 2.75) < 1e-12,
             "hand trace objective " + fmt("%.6f", ws.solution.objective));
  if (ck.out.pass) ck.out.detail = "100 selections valid; hand trace one swap, sets {0,1} {0,2}";
  return ck.out;
}

// --- determinism ---------------------------------------------------------------------------

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

std::string quote(const fs::path& p) { return "'" + p.string() + "'"; }

Outcome determinism() {
  auto dir = testing::scratch_dir("acceptance_determinism");
  const std::size_t n = 64, q = 12, nc = 4, h = 4, w = 4;
  std::mt19937_64 g(1010);
  std::vector<double> data(n * q * h * w);
  std::vector<std::uint32_t> labels(n);
  for (std::size_t j = 0; j < n; ++j) {
    labels[j] = static_cast<std::uint32_t>(j % nc);
    for (std::size_t k = 0; k < q; ++k) {
      double boost = (k % nc == labels[j]) ? 2.0 : 0.0;
      for (std::size_t i = 0; i < h * w; ++i) {
        data[((j * q + k) * h * w) + i] =
            uniform(g, 0, 1) + (i == k % (h * w) ? boost * 4 : boost * 0.2);
      }
    }
  }
  io::write_raw(dir / "maps.qpmt", io::raw_from(FeatureTensor(n, q, h, w, data)));
  io::write_raw(dir / "labels.qpmt", io::raw_from(LabelVector::from(labels, nc)));
  std::ofstream(dir / "config.json") << R"({"n_select": 6, "per_class": 2, "bias": "locality"})"
                                     << "\n";

  Checker ck;
  std::string first_solve, first_metrics;
  int run = 0;
  for (const char* threads : {"1", "8", "1", "8"}) {
    fs::remove_all(dir / "out");
    fs::remove_all(dir / "m");
    std::string env = std::string("QPM_THREADS=") + threads + " ";
    std::string solve = env + quote(QPM_CLI_PATH) + " solve --config " + quote(dir / "config.json") +
                        " --features " + quote(dir / "maps.qpmt") + " --labels " +
                        quote(dir / "labels.qpmt") + " --out " + quote(dir / "out") +
                        " > /dev/null 2>&1";
    std::string metrics = env + quote(QPM_CLI_PATH) + " metrics --features " +
                          quote(dir / "maps.qpmt") + " --labels " + quote(dir / "labels.qpmt") +
                          " --solution " + quote(dir / "out") + " --out " + quote(dir / "m") +
                          " > /dev/null 2>&1";
    ck.require(std::system(solve.c_str()) == 0, "solve failed with QPM_THREADS=" + std::string(threads));
    ck.require(std::system(metrics.c_str()) == 0,
               "metrics failed with QPM_THREADS=" + std::string(threads));
    auto s = slurp(dir / "out" / "manifest.json"), m = slurp(dir / "m" / "metrics_manifest.json");
    ck.require(!s.empty() && !m.empty(), "manifest missing");
    if (run++ == 0) {
      first_solve = s;
      first_metrics = m;
    } else {
      ck.require(s == first_solve, "solve manifest differs with QPM_THREADS=" + std::string(threads));
      ck.require(m == first_metrics,
                 "metrics manifest differs with QPM_THREADS=" + std::string(threads));
    }
  }
  if (ck.out.pass) ck.out.detail = "4 runs at 1 and 8 threads, manifests byte-identical";
  return ck.out;
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    Outcome (*run)();
  };
  const Criterion criteria[] = {
      {"oracle equivalence", oracle_equivalence},
      {"lazy loop conformance", lazy_planted},
      {"standard form equivalence", standard_form_equivalence},
      {"SID@5 scale invariance", sid_scale_invariance},
      {"contrastiveness endpoints", contrastiveness_endpoints},
      {"class independence endpoints", tau_endpoints},
      {"structural grounding", structural_grounding_endpoints},
      {"ablation direction", ablation_direction},
      {"warm start feasibility", warm_start_feasibility},
      {"determinism", determinism},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    std::printf("%s %s: %s\n", o.pass ? "PASS" : "FAIL", c.name, o.detail.c_str());
    std::fflush(stdout);
    if (!o.pass) ++failed;
  }
  return failed == 0 ? 0 : 1;
}
