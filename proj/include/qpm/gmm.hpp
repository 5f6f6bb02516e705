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

#ifndef QPM_GMM_HPP
#define QPM_GMM_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <span>
#include <vector>

#include "qpm/matrix.hpp"

namespace qpm {

struct GaussianComponent {
  double weight = 0.5;
  double mean = 0.0;
  double sd = 1.0;
};

struct GmmFit {
  std::array<GaussianComponent, 2> comp;
  double log_likelihood = -std::numeric_limits<double>::infinity();
  std::size_t iterations = 0;
  bool monotone = true;     // log-likelihood never decreased
  bool degenerate = false;  // zero-range sample
};

struct GmmOptions {
  std::size_t restarts = 3;
  std::size_t max_iterations = 200;
  double tolerance = 1e-8;
  double sd_floor_ratio = 1e-6;
  std::uint64_t seed = 16;
};

inline double normal_pdf(double x, double mean, double sd) {
  double z = (x - mean) / sd;
  return std::exp(-0.5 * z * z) / (sd * std::sqrt(2.0 * std::numbers::pi));
}

inline double normal_log_pdf(double x, double mean, double sd) {
  double z = (x - mean) / sd;
  return -0.5 * z * z - std::log(sd) - 0.5 * std::log(2.0 * std::numbers::pi);
}

inline double normal_cdf(double x, double mean, double sd) {
  return 0.5 * std::erfc(-(x - mean) / (sd * std::numbers::sqrt2));
}

namespace detail {

// Uniform in [-1, 1) from raw engine output, independent of the standard
// library's distribution implementations.
inline double signed_unit(std::mt19937_64& gen) {
  return static_cast<double>(gen() >> 11) * 0x1.0p-52 - 1.0;
}

inline double gmm_log_likelihood(std::span<const double> x, const GmmFit& g) {
  double ll = 0.0;
  for (double v : x) {
    double l0 = std::log(g.comp[0].weight) + normal_log_pdf(v, g.comp[0].mean, g.comp[0].sd);
    double l1 = std::log(g.comp[1].weight) + normal_log_pdf(v, g.comp[1].mean, g.comp[1].sd);
    double hi = std::max(l0, l1);
    ll += hi + std::log(std::exp(l0 - hi) + std::exp(l1 - hi));
  }
  return ll;
}

inline GmmFit run_em(std::span<const double> x, GmmFit g, const GmmOptions& opt,
                     double floor) {
  const std::size_t n = x.size();
  std::vector<double> resp(n);
  g.log_likelihood = gmm_log_likelihood(x, g);
  for (g.iterations = 0; g.iterations < opt.max_iterations;) {
    for (std::size_t i = 0; i < n; ++i) {
      double l0 = std::log(g.comp[0].weight) + normal_log_pdf(x[i], g.comp[0].mean, g.comp[0].sd);
      double l1 = std::log(g.comp[1].weight) + normal_log_pdf(x[i], g.comp[1].mean, g.comp[1].sd);
      resp[i] = 1.0 / (1.0 + std::exp(l0 - l1));  // share of component 1
    }
    GmmFit next = g;
    for (int c = 0; c < 2; ++c) {
      double w = 0.0, s = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        double r = c ? resp[i] : 1.0 - resp[i];
        w += r;
        s += r * x[i];
      }
      auto& comp = next.comp[static_cast<std::size_t>(c)];
      if (w <= 0.0) continue;  // empty component keeps its parameters
      comp.mean = s / w;
      double v = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        double r = c ? resp[i] : 1.0 - resp[i];
        v += r * (x[i] - comp.mean) * (x[i] - comp.mean);
      }
      comp.sd = std::max(std::sqrt(v / w), floor);
      comp.weight = w / static_cast<double>(n);
    }
    const double eps = std::numeric_limits<double>::min();
    for (auto& comp : next.comp) comp.weight = std::clamp(comp.weight, eps, 1.0);
    double total = next.comp[0].weight + next.comp[1].weight;
    for (auto& comp : next.comp) comp.weight /= total;

    next.log_likelihood = gmm_log_likelihood(x, next);
    ++next.iterations;
    if (next.log_likelihood < g.log_likelihood - 1e-9 * (1.0 + std::abs(g.log_likelihood))) {
      next.monotone = false;
    }
    bool done = next.log_likelihood - g.log_likelihood < opt.tolerance;
    g = next;
    if (done) break;
  }
  return g;
}

}  // namespace detail

/// Two-component 1-D Gaussian mixture by EM. Starts from a median split
/// (lower and upper half), then restarts from jittered copies of that split;
/// the best log-likelihood wins.
inline GmmFit fit_gmm2(std::span<const double> x, const GmmOptions& opt = {}) {
  const std::size_t n = x.size();
  if (n < 2) throw Error("mixture fit needs at least 2 samples");
  std::vector<double> sorted(x.begin(), x.end());
  std::sort(sorted.begin(), sorted.end());
  const double range = sorted.back() - sorted.front();
  GmmFit init;
  if (range <= 0.0) {
    init.degenerate = true;
    for (auto& c : init.comp) c = {0.5, sorted.front(), 0.0};
    return init;
  }
  const double floor = opt.sd_floor_ratio * range;
  auto moments = [&](std::size_t lo, std::size_t hi) {
    double mean = 0.0;
    for (std::size_t i = lo; i < hi; ++i) mean += sorted[i];
    mean /= static_cast<double>(hi - lo);
    double v = 0.0;
    for (std::size_t i = lo; i < hi; ++i) v += (sorted[i] - mean) * (sorted[i] - mean);
    return GaussianComponent{0.5, mean, std::max(std::sqrt(v / static_cast<double>(hi - lo)), floor)};
  };
  const std::size_t half = n / 2;
  init.comp = {moments(0, half), moments(half, n)};

  std::mt19937_64 gen(opt.seed);
  GmmFit best;
  for (std::size_t r = 0; r < std::max<std::size_t>(opt.restarts, 1); ++r) {
    GmmFit start = init;
    if (r > 0) {
      for (auto& c : start.comp) {
        c.mean += 0.1 * range * detail::signed_unit(gen);
        c.sd = std::max(c.sd * (1.0 + 0.2 * detail::signed_unit(gen)), floor);
      }
    }
    GmmFit fit = detail::run_em(x, start, opt, floor);
    if (r == 0 || fit.log_likelihood > best.log_likelihood) best = fit;
  }
  return best;
}

/// Overlapping coefficient of two normal densities: the mass of their
/// pointwise minimum. Intersections come from equating log densities; each
/// interval between them contributes the lower density's CDF mass.
inline double normal_overlap(double mean1, double sd1, double mean2, double sd2,
                             double tol = 1e-12) {
  if (!(sd1 > 0.0) || !(sd2 > 0.0)) throw Error("overlap needs positive standard deviations");
  const double scale = std::max({std::abs(mean1), std::abs(mean2), sd1, sd2});
  if (std::abs(mean1 - mean2) <= tol * scale && std::abs(sd1 - sd2) <= tol * scale) return 1.0;

  // a x^2 + b x + c = 0 where log N1(x) = log N2(x).
  const double v1 = sd1 * sd1, v2 = sd2 * sd2;
  const double a = 0.5 / v2 - 0.5 / v1;
  const double b = mean1 / v1 - mean2 / v2;
  const double c = 0.5 * mean2 * mean2 / v2 - 0.5 * mean1 * mean1 / v1 + std::log(sd2 / sd1);
  std::vector<double> roots;
  if (std::abs(a) <= 1e-14 * (0.5 / v1 + 0.5 / v2)) {
    if (b != 0.0) roots.push_back(-c / b);
  } else {
    double disc = b * b - 4.0 * a * c;
    if (disc >= 0.0) {
      double sq = std::sqrt(disc);
      double qv = -0.5 * (b + std::copysign(sq, b));
      if (qv != 0.0) {
        roots.push_back(qv / a);
        roots.push_back(c / qv);
      } else {
        roots.push_back(-b / (2.0 * a));
      }
    }
  }
  std::sort(roots.begin(), roots.end());
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> edges{-inf};
  edges.insert(edges.end(), roots.begin(), roots.end());
  edges.push_back(inf);

  double total = 0.0;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    double lo = edges[i], hi = edges[i + 1];
    if (!(hi > lo)) continue;
    double probe;
    if (std::isinf(lo) && std::isinf(hi)) probe = 0.5 * (mean1 + mean2);
    else if (std::isinf(lo)) probe = hi - 1.0 - std::abs(hi);
    else if (std::isinf(hi)) probe = lo + 1.0 + std::abs(lo);
    else probe = 0.5 * (lo + hi);
    bool first_lower = normal_log_pdf(probe, mean1, sd1) <= normal_log_pdf(probe, mean2, sd2);
    double m = first_lower ? mean1 : mean2, s = first_lower ? sd1 : sd2;
    total += normal_cdf(hi, m, s) - normal_cdf(lo, m, s);
  }
  return std::clamp(total, 0.0, 1.0);
}

inline double component_overlap(const GmmFit& g) {
  if (g.degenerate) return 1.0;
  return normal_overlap(g.comp[0].mean, g.comp[0].sd, g.comp[1].mean, g.comp[1].sd);
}

}  // namespace qpm

#endif  // QPM_GMM_HPP
