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

#ifndef QPM_SIMILARITY_HPP
#define QPM_SIMILARITY_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "qpm/clique.hpp"
#include "qpm/matrix.hpp"
#include "qpm/parallel.hpp"
#include "qpm/tensor.hpp"

namespace qpm {

/// Class-feature similarity, n_c x q.
struct SimilarityMatrix {
  DenseMatrix a;
  bool scaled = false;
  /// Features with zero variance; their column is all zero.
  std::vector<std::size_t> degenerate_features;

  std::size_t classes() const { return a.rows(); }
  std::size_t features() const { return a.cols(); }
};

/// Feature-feature redundancy, q x q, symmetric with a zero diagonal.
struct FeatureSimilarityMatrix {
  DenseMatrix r;
  double epsilon = 0.0;
  /// Columns of A that were all zero; treated as orthogonal to everything.
  std::vector<std::size_t> zero_columns;
  /// A set of n_select features whose pairwise redundancy is below epsilon.
  std::vector<std::size_t> clique;
};

enum class BiasKind { kNone, kLocality, kCenter };

inline const char* to_string(BiasKind k) {
  switch (k) {
    case BiasKind::kLocality:
      return "locality";
    case BiasKind::kCenter:
      return "center";
    default:
      return "none";
  }
}

inline constexpr double kDefaultLambda = 0.31622776601683794;  // 1/sqrt(10)
inline constexpr double kDefaultClipSigma = 3.0;

struct BiasVector {
  std::vector<double> b;
  /// Values before clipping, centering and scaling.
  std::vector<double> raw;
  double lambda = kDefaultLambda;
  BiasKind kind = BiasKind::kNone;
  /// Features whose summed pooled activation is zero.
  std::vector<std::size_t> degenerate_features;
};

// --- Class-feature similarity -----------------------------------------------

inline SimilarityMatrix build_class_feature_similarity(const PooledFeatures& f,
                                                       const LabelVector& l) {
  const std::size_t n = f.samples();
  const std::size_t q = f.features();
  if (l.size() != n) {
    throw Error("label count " + std::to_string(l.size()) +
                " does not match sample count " + std::to_string(n));
  }
  if (n < 2) throw Error("Pearson similarity needs at least two samples");
  const auto counts = l.class_counts();
  std::size_t present = 0;
  for (auto c : counts) present += c > 0 ? 1 : 0;
  if (present < 2) {
    throw Error("label vector contains a single class; correlation undefined");
  }
  const std::size_t nc = l.n_classes;
  SimilarityMatrix out{DenseMatrix(nc, q, 0.0), false, {}};
  std::vector<unsigned char> degenerate(q, 0);

  parallel_for(q, [&](std::size_t k) {
    double mean = 0.0, max_abs = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      mean += f(j, k);
      max_abs = std::max(max_abs, std::abs(f(j, k)));
    }
    mean /= static_cast<double>(n);
    double ss = 0.0, total_dev = 0.0;
    std::vector<double> class_dev(nc, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      double d = f(j, k) - mean;
      ss += d * d;
      total_dev += d;
      class_dev[l.labels[j]] += d;
    }
    const double tiny = 1e-13 * max_abs;
    if (ss <= static_cast<double>(n) * tiny * tiny || ss == 0.0) {
      degenerate[k] = 1;
      return;
    }
    for (std::size_t c = 0; c < nc; ++c) {
      if (counts[c] == 0 || counts[c] == n) continue;
      const double p = static_cast<double>(counts[c]) / static_cast<double>(n);
      // sum_j (f_j - mean)(l_j - p) and sum_j (l_j - p)^2 = N_c (1 - p).
      const double cross = class_dev[c] - p * total_dev;
      const double label_ss = static_cast<double>(counts[c]) * (1.0 - p);
      double corr = cross / std::sqrt(ss * label_ss);
      out.a(c, k) = std::clamp(corr, -1.0, 1.0);
    }
  });
  for (std::size_t k = 0; k < q; ++k) {
    if (degenerate[k]) out.degenerate_features.push_back(k);
  }
  return out;
}

/// Multiplies A by 1000 / (m * n_c).
inline SimilarityMatrix scale_similarity(SimilarityMatrix a, std::size_t per_class,
                                         std::size_t n_classes) {
  if (a.scaled) throw Error("similarity matrix is already scaled");
  if (per_class < 1 || n_classes < 1) {
    throw Error("scaling needs per_class >= 1 and n_classes >= 1");
  }
  const double factor =
      1000.0 / (static_cast<double>(per_class) * static_cast<double>(n_classes));
  for (double& v : a.a.data()) v *= factor;
  a.scaled = true;
  return a;
}

// --- Feature-feature similarity ---------------------------------------------

/// ReLU of the cosine similarity between columns of A; zero diagonal.
inline DenseMatrix column_cosine_relu(const DenseMatrix& a,
                                      std::vector<std::size_t>* zero_columns) {
  const std::size_t q = a.cols();
  const std::size_t nc = a.rows();
  std::vector<double> norm(q, 0.0);
  for (std::size_t k = 0; k < q; ++k) {
    double s = 0.0;
    for (std::size_t c = 0; c < nc; ++c) s += a(c, k) * a(c, k);
    norm[k] = std::sqrt(s);
    if (norm[k] == 0.0 && zero_columns) zero_columns->push_back(k);
  }
  DenseMatrix r(q, q, 0.0);
  parallel_for(q, [&](std::size_t k) {
    if (norm[k] == 0.0) return;
    for (std::size_t k2 = 0; k2 < q; ++k2) {
      if (k2 == k || norm[k2] == 0.0) continue;
      double dot = 0.0;
      for (std::size_t c = 0; c < nc; ++c) dot += a(c, k) * a(c, k2);
      r(k, k2) = std::max(0.0, dot / (norm[k] * norm[k2]));
    }
  });
  // Pairwise products are evaluated in the same order from both sides, but
  // enforce exact symmetry anyway.
  for (std::size_t k = 0; k < q; ++k) {
    for (std::size_t k2 = k + 1; k2 < q; ++k2) r(k2, k) = r(k, k2);
  }
  return r;
}

/// Graph with an edge wherever redundancy is at most `threshold`.
inline BitGraph low_similarity_graph(const DenseMatrix& r, double threshold) {
  BitGraph g(r.rows());
  for (std::size_t k = 0; k < r.rows(); ++k) {
    for (std::size_t k2 = k + 1; k2 < r.cols(); ++k2) {
      if (r(k, k2) <= threshold) g.add_edge(k, k2);
    }
  }
  return g;
}

inline constexpr std::size_t kExhaustiveCliqueLimit = 20;

/// Finds `size` features with pairwise redundancy <= threshold, or returns
/// empty. Greedy first; exhaustive fallback on small graphs.
inline std::vector<std::size_t> find_low_similarity_clique(const DenseMatrix& r,
                                                           double threshold,
                                                           std::size_t size) {
  BitGraph g = low_similarity_graph(r, threshold);
  auto clique = greedy_clique(g, size);
  if (clique.size() >= size) {
    clique.resize(size);
    return clique;
  }
  if (r.rows() <= kExhaustiveCliqueLimit) return exhaustive_clique(g, size);
  return {};
}

/// Builds R from A, zeroes every entry below epsilon and rescales the rest to
/// a maximum of 1. Epsilon is the smallest clipping level under which n_select
/// mutually non-redundant features exist; it is reported as the next distinct
/// value of R above the clipped ones (the largest threshold giving the same
/// clipping).
inline FeatureSimilarityMatrix build_feature_similarity(const SimilarityMatrix& a,
                                                        std::size_t n_select) {
  const std::size_t q = a.features();
  if (n_select == 0) throw Error("n_select must be at least 1");
  if (n_select > q) {
    throw Error("n_select " + std::to_string(n_select) + " exceeds q " +
                std::to_string(q));
  }
  FeatureSimilarityMatrix out;
  out.r = column_cosine_relu(a.a, &out.zero_columns);

  std::vector<double> levels;
  levels.reserve(q * (q - 1) / 2 + 1);
  levels.push_back(0.0);
  for (std::size_t k = 0; k < q; ++k) {
    for (std::size_t k2 = k + 1; k2 < q; ++k2) levels.push_back(out.r(k, k2));
  }
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());

  // Smallest level index whose graph holds the clique. The top level always
  // does: every pair is an edge there.
  std::size_t lo = 0, hi = levels.size() - 1;
  std::vector<std::size_t> clique =
      find_low_similarity_clique(out.r, levels[hi], n_select);
  while (lo < hi) {
    std::size_t mid = lo + (hi - lo) / 2;
    auto found = find_low_similarity_clique(out.r, levels[mid], n_select);
    if (!found.empty()) {
      hi = mid;
      clique = std::move(found);
    } else {
      lo = mid + 1;
    }
  }
  out.clique = std::move(clique);
  const double clipped_level = levels[lo];
  out.epsilon = lo + 1 < levels.size()
                    ? levels[lo + 1]
                    : std::nextafter(clipped_level,
                                     std::numeric_limits<double>::infinity());

  double max_kept = 0.0;
  for (double& v : out.r.data()) {
    if (v < out.epsilon) v = 0.0;
    max_kept = std::max(max_kept, v);
  }
  if (max_kept > 0.0) {
    for (double& v : out.r.data()) v /= max_kept;
  }
  return out;
}

/// A feature similarity matrix of zeros, used when the redundancy term is off.
inline FeatureSimilarityMatrix zero_feature_similarity(std::size_t q) {
  FeatureSimilarityMatrix out;
  out.r = DenseMatrix(q, q, 0.0);
  out.epsilon = std::numeric_limits<double>::denorm_min();
  return out;
}

// --- Bias ---------------------------------------------------------------

/// Clips entries outside mean +- sigma * stddev (population) to the boundary.
inline std::vector<double> clip_outliers(std::span<const double> raw,
                                         double sigma) {
  std::vector<double> out(raw.begin(), raw.end());
  if (out.empty() || !std::isfinite(sigma)) return out;
  double mean = 0.0;
  for (double v : out) mean += v;
  mean /= static_cast<double>(out.size());
  double var = 0.0;
  for (double v : out) var += (v - mean) * (v - mean);
  const double sd = std::sqrt(var / static_cast<double>(out.size()));
  const double lo = mean - sigma * sd, hi = mean + sigma * sd;
  for (double& v : out) v = std::clamp(v, lo, hi);
  return out;
}

/// Clips outliers, centers, and scales so that max |b| = lambda. A constant
/// vector maps to zero.
inline std::vector<double> normalize_bias(std::span<const double> raw, double lambda,
                                          double clip_sigma = kDefaultClipSigma) {
  if (lambda < 0) throw Error("lambda must be non-negative");
  std::vector<double> b = clip_outliers(raw, clip_sigma);
  if (b.empty()) return b;
  double mean = 0.0;
  for (double v : b) mean += v;
  mean /= static_cast<double>(b.size());
  double max_abs = 0.0;
  for (double& v : b) {
    v -= mean;
    max_abs = std::max(max_abs, std::abs(v));
  }
  auto [mn, mx] = std::minmax_element(raw.begin(), raw.end());
  const double scale = std::max({std::abs(*mn), std::abs(*mx), 1e-300});
  if (max_abs <= 1e-14 * scale) {
    std::fill(b.begin(), b.end(), 0.0);
    return b;
  }
  for (double& v : b) v *= lambda / max_abs;
  return b;
}

namespace detail {

inline double sum_of(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s;
}

// Shared driver for the map-based biases: raw_k = (1 / (N sum_j f_jk))
// sum_j term(map_jk) f_jk.
template <typename Term>
BiasVector map_weighted_bias(const FeatureTensor& t, double lambda, BiasKind kind,
                             double clip_sigma, Term term) {
  const std::size_t n = t.samples(), q = t.features();
  const double inv_cells = 1.0 / static_cast<double>(t.cells());
  BiasVector out;
  out.kind = kind;
  out.lambda = lambda;
  out.raw.assign(q, 0.0);
  std::vector<unsigned char> degenerate(q, 0);
  parallel_for(q, [&](std::size_t k) {
    double pooled_sum = 0.0, pooled_abs = 0.0, acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      auto m = t.map(j, k);
      const double f = sum_of(m) * inv_cells;
      pooled_sum += f;
      pooled_abs += std::abs(f);
      acc += term(m) * f;
    }
    if (pooled_abs == 0.0 || std::abs(pooled_sum) <= 1e-12 * pooled_abs) {
      degenerate[k] = 1;
      return;
    }
    out.raw[k] = acc / (static_cast<double>(n) * pooled_sum);
  });
  for (std::size_t k = 0; k < q; ++k) {
    if (degenerate[k]) out.degenerate_features.push_back(k);
  }
  out.b = normalize_bias(out.raw, lambda, clip_sigma);
  return out;
}

}  // namespace detail

/// Largest entry of the spatial softmax of a map.
inline double softmax_max(std::span<const double> map) {
  const double peak = *std::max_element(map.begin(), map.end());
  double z = 0.0;
  for (double v : map) z += std::exp(v - peak);
  return 1.0 / z;
}

/// Distance from the argmax cell (1-indexed x column, y row) to the nearest
/// edge: min(|x - w|, x - 1, |y - h|, y - 1).
inline double edge_distance(std::span<const double> map, std::size_t height,
                            std::size_t width) {
  std::size_t arg = static_cast<std::size_t>(
      std::max_element(map.begin(), map.end()) - map.begin());
  const double y = static_cast<double>(arg / width + 1);
  const double x = static_cast<double>(arg % width + 1);
  const double w = static_cast<double>(width), h = static_cast<double>(height);
  return std::min({std::abs(x - w), x - 1.0, std::abs(y - h), y - 1.0});
}

/// Prefers features whose maps concentrate on few cells when active.
inline BiasVector build_locality_bias(const FeatureTensor& t,
                                      double lambda = kDefaultLambda,
                                      double clip_sigma = kDefaultClipSigma) {
  return detail::map_weighted_bias(t, lambda, BiasKind::kLocality, clip_sigma,
                                   [](std::span<const double> m) {
                                     return softmax_max(m);
                                   });
}

/// Prefers features whose peaks sit away from the image border.
inline BiasVector build_center_bias(const FeatureTensor& t,
                                    double lambda = kDefaultLambda,
                                    double clip_sigma = kDefaultClipSigma) {
  const std::size_t h = t.height(), w = t.width();
  return detail::map_weighted_bias(t, lambda, BiasKind::kCenter, clip_sigma,
                                   [h, w](std::span<const double> m) {
                                     return -1.0 / (1.0 + edge_distance(m, h, w));
                                   });
}

inline BiasVector zero_bias(std::size_t q) {
  BiasVector out;
  out.kind = BiasKind::kNone;
  out.b.assign(q, 0.0);
  out.raw.assign(q, 0.0);
  return out;
}

}  // namespace qpm

#endif  // QPM_SIMILARITY_HPP
