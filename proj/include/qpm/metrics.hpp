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

#ifndef QPM_METRICS_HPP
#define QPM_METRICS_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <iomanip>
#include <limits>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "qpm/gmm.hpp"
#include "qpm/matrix.hpp"
#include "qpm/parallel.hpp"
#include "qpm/problem.hpp"
#include "qpm/tensor.hpp"

namespace qpm {

/// A scalar with its per-feature (or per-class) breakdown.
struct MetricValue {
  double value = 0.0;
  std::vector<std::size_t> index;   // feature or class index per entry
  std::vector<double> breakdown;
  std::vector<std::size_t> flagged; // degenerate entries
};

namespace detail {

inline std::vector<std::size_t> selected_or_throw(const BinaryVector& select, std::size_t q,
                                                  std::size_t minimum) {
  if (select.size() != q) throw Error("selection length does not match feature count");
  std::vector<std::size_t> sel;
  for (std::size_t k = 0; k < q; ++k) {
    if (select[k]) sel.push_back(k);
  }
  if (sel.size() < minimum) {
    throw Error("metric needs at least " + std::to_string(minimum) + " selected features");
  }
  return sel;
}

inline double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

}  // namespace detail

// --- Contrastiveness ---------------------------------------------------------

/// Mean of 1 - OVL of the two fitted mixture components (unweighted) over
/// the selected features. Constant features score 0 and are flagged.
inline MetricValue contrastiveness(const PooledFeatures& f, const BinaryVector& select,
                                   const GmmOptions& opt = {}) {
  if (f.samples() < 4) throw Error("contrastiveness needs at least 4 samples");
  auto sel = detail::selected_or_throw(select, f.features(), 1);
  MetricValue out;
  out.index = sel;
  out.breakdown.assign(sel.size(), 0.0);
  std::vector<unsigned char> degenerate(sel.size(), 0);
  parallel_for(sel.size(), [&](std::size_t i) {
    std::vector<double> col(f.samples());
    for (std::size_t j = 0; j < f.samples(); ++j) col[j] = f(j, sel[i]);
    GmmFit g = fit_gmm2(col, opt);
    degenerate[i] = g.degenerate;
    out.breakdown[i] = g.degenerate ? 0.0 : 1.0 - component_overlap(g);
  });
  for (std::size_t i = 0; i < sel.size(); ++i) {
    if (degenerate[i]) out.flagged.push_back(sel[i]);
  }
  out.value = detail::mean_of(out.breakdown);
  return out;
}

// --- Class independence ------------------------------------------------------

/// One minus the mean, over selected features, of the largest class share of
/// zero-based activation mass. A constant feature contributes the largest
/// class frequency and is flagged.
inline MetricValue class_independence(const PooledFeatures& f, const LabelVector& l,
                                      const BinaryVector& select) {
  if (l.size() != f.samples()) throw Error("label count does not match sample count");
  auto sel = detail::selected_or_throw(select, f.features(), 1);
  const std::size_t n = f.samples(), nc = l.n_classes;
  auto counts = l.class_counts();
  const double neutral = static_cast<double>(*std::max_element(counts.begin(), counts.end())) /
                         static_cast<double>(n);
  MetricValue out;
  out.index = sel;
  out.breakdown.assign(sel.size(), 0.0);
  std::vector<unsigned char> flat(sel.size(), 0);
  parallel_for(sel.size(), [&](std::size_t i) {
    const std::size_t k = sel[i];
    double lo = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n; ++j) lo = std::min(lo, f(j, k));
    std::vector<double> mass(nc, 0.0);
    double total = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      double v = f(j, k) - lo;
      mass[l.labels[j]] += v;
      total += v;
    }
    if (total <= 0.0) {
      flat[i] = 1;
      out.breakdown[i] = neutral;
      return;
    }
    out.breakdown[i] = *std::max_element(mass.begin(), mass.end()) / total;
  });
  for (std::size_t i = 0; i < sel.size(); ++i) {
    if (flat[i]) out.flagged.push_back(sel[i]);
  }
  out.value = 1.0 - detail::mean_of(out.breakdown);
  return out;
}

// --- Spatial diversity -------------------------------------------------------

namespace detail {

inline void softmax_into(std::span<const double> map, double divisor, std::span<double> out) {
  double hi = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < map.size(); ++i) {
    out[i] = divisor > 0.0 ? map[i] / divisor : 0.0;
    hi = std::max(hi, out[i]);
  }
  double s = 0.0;
  for (double& v : out) {
    v = std::exp(v - hi);
    s += v;
  }
  for (double& v : out) v /= s;
}

// Softmax of every listed feature's map for one sample; `scale_invariant`
// divides each map by its mean absolute value first.
inline std::vector<double> sample_softmaxes(const FeatureTensor& t, std::size_t sample,
                                            std::span<const std::size_t> features,
                                            bool scale_invariant) {
  const std::size_t cells = t.cells();
  std::vector<double> out(features.size() * cells);
  for (std::size_t i = 0; i < features.size(); ++i) {
    auto map = t.map(sample, features[i]);
    double divisor = 1.0;
    if (scale_invariant) {
      double abs_sum = 0.0;
      for (double v : map) abs_sum += std::abs(v);
      divisor = abs_sum / static_cast<double>(cells);
    }
    softmax_into(map, divisor, std::span<double>(out).subspan(i * cells, cells));
  }
  return out;
}

inline double max_pool_sum(std::span<const double> soft, std::size_t cells,
                           std::span<const std::size_t> rows) {
  double s = 0.0;
  for (std::size_t cell = 0; cell < cells; ++cell) {
    double hi = 0.0;
    for (auto r : rows) hi = std::max(hi, soft[r * cells + cell]);
    s += hi;
  }
  return s;
}

inline double diversity(const FeatureTensor& t, std::span<const std::size_t> features,
                        bool scale_invariant) {
  if (features.empty()) throw Error("diversity needs at least one feature");
  for (auto k : features) {
    if (k >= t.features()) throw Error("feature index out of range");
  }
  std::vector<std::size_t> rows(features.size());
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
  std::vector<double> per_sample(t.samples());
  parallel_for(t.samples(), [&](std::size_t j) {
    auto soft = sample_softmaxes(t, j, features, scale_invariant);
    per_sample[j] = max_pool_sum(soft, t.cells(), rows) / static_cast<double>(features.size());
  });
  return mean_of(per_sample);
}

inline MetricValue diversity_over_classes(const FeatureTensor& t,
                                          const std::vector<std::vector<std::size_t>>& sets,
                                          bool scale_invariant) {
  // Softmax each distinct feature once per sample, then pool per class.
  std::vector<std::size_t> used;
  for (auto& s : sets) used.insert(used.end(), s.begin(), s.end());
  std::sort(used.begin(), used.end());
  used.erase(std::unique(used.begin(), used.end()), used.end());
  for (auto k : used) {
    if (k >= t.features()) throw Error("feature index out of range");
  }
  std::vector<std::vector<std::size_t>> rows(sets.size());
  for (std::size_t c = 0; c < sets.size(); ++c) {
    if (sets[c].empty()) throw Error("diversity needs at least one feature per class");
    for (auto k : sets[c]) {
      rows[c].push_back(static_cast<std::size_t>(
          std::lower_bound(used.begin(), used.end(), k) - used.begin()));
    }
  }
  DenseMatrix values(t.samples(), sets.size(), 0.0);
  parallel_for(t.samples(), [&](std::size_t j) {
    auto soft = sample_softmaxes(t, j, used, scale_invariant);
    for (std::size_t c = 0; c < sets.size(); ++c) {
      values(j, c) = max_pool_sum(soft, t.cells(), rows[c]) / static_cast<double>(sets[c].size());
    }
  });
  MetricValue out;
  out.breakdown.assign(sets.size(), 0.0);
  double total = 0.0;
  for (std::size_t c = 0; c < sets.size(); ++c) {
    out.index.push_back(c);
    double s = 0.0;
    for (std::size_t j = 0; j < t.samples(); ++j) s += values(j, c);
    out.breakdown[c] = s / static_cast<double>(t.samples());
    total += s;
  }
  out.value = total / static_cast<double>(t.samples() * sets.size());
  return out;
}

}  // namespace detail

/// Scale-invariant spatial diversity of a feature group, averaged over
/// samples: maps are divided by their mean absolute value before the softmax.
inline double sid5(const FeatureTensor& t, std::span<const std::size_t> features) {
  return detail::diversity(t, features, true);
}

/// Mean over all (sample, class) pairs; breakdown per class.
inline MetricValue sid5(const FeatureTensor& t,
                        const std::vector<std::vector<std::size_t>>& class_sets) {
  return detail::diversity_over_classes(t, class_sets, true);
}

/// The older variant: softmax on the raw maps, so it depends on map scale.
inline double legacy_diversity5(const FeatureTensor& t, std::span<const std::size_t> features) {
  return detail::diversity(t, features, false);
}

inline MetricValue legacy_diversity5(const FeatureTensor& t,
                                     const std::vector<std::vector<std::size_t>>& class_sets) {
  return detail::diversity_over_classes(t, class_sets, false);
}

// --- Structural grounding ----------------------------------------------------

inline double cosine(std::span<const double> x, std::span<const double> y) {
  double xy = 0.0, xx = 0.0, yy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    xy += x[i] * y[i];
    xx += x[i] * x[i];
    yy += y[i] * y[i];
  }
  if (xx == 0.0 || yy == 0.0) return 0.0;
  return xy / std::sqrt(xx * yy);
}

struct GroundingResult {
  double value = 0.0;
  std::vector<std::pair<std::size_t, std::size_t>> pairs;  // top pairs, best first
  std::vector<std::pair<std::size_t, std::size_t>> skipped;  // zero model row
};

inline constexpr std::size_t kDefaultTopPairs = 25;

/// Ratio of summed model cosine similarity to summed ground-truth cosine
/// similarity over the class pairs most similar under the ground truth.
inline GroundingResult structural_grounding(const DenseMatrix& model_rows,
                                            const AttributeMatrix& gt,
                                            std::size_t top_pairs = kDefaultTopPairs) {
  const std::size_t nc = model_rows.rows();
  if (gt.rows.rows() != nc) throw Error("attribute rows do not match class count");
  if (top_pairs == 0 || top_pairs > nc * (nc - 1) / 2) {
    throw Error("top pair count must be in [1, n_classes*(n_classes-1)/2]");
  }
  struct Pair {
    double psi;
    std::size_t c, c2;
  };
  std::vector<Pair> pairs;
  for (std::size_t c = 0; c < nc; ++c) {
    for (std::size_t c2 = c + 1; c2 < nc; ++c2) {
      pairs.push_back({cosine(gt.rows.row(c), gt.rows.row(c2)), c, c2});
    }
  }
  std::stable_sort(pairs.begin(), pairs.end(),
                   [](const Pair& x, const Pair& y) { return x.psi > y.psi; });
  auto zero_row = [&](std::size_t c) {
    for (double v : model_rows.row(c)) {
      if (v != 0.0) return false;
    }
    return true;
  };
  GroundingResult out;
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < top_pairs; ++i) {
    const auto& p = pairs[i];
    if (zero_row(p.c) || zero_row(p.c2)) {
      out.skipped.emplace_back(p.c, p.c2);
      continue;
    }
    out.pairs.emplace_back(p.c, p.c2);
    num += cosine(model_rows.row(p.c), model_rows.row(p.c2));
    den += p.psi;
  }
  if (den == 0.0) throw Error("ground-truth similarity of the chosen pairs sums to zero");
  out.value = num / den;
  return out;
}

/// Binary class vectors of a solution restricted to its selected features.
inline DenseMatrix binary_rows(const Solution& sol) {
  std::vector<std::size_t> sel = sol.selected();
  DenseMatrix rows(sol.assign.rows(), sel.size(), 0.0);
  for (std::size_t c = 0; c < sol.assign.rows(); ++c) {
    for (std::size_t i = 0; i < sel.size(); ++i) rows(c, i) = sol.assign(c, sel[i]);
  }
  return rows;
}

inline double max_pairwise_cosine(const DenseMatrix& rows) {
  double hi = -1.0;
  for (std::size_t c = 0; c < rows.rows(); ++c) {
    for (std::size_t c2 = c + 1; c2 < rows.rows(); ++c2) {
      hi = std::max(hi, cosine(rows.row(c), rows.row(c2)));
    }
  }
  return hi;
}

/// Largest cosine between two distinct binary rows with per_class ones each.
inline double binary_cosine_cap(std::size_t per_class) {
  return static_cast<double>(per_class - 1) / static_cast<double>(per_class);
}

// --- Correlation -------------------------------------------------------------

/// Mean over selected features of the highest cosine to another selected
/// feature column. Zero columns have cosine 0 and are flagged.
inline MetricValue correlation_metric(const PooledFeatures& f, const BinaryVector& select) {
  auto sel = detail::selected_or_throw(select, f.features(), 2);
  const std::size_t n = f.samples(), s = sel.size();
  DenseMatrix cols(s, n, 0.0);
  for (std::size_t i = 0; i < s; ++i) {
    for (std::size_t j = 0; j < n; ++j) cols(i, j) = f(j, sel[i]);
  }
  MetricValue out;
  out.index = sel;
  out.breakdown.assign(s, 0.0);
  parallel_for(s, [&](std::size_t i) {
    double hi = -std::numeric_limits<double>::infinity();
    for (std::size_t i2 = 0; i2 < s; ++i2) {
      if (i2 != i) hi = std::max(hi, cosine(cols.row(i), cols.row(i2)));
    }
    out.breakdown[i] = hi;
  });
  for (std::size_t i = 0; i < s; ++i) {
    bool zero = std::all_of(cols.row(i).begin(), cols.row(i).end(),
                            [](double v) { return v == 0.0; });
    if (zero) out.flagged.push_back(sel[i]);
  }
  out.value = detail::mean_of(out.breakdown);
  return out;
}

// --- Feature diversity loss --------------------------------------------------

struct DiversityLoss {
  double value = 0.0;
  bool degenerate = false;  // max pooled value or weight norm is zero
};

/// Negative sum over cells of the cross-feature maximum of softmaxed maps,
/// each scaled by its pooled value relative to the largest one and by its
/// share of the class weight norm.
inline DiversityLoss feature_diversity_loss(const FeatureTensor& t, std::size_t sample,
                                            std::span<const double> weights,
                                            std::span<const double> pooled) {
  const std::size_t q = t.features(), cells = t.cells();
  if (sample >= t.samples()) throw Error("sample index out of range");
  if (weights.size() != q || pooled.size() != q) {
    throw Error("weight and pooled rows must have one entry per feature");
  }
  double top = -std::numeric_limits<double>::infinity(), norm = 0.0;
  for (std::size_t k = 0; k < q; ++k) {
    top = std::max(top, pooled[k]);
    norm += weights[k] * weights[k];
  }
  norm = std::sqrt(norm);
  if (!(top > 0.0) || norm == 0.0) return {0.0, true};
  std::vector<double> best(cells, 0.0), soft(cells);
  for (std::size_t k = 0; k < q; ++k) {
    double scale = (pooled[k] / top) * (std::abs(weights[k]) / norm);
    detail::softmax_into(t.map(sample, k), 1.0, soft);
    for (std::size_t i = 0; i < cells; ++i) best[i] = std::max(best[i], soft[i] * scale);
  }
  double s = 0.0;
  for (double v : best) s += v;
  return {-s, false};
}

inline double total_loss(double cross_entropy, double gamma, double diversity_loss) {
  return cross_entropy + gamma * diversity_loss;
}

/// Mean diversity loss of a solution's layer over all samples. Each sample
/// uses the class row with the highest output (lowest class on ties) and
/// only the selected features' maps.
inline MetricValue solution_diversity_loss(const FeatureTensor& t, const Solution& sol) {
  const std::size_t n = t.samples(), q = t.features();
  if (sol.select.size() != q) throw Error("solution does not match feature count");
  auto sel = sol.selected();
  std::vector<double> per_sample(n, 0.0);
  std::vector<unsigned char> degenerate(n, 0);
  parallel_for(n, [&](std::size_t j) {
    std::vector<double> pooled(q, 0.0), weights(q, 0.0);
    for (auto k : sel) {
      double s = 0.0;
      for (double v : t.map(j, k)) s += v;
      pooled[k] = s / static_cast<double>(t.cells());
    }
    std::size_t predicted = 0;
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < sol.assign.rows(); ++c) {
      double out = 0.0;
      for (auto k : sel) out += sol.assign(c, k) * pooled[k];
      if (out > best) {
        best = out;
        predicted = c;
      }
    }
    for (auto k : sel) weights[k] = sol.assign(predicted, k);
    auto loss = feature_diversity_loss(t, j, weights, pooled);
    per_sample[j] = loss.value;
    degenerate[j] = loss.degenerate;
  });
  MetricValue out;
  for (std::size_t j = 0; j < n; ++j) {
    if (degenerate[j]) out.flagged.push_back(j);
  }
  out.value = detail::mean_of(per_sample);
  return out;
}

// --- Feature alignment -------------------------------------------------------

/// Difference of mean activation of one feature between samples with and
/// without an attribute (within `restriction`), scaled by the inverse mean
/// zero-based activation over all samples.
inline double feature_alignment(const PooledFeatures& f, const BinaryVector& presence,
                                std::size_t feature, const BinaryVector& restriction) {
  const std::size_t n = f.samples();
  if (presence.size() != n || restriction.size() != n) {
    throw Error("presence and restriction must have one entry per sample");
  }
  if (feature >= f.features()) throw Error("feature index out of range");
  double on = 0.0, off = 0.0, lo = std::numeric_limits<double>::infinity(), sum = 0.0;
  std::size_t n_on = 0, n_off = 0;
  for (std::size_t j = 0; j < n; ++j) {
    double v = f(j, feature);
    lo = std::min(lo, v);
    sum += v;
    if (!restriction[j]) continue;
    if (presence[j]) {
      on += v;
      ++n_on;
    } else {
      off += v;
      ++n_off;
    }
  }
  if (n_on == 0 || n_off == 0) throw Error("attribute split has an empty side");
  double zero_based = sum - static_cast<double>(n) * lo;
  if (zero_based <= 0.0) throw Error("constant feature has no zero-based activation");
  double diff = on / static_cast<double>(n_on) - off / static_cast<double>(n_off);
  return static_cast<double>(n) / zero_based * diff;
}

// --- Class contrast ----------------------------------------------------------

struct ClassContrast {
  std::vector<std::size_t> shared;
  std::vector<std::size_t> only_first;
  std::vector<std::size_t> only_second;
};

inline ClassContrast contrast_classes(const Solution& sol, std::size_t c, std::size_t c2) {
  if (c >= sol.assign.rows() || c2 >= sol.assign.rows()) throw Error("class out of range");
  ClassContrast out;
  for (std::size_t k = 0; k < sol.assign.cols(); ++k) {
    if (!sol.select[k]) continue;
    bool x = sol.assign(c, k), y = sol.assign(c2, k);
    if (x && y) out.shared.push_back(k);
    else if (x) out.only_first.push_back(k);
    else if (y) out.only_second.push_back(k);
  }
  return out;
}

// --- Report ------------------------------------------------------------------

struct MetricsReport {
  std::optional<MetricValue> contrastiveness;
  std::optional<MetricValue> class_independence;
  std::optional<MetricValue> sid5;
  std::optional<MetricValue> legacy_diversity5;
  std::optional<GroundingResult> structural_grounding;
  std::optional<MetricValue> correlation;
  std::optional<MetricValue> feature_diversity_loss;

  struct Row {
    std::string metric;
    std::string scope;
    double value;
  };

  std::vector<Row> rows() const {
    std::vector<Row> out;
    auto add = [&](const char* name, const std::optional<MetricValue>& m, const char* unit) {
      if (!m) return;
      out.push_back({name, "mean", m->value});
      for (std::size_t i = 0; i < m->breakdown.size(); ++i) {
        out.push_back({name, std::string(unit) + std::to_string(m->index[i]), m->breakdown[i]});
      }
    };
    add("contrastiveness", contrastiveness, "feature_");
    add("class_independence", class_independence, "feature_");
    add("sid5", sid5, "class_");
    add("legacy_diversity5", legacy_diversity5, "class_");
    if (structural_grounding) out.push_back({"structural_grounding", "mean", structural_grounding->value});
    add("correlation", correlation, "feature_");
    add("feature_diversity_loss", feature_diversity_loss, "feature_");
    return out;
  }

  std::string csv() const {
    std::ostringstream s;
    s << std::setprecision(17);
    for (const auto& r : rows()) s << r.metric << ',' << r.scope << ',' << r.value << '\n';
    return s.str();
  }

  std::string table() const {
    std::ostringstream s;
    s << std::left << std::setw(24) << "metric" << std::right << std::setw(10) << "value" << '\n';
    auto line = [&](const char* name, double v) {
      s << std::left << std::setw(24) << name << std::right << std::setw(9) << std::fixed
        << std::setprecision(1) << v * 100.0 << "%\n";
    };
    if (contrastiveness) line("Contrastiveness", contrastiveness->value);
    if (class_independence) line("Class-Independence", class_independence->value);
    if (sid5) line("SID@5", sid5->value);
    if (legacy_diversity5) line("Diversity@5 (legacy)", legacy_diversity5->value);
    if (structural_grounding) line("Structural Grounding", structural_grounding->value);
    if (correlation) line("Correlation", correlation->value);
    if (feature_diversity_loss) {
      s << std::left << std::setw(24) << "L_div" << std::right << std::setw(10) << std::fixed
        << std::setprecision(4) << feature_diversity_loss->value << '\n';
    }
    return s.str();
  }
};

/// Parses the flat CSV written by MetricsReport::csv into (metric -> mean).
inline std::vector<std::pair<std::string, double>> parse_report_means(const std::string& text) {
  std::vector<std::pair<std::string, double>> out;
  std::istringstream in(text);
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto a = line.find(',');
    auto b = a == std::string::npos ? a : line.find(',', a + 1);
    if (b == std::string::npos || line.find(',', b + 1) != std::string::npos) {
      throw FormatError("malformed report line " + std::to_string(number));
    }
    std::string value = line.substr(b + 1);
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(value, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != value.size()) {
      throw FormatError("malformed value on report line " + std::to_string(number));
    }
    if (line.substr(a + 1, b - a - 1) == "mean") out.emplace_back(line.substr(0, a), v);
  }
  if (out.empty()) throw FormatError("report holds no metric means");
  return out;
}

}  // namespace qpm

#endif  // QPM_METRICS_HPP
