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

#ifndef QPM_TENSOR_HPP
#define QPM_TENSOR_HPP

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "qpm/matrix.hpp"

namespace qpm {

/// Per-sample spatial feature maps, laid out sample-major, then feature, then
/// row, then column.
class FeatureTensor {
 public:
  FeatureTensor() = default;
  FeatureTensor(std::size_t samples, std::size_t features, std::size_t height,
                std::size_t width, std::vector<double> data)
      : n_(samples), q_(features), h_(height), w_(width), data_(std::move(data)) {
    if (n_ == 0 || q_ == 0 || h_ == 0 || w_ == 0) {
      throw FormatError("feature tensor dimensions must all be >= 1");
    }
    if (data_.size() != n_ * q_ * h_ * w_) {
      throw FormatError("feature tensor payload size does not match dims");
    }
    for (std::size_t i = 0; i < data_.size(); ++i) {
      if (!std::isfinite(data_[i])) {
        throw FormatError("non-finite entry at flat index " + std::to_string(i));
      }
    }
  }

  std::size_t samples() const { return n_; }
  std::size_t features() const { return q_; }
  std::size_t height() const { return h_; }
  std::size_t width() const { return w_; }
  std::size_t cells() const { return h_ * w_; }

  /// The (sample, feature) map as a flat row-major h*w span.
  std::span<const double> map(std::size_t sample, std::size_t feature) const {
    return {data_.data() + (sample * q_ + feature) * cells(), cells()};
  }

  const std::vector<double>& data() const { return data_; }

  FeatureTensor scaled(double alpha) const {
    std::vector<double> out(data_);
    for (double& v : out) v *= alpha;
    return FeatureTensor(n_, q_, h_, w_, std::move(out));
  }

 private:
  std::size_t n_ = 0, q_ = 0, h_ = 0, w_ = 0;
  std::vector<double> data_;
};

/// Spatially averaged features, N samples x q features.
struct PooledFeatures {
  DenseMatrix values;

  std::size_t samples() const { return values.rows(); }
  std::size_t features() const { return values.cols(); }
  double operator()(std::size_t j, std::size_t k) const { return values(j, k); }
};

/// Class index per sample.
struct LabelVector {
  std::vector<std::uint32_t> labels;
  std::size_t n_classes = 0;

  std::size_t size() const { return labels.size(); }

  static LabelVector from(std::vector<std::uint32_t> labels,
                          std::size_t n_classes = 0) {
    std::size_t max_label = 0;
    for (auto l : labels) max_label = std::max<std::size_t>(max_label, l);
    if (n_classes == 0) n_classes = labels.empty() ? 0 : max_label + 1;
    if (!labels.empty() && max_label >= n_classes) {
      throw FormatError("label " + std::to_string(max_label) +
                        " outside [0, " + std::to_string(n_classes) + ")");
    }
    return LabelVector{std::move(labels), n_classes};
  }

  std::vector<std::size_t> class_counts() const {
    std::vector<std::size_t> counts(n_classes, 0);
    for (auto l : labels) ++counts[l];
    return counts;
  }
};

/// Per-class attribute vectors in [0, 1], one row per class.
struct AttributeMatrix {
  DenseMatrix rows;

  static AttributeMatrix from(DenseMatrix rows) {
    for (std::size_t c = 0; c < rows.rows(); ++c) {
      bool any = false;
      for (double v : rows.row(c)) {
        if (!(v >= 0.0 && v <= 1.0)) {
          throw FormatError("attribute value outside [0,1] in class " +
                            std::to_string(c));
        }
        any = any || v != 0.0;
      }
      if (!any) {
        throw FormatError("attribute row " + std::to_string(c) + " is all zero");
      }
    }
    return AttributeMatrix{std::move(rows)};
  }
};

/// Spatial mean of every map.
inline PooledFeatures pool(const FeatureTensor& t) {
  DenseMatrix out(t.samples(), t.features());
  const double inv = 1.0 / static_cast<double>(t.cells());
  for (std::size_t j = 0; j < t.samples(); ++j) {
    for (std::size_t k = 0; k < t.features(); ++k) {
      double sum = 0.0;
      for (double v : t.map(j, k)) sum += v;
      out(j, k) = sum * inv;
    }
  }
  return PooledFeatures{std::move(out)};
}

}  // namespace qpm

#endif  // QPM_TENSOR_HPP
