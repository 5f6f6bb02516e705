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

#ifndef QPM_REPORT_HPP
#define QPM_REPORT_HPP

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "qpm/matrix.hpp"

namespace qpm {

struct Series {
  std::string label;
  std::vector<std::pair<std::string, double>> values;  // metric -> fraction
};

namespace detail {

inline std::string fixed(double v, int digits = 2) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

inline std::string xml_escape(const std::string& s) {
  std::string out;
  for (char ch : s) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += ch;
    }
  }
  return out;
}

}  // namespace detail

/// Radar chart with one axis per metric (first-seen order) and one polygon
/// per series. Values are clamped to [0, 1]; missing values sit at 0.
inline std::string radar_svg(const std::vector<Series>& series) {
  if (series.empty()) throw Error("radar chart needs at least one series");
  std::vector<std::string> axes;
  for (const auto& s : series) {
    for (const auto& [name, v] : s.values) {
      if (std::find(axes.begin(), axes.end(), name) == axes.end()) axes.push_back(name);
    }
  }
  if (axes.size() < 3) {
    // A polygon needs three corners; pad with empty axes.
    while (axes.size() < 3) axes.push_back("");
  }
  const double size = 480, cx = size / 2, cy = size / 2, radius = 170;
  static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
                                  "#8c564b", "#e377c2", "#7f7f7f"};
  auto point = [&](std::size_t axis, double frac) {
    double angle = -std::numbers::pi / 2 + 2 * std::numbers::pi * static_cast<double>(axis) /
                                               static_cast<double>(axes.size());
    return std::pair{cx + radius * frac * std::cos(angle), cy + radius * frac * std::sin(angle)};
  };
  using detail::fixed;
  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size << "\" height=\"" << size
      << "\" viewBox=\"0 0 " << size << ' ' << size << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (double ring : {0.25, 0.5, 0.75, 1.0}) {
    svg << "<polygon fill=\"none\" stroke=\"#cccccc\" points=\"";
    for (std::size_t a = 0; a < axes.size(); ++a) {
      auto [x, y] = point(a, ring);
      svg << fixed(x) << ',' << fixed(y) << ' ';
    }
    svg << "\"/>\n";
  }
  for (std::size_t a = 0; a < axes.size(); ++a) {
    auto [x, y] = point(a, 1.0);
    auto [lx, ly] = point(a, 1.12);
    svg << "<line x1=\"" << fixed(cx) << "\" y1=\"" << fixed(cy) << "\" x2=\"" << fixed(x)
        << "\" y2=\"" << fixed(y) << "\" stroke=\"#999999\"/>\n";
    svg << "<text x=\"" << fixed(lx) << "\" y=\"" << fixed(ly)
        << "\" font-size=\"12\" text-anchor=\"middle\">" << detail::xml_escape(axes[a])
        << "</text>\n";
  }
  for (std::size_t i = 0; i < series.size(); ++i) {
    const char* color = palette[i % std::size(palette)];
    svg << "<polygon class=\"series\" fill=\"" << color << "\" fill-opacity=\"0.2\" stroke=\""
        << color << "\" points=\"";
    for (std::size_t a = 0; a < axes.size(); ++a) {
      double v = 0.0;
      for (const auto& [name, value] : series[i].values) {
        if (name == axes[a]) v = value;
      }
      auto [x, y] = point(a, std::clamp(v, 0.0, 1.0));
      svg << fixed(x) << ',' << fixed(y) << ' ';
    }
    svg << "\"/>\n";
    svg << "<text x=\"10\" y=\"" << 20 + 16 * i << "\" font-size=\"12\" fill=\"" << color
        << "\">" << detail::xml_escape(series[i].label) << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

struct SweepPoint {
  std::size_t n_select = 0;
  std::size_t per_class = 0;
  double objective = 0.0;
  double gap = 0.0;
  std::string status;
};

inline std::string sweep_csv(const std::vector<SweepPoint>& points) {
  std::ostringstream out;
  out << "n_select,per_class,objective,gap,status\n";
  char buf[64];
  for (const auto& p : points) {
    std::snprintf(buf, sizeof buf, "%.17g", p.objective);
    out << p.n_select << ',' << p.per_class << ',' << buf << ',';
    std::snprintf(buf, sizeof buf, "%.17g", p.gap);
    out << buf << ',' << p.status << '\n';
  }
  return out.str();
}

}  // namespace qpm

#endif  // QPM_REPORT_HPP
