// Copyright 2026 The NSM Authors.
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
#include "nsm/transform.hpp"

#include <cmath>

#include "nsm/error.hpp"
#include "nsm/log.hpp"

namespace nsm {

std::string to_string(Transformation t) {
  switch (t) {
    case Transformation::kNone: return "none";
    case Transformation::kCenterRows: return "center-rows";
    case Transformation::kCenterCols: return "center-cols";
    case Transformation::kNormalizeRows: return "normalize-rows";
    case Transformation::kNormalizeCols: return "normalize-cols";
  }
  return "none";
}

Transformation parse_transformation(const std::string& name) {
  for (auto t : kAllTransformations)
    if (to_string(t) == name) return t;
  throw DomainError("unknown transformation '" + name + "'");
}

double TransformResult::invert(std::size_t u, std::size_t v, double value) const {
  switch (kind) {
    case Transformation::kNone: return value;
    case Transformation::kCenterRows:
    case Transformation::kNormalizeRows: return value * scales[u] + offsets[u];
    case Transformation::kCenterCols:
    case Transformation::kNormalizeCols: return value * scales[v] + offsets[v];
  }
  return value;
}

TransformResult apply_transformation(const RatingsMatrix& m, Transformation t) {
  TransformResult result{t, m, {}, {}};
  if (t == Transformation::kNone) return result;

  const bool by_row = t == Transformation::kCenterRows || t == Transformation::kNormalizeRows;
  const bool normalize = t == Transformation::kNormalizeRows || t == Transformation::kNormalizeCols;
  const std::size_t lines = by_row ? m.rows() : m.cols();
  const std::size_t length = by_row ? m.cols() : m.rows();
  auto at = [&](std::size_t line, std::size_t k) {
    return by_row ? std::pair{line, k} : std::pair{k, line};
  };

  result.offsets.assign(lines, 0.0);
  result.scales.assign(lines, 1.0);
  for (std::size_t line = 0; line < lines; ++line) {
    double sum = 0.0;
    std::size_t n = 0;
    for (std::size_t k = 0; k < length; ++k) {
      auto [u, v] = at(line, k);
      if (m.observed(u, v)) {
        sum += m.weight(u, v);
        ++n;
      }
    }
    if (n == 0) continue;
    const double mean = sum / static_cast<double>(n);
    double scale = 1.0;
    if (normalize) {
      double ss = 0.0;
      for (std::size_t k = 0; k < length; ++k) {
        auto [u, v] = at(line, k);
        if (m.observed(u, v)) ss += (m.weight(u, v) - mean) * (m.weight(u, v) - mean);
      }
      const double sd = n >= 2 ? std::sqrt(ss / static_cast<double>(n - 1)) : 0.0;
      if (sd > 0.0) {
        scale = sd;
      } else {
        warn(std::string(by_row ? "row " : "column ") + std::to_string(line + 1) +
             " has zero observed variance; centering only");
      }
    }
    result.offsets[line] = mean;
    result.scales[line] = scale;
    for (std::size_t k = 0; k < length; ++k) {
      auto [u, v] = at(line, k);
      if (m.observed(u, v)) result.matrix.set(u, v, (m.weight(u, v) - mean) / scale);
    }
  }
  return result;
}

}  // namespace nsm
