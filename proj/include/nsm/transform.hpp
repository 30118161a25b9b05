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
#ifndef NSM_TRANSFORM_HPP_
#define NSM_TRANSFORM_HPP_

#include <array>
#include <string>
#include <vector>

#include "nsm/ratings.hpp"

namespace nsm {

enum class Transformation { kNone, kCenterRows, kCenterCols, kNormalizeRows, kNormalizeCols };

// Listing order; ties in cross-validation resolve to the earliest entry.
inline constexpr std::array<Transformation, 5> kAllTransformations = {
    Transformation::kNone, Transformation::kCenterRows, Transformation::kCenterCols,
    Transformation::kNormalizeRows, Transformation::kNormalizeCols};

std::string to_string(Transformation t);
Transformation parse_transformation(const std::string& name);

struct TransformResult {
  Transformation kind = Transformation::kNone;
  RatingsMatrix matrix;
  // One entry per row (row kinds) or per column (column kinds); empty for
  // kNone. transformed = (original - offset) / scale.
  std::vector<double> offsets;
  std::vector<double> scales;

  // Maps a value in transformed units at (u, v) back to original units.
  double invert(std::size_t u, std::size_t v, double value) const;
};

// Statistics use observed entries only; the mask is unchanged. A row or column
// with fewer than two observed entries or zero variance is centered and keeps
// scale 1.
TransformResult apply_transformation(const RatingsMatrix& m, Transformation t);

}  // namespace nsm

#endif  // NSM_TRANSFORM_HPP_
