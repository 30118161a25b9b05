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
#ifndef NSM_HFUNCTION_HPP_
#define NSM_HFUNCTION_HPP_

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace nsm {

// CDF pairs usable in the convolution recipe
//   H(x, y) = F12(F1^{-1}(x) + F2^{-1}(y)).
enum class HFamily {
  // F1, F2: negated gamma(shape1, 1) and gamma(shape2, 1); F12 is the negated
  // gamma(shape1 + shape2, 1), so F12(z) = Q(shape1 + shape2, -z) for z < 0.
  kGamma,
  // Negated unit exponentials: H(x, y) = xy (1 - ln xy).
  kProductLog,
  // Standard normals: H(x, y) = Phi((Phi^{-1}(x) + Phi^{-1}(y)) / sqrt 2).
  kNormal,
  // H(x, y) = x. Uniform-preserving but constant in y; a test fixture only.
  kProjection,
};

enum class Orientation {
  kPositive,  // H(x, y)
  kNegative,  // H(1 - x, 1 - y)
  kTiltRows,  // H(1 - x, y), auxiliary
  kTiltCols,  // H(x, 1 - y), auxiliary
};

struct HFunctionSpec {
  HFamily family = HFamily::kGamma;
  double shape1 = 0.5;
  double shape2 = 0.5;
  Orientation orientation = Orientation::kPositive;

  // Stable identifier, e.g. "gamma-recipe:shape=0.5:pos".
  std::string id() const;
  // Mixed reflections are not monotone in the same direction in both
  // arguments, so they are excluded from fitting unless asked for.
  bool auxiliary() const {
    return orientation == Orientation::kTiltRows || orientation == Orientation::kTiltCols;
  }
  bool operator==(const HFunctionSpec&) const = default;
};

// Evaluator with the recipe split into per-argument terms so that callers
// evaluating a whole block can compute each node's quantile once:
//   H(x, y) = combine(row_term(x) + col_term(y)).
class HFunction {
 public:
  explicit HFunction(const HFunctionSpec& spec);

  const HFunctionSpec& spec() const { return spec_; }

  double row_term(double x) const;
  double col_term(double y) const;
  // Result lies in [1e-12, 1 - 1e-12].
  double combine(double z) const;

  // Throws DomainError unless x and y lie in the open unit interval.
  double operator()(double x, double y) const;

 private:
  double quantile(double u, double shape) const;

  HFunctionSpec spec_;
};

double eval_h(const HFunctionSpec& spec, double x, double y);

// The full documented list: every base family in all four orientations.
const std::vector<HFunctionSpec>& catalog();
// The search set used for fitting: catalog() minus auxiliary members unless
// include_auxiliary is set.
std::vector<HFunctionSpec> hypothesis_set(bool include_auxiliary = false);

// Inverse of HFunctionSpec::id(). Throws DomainError on unknown ids.
HFunctionSpec parse_h_id(const std::string& id);

// Kolmogorov-Smirnov distance between H(U, V), for n iid uniform pairs, and
// the uniform(0, 1) CDF. Requires n >= 1000.
double uniformity_check(const HFunctionSpec& spec, std::size_t n, std::uint64_t seed);

// KS distance of a sample against the uniform(0, 1) CDF. Sorts the sample.
double ks_uniform(std::vector<double>& sample);

}  // namespace nsm

#endif  // NSM_HFUNCTION_HPP_
