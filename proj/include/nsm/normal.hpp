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

#ifndef NSM_NORMAL_HPP_
#define NSM_NORMAL_HPP_

namespace nsm {

inline constexpr double kProbabilityFloor = 1e-12;

double clamp_probability(double p);

// Standard normal CDF.
double normal_cdf(double x);

// Standard normal quantile. The argument is clamped to
// [kProbabilityFloor, 1 - kProbabilityFloor] first, so the result is finite.
double normal_quantile(double p);

}  // namespace nsm

#endif  // NSM_NORMAL_HPP_
