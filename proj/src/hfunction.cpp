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
#include "nsm/hfunction.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <boost/math/special_functions/gamma.hpp>

#include "nsm/error.hpp"
#include "nsm/normal.hpp"
#include "nsm/rng.hpp"

namespace nsm {
namespace {

std::string format_shape(double s) {
  std::ostringstream os;
  os << s;
  return os.str();
}

const char* orientation_suffix(Orientation o) {
  switch (o) {
    case Orientation::kPositive: return "pos";
    case Orientation::kNegative: return "neg";
    case Orientation::kTiltRows: return "tilt-x";
    case Orientation::kTiltCols: return "tilt-y";
  }
  return "pos";
}

std::vector<HFunctionSpec> build_catalog() {
  std::vector<HFunctionSpec> bases = {
      {HFamily::kGamma, 0.5, 0.5},   {HFamily::kGamma, 0.25, 0.25},
      {HFamily::kGamma, 2.0, 2.0},   {HFamily::kGamma, 4.0, 4.0},
      {HFamily::kGamma, 0.5, 2.0},   {HFamily::kProductLog, 1.0, 1.0},
      {HFamily::kNormal, 0.0, 0.0},
  };
  std::vector<HFunctionSpec> out;
  for (auto o : {Orientation::kPositive, Orientation::kNegative, Orientation::kTiltRows,
                 Orientation::kTiltCols}) {
    for (auto b : bases) {
      b.orientation = o;
      out.push_back(b);
    }
  }
  return out;
}

}  // namespace

std::string HFunctionSpec::id() const {
  std::string base;
  switch (family) {
    case HFamily::kGamma:
      base = "gamma-recipe:shape=" + format_shape(shape1);
      if (shape2 != shape1) base += "," + format_shape(shape2);
      break;
    case HFamily::kProductLog: base = "product-log"; break;
    case HFamily::kNormal: base = "normal-recipe"; break;
    case HFamily::kProjection: base = "projection"; break;
  }
  return base + ":" + orientation_suffix(orientation);
}

HFunction::HFunction(const HFunctionSpec& spec) : spec_(spec) {
  if (spec.family == HFamily::kGamma && !(spec.shape1 > 0.0 && spec.shape2 > 0.0))
    throw DomainError("gamma recipe needs positive shapes");
}

double HFunction::quantile(double u, double shape) const {
  u = clamp_probability(u);
  switch (spec_.family) {
    case HFamily::kGamma: return -boost::math::gamma_q_inv(shape, u);
    case HFamily::kProductLog: return std::log(u);
    case HFamily::kNormal: return normal_quantile(u);
    case HFamily::kProjection: return u;
  }
  return u;
}

double HFunction::row_term(double x) const {
  const bool reflect =
      spec_.orientation == Orientation::kNegative || spec_.orientation == Orientation::kTiltRows;
  return quantile(reflect ? 1.0 - x : x, spec_.shape1);
}

double HFunction::col_term(double y) const {
  if (spec_.family == HFamily::kProjection) return 0.0;
  const bool reflect =
      spec_.orientation == Orientation::kNegative || spec_.orientation == Orientation::kTiltCols;
  return quantile(reflect ? 1.0 - y : y, spec_.shape2);
}

double HFunction::combine(double z) const {
  double p = 1.0;
  switch (spec_.family) {
    case HFamily::kGamma:
      p = z < 0.0 ? boost::math::gamma_q(spec_.shape1 + spec_.shape2, -z) : 1.0;
      break;
    case HFamily::kProductLog: p = z < 0.0 ? std::exp(z) * (1.0 - z) : 1.0; break;
    case HFamily::kNormal: p = normal_cdf(z * M_SQRT1_2); break;
    case HFamily::kProjection: p = z; break;
  }
  return clamp_probability(p);
}

double HFunction::operator()(double x, double y) const {
  if (!(x > 0.0 && x < 1.0 && y > 0.0 && y < 1.0))
    throw DomainError("H-function arguments must lie in (0, 1)");
  return combine(row_term(x) + col_term(y));
}

double eval_h(const HFunctionSpec& spec, double x, double y) { return HFunction(spec)(x, y); }

const std::vector<HFunctionSpec>& catalog() {
  static const std::vector<HFunctionSpec> members = build_catalog();
  return members;
}

std::vector<HFunctionSpec> hypothesis_set(bool include_auxiliary) {
  std::vector<HFunctionSpec> out;
  for (const auto& s : catalog())
    if (include_auxiliary || !s.auxiliary()) out.push_back(s);
  return out;
}

HFunctionSpec parse_h_id(const std::string& id) {
  for (const auto& s : catalog())
    if (s.id() == id) return s;
  for (auto o : {Orientation::kPositive, Orientation::kNegative, Orientation::kTiltRows,
                 Orientation::kTiltCols}) {
    HFunctionSpec p{HFamily::kProjection, 1.0, 1.0, o};
    if (p.id() == id) return p;
  }
  throw DomainError("unknown H-function id '" + id + "'");
}

double ks_uniform(std::vector<double>& sample) {
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double lo = static_cast<double>(i) / n;
    const double hi = static_cast<double>(i + 1) / n;
    const double f = std::clamp(sample[i], 0.0, 1.0);
    d = std::max({d, hi - f, f - lo});
  }
  return d;
}

double uniformity_check(const HFunctionSpec& spec, std::size_t n, std::uint64_t seed) {
  if (n < 1000) throw DomainError("uniformity_check needs n >= 1000");
  const HFunction h(spec);
  const CounterRng xs(seed, streams::kUniformityX), ys(seed, streams::kUniformityY);
  std::vector<double> values(n);
  for (std::size_t k = 0; k < n; ++k) values[k] = h(xs.uniform(k), ys.uniform(k));
  return ks_uniform(values);
}

}  // namespace nsm
