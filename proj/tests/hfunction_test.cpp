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
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "nsm/error.hpp"
#include "nsm/hfunction.hpp"
#include "nsm/normal.hpp"
#include "nsm/rng.hpp"

using namespace nsm;

namespace {

// Inverse of erfc on (0, 2) by bisection in long double.
long double erfc_inverse(long double p) {
  long double lo = -10.0L, hi = 10.0L;
  for (int k = 0; k < 200; ++k) {
    const long double mid = 0.5L * (lo + hi);
    (std::erfc(mid) > p ? lo : hi) = mid;
  }
  return 0.5L * (lo + hi);
}

// Negated gamma(1/2) recipe: F1^{-1}(x) = -erfcinv(x)^2 and F12(z) = e^z.
double gamma_half_oracle(double x, double y) {
  const long double a = erfc_inverse(x), b = erfc_inverse(y);
  return static_cast<double>(std::exp(-(a * a) - (b * b)));
}

double phi_oracle(double x) {
  return static_cast<double>(0.5L * std::erfc(-static_cast<long double>(x) / std::sqrt(2.0L)));
}

}  // namespace

TEST_CASE("standard normal utilities") {
  for (double x = -8.0; x <= 8.0; x += 0.01) CHECK(std::abs(normal_cdf(x) - phi_oracle(x)) < 1e-12);
  for (double p : {1e-10, 1e-6, 0.001, 0.1, 0.3, 0.5, 0.77, 0.99, 1 - 1e-9}) {
    const double q = normal_quantile(p);
    CHECK(std::abs(phi_oracle(q) - p) <= 1e-12 * std::max(1.0, p / 1e-3));
  }
  CHECK(normal_quantile(0.5) == 0.0);
  CHECK(std::isfinite(normal_quantile(0.0)));
  CHECK(std::isfinite(normal_quantile(1.0)));
}

TEST_CASE("closed forms") {
  const HFunctionSpec plog{HFamily::kProductLog, 1, 1, Orientation::kPositive};
  CHECK(eval_h(plog, 0.5, 0.5) == doctest::Approx(0.25 * (1 - std::log(0.25))).epsilon(1e-12));
  CHECK(eval_h(plog, 0.5, 0.5) == doctest::Approx(0.59657).epsilon(1e-5));

  const HFunctionSpec gamma{HFamily::kGamma, 0.5, 0.5, Orientation::kPositive};
  CHECK(eval_h(gamma, 0.5, 0.5) == doctest::Approx(0.6345).epsilon(1e-3));
  const CounterRng rng(3, 4);
  for (std::uint64_t k = 0; k < 200; ++k) {
    const double x = rng.uniform(2 * k), y = rng.uniform(2 * k + 1);
    CHECK(eval_h(gamma, x, y) == doctest::Approx(gamma_half_oracle(x, y)).epsilon(1e-9));
    // Gamma shape 1 is the negated exponential, i.e. the product-log family.
    const HFunctionSpec one{HFamily::kGamma, 1, 1, Orientation::kPositive};
    const double p = x * y;
    CHECK(eval_h(one, x, y) == doctest::Approx(p * (1 - std::log(p))).epsilon(1e-9));
    const HFunctionSpec normal{HFamily::kNormal, 0, 0, Orientation::kPositive};
    CHECK(eval_h(normal, x, y) ==
          doctest::Approx(phi_oracle((normal_quantile(x) + normal_quantile(y)) / std::sqrt(2.0))).epsilon(1e-9));
  }
}

TEST_CASE("orientations are reflections") {
  for (const auto& spec : catalog()) {
    if (spec.orientation != Orientation::kPositive) continue;
    auto with = [&](Orientation o) {
      HFunctionSpec s = spec;
      s.orientation = o;
      return s;
    };
    for (double x : {0.1, 0.3, 0.8})
      for (double y : {0.2, 0.5, 0.95}) {
        CHECK(eval_h(with(Orientation::kNegative), x, y) == eval_h(spec, 1 - x, 1 - y));
        CHECK(eval_h(with(Orientation::kTiltRows), x, y) == eval_h(spec, 1 - x, y));
        CHECK(eval_h(with(Orientation::kTiltCols), x, y) == eval_h(spec, x, 1 - y));
      }
  }
  const HFunctionSpec neg{HFamily::kProductLog, 1, 1, Orientation::kNegative};
  const HFunctionSpec pos{HFamily::kProductLog, 1, 1, Orientation::kPositive};
  CHECK(eval_h(neg, 0.3, 0.8) == doctest::Approx(eval_h(pos, 0.7, 0.2)).epsilon(1e-14));
}

TEST_CASE("monotone and inside the unit interval") {
  std::vector<double> grid;
  for (double t : {1e-9, 1e-6, 0.01, 0.1, 0.25, 0.5, 0.75, 0.9, 0.99, 1 - 1e-6, 1 - 1e-9}) grid.push_back(t);
  for (const auto& spec : hypothesis_set()) {
    const double sign = spec.orientation == Orientation::kPositive ? 1.0 : -1.0;
    for (std::size_t a = 0; a < grid.size(); ++a)
      for (double y : grid) {
        const double h = eval_h(spec, grid[a], y);
        CHECK(h > 0.0);
        CHECK(h < 1.0);
        if (a + 1 < grid.size()) {
          CHECK(sign * (eval_h(spec, grid[a + 1], y) - h) >= -1e-15);
          CHECK(sign * (eval_h(spec, y, grid[a + 1]) - eval_h(spec, y, grid[a])) >= -1e-15);
        }
      }
  }
  CHECK_THROWS_AS(eval_h(catalog()[0], 0.0, 0.5), DomainError);
  CHECK_THROWS_AS(eval_h(catalog()[0], 0.5, 1.0), DomainError);
}

TEST_CASE("catalog") {
  const auto& c = catalog();
  CHECK(c.size() == 28);
  CHECK(c == catalog());
  CHECK(c[0] == HFunctionSpec{HFamily::kGamma, 0.5, 0.5, Orientation::kPositive});
  CHECK(c[0].id() == "gamma-recipe:shape=0.5:pos");
  std::set<std::string> ids;
  for (const auto& s : c) {
    ids.insert(s.id());
    CHECK(parse_h_id(s.id()) == s);
  }
  CHECK(ids.size() == c.size());
  CHECK(hypothesis_set().size() == 14);
  CHECK(hypothesis_set(true).size() == 28);
  for (const auto& s : hypothesis_set()) CHECK_FALSE(s.auxiliary());
  CHECK_THROWS_AS(parse_h_id("no-such-family:pos"), DomainError);
}

TEST_CASE("uniformity") {
  const HFunctionSpec projection{HFamily::kProjection, 0, 0, Orientation::kPositive};
  const double small = uniformity_check(projection, 1000, 1);
  const double large = uniformity_check(projection, 100000, 1);
  CHECK(large < small + 1e-12);
  CHECK(large < 0.01);
  for (const auto& spec : catalog()) {
    INFO(spec.id());
    CHECK(uniformity_check(spec, 100000, 7) < 1.63 / std::sqrt(100000.0));
  }
  CHECK_THROWS_AS(uniformity_check(catalog()[0], 999, 1), DomainError);

  std::vector<double> exact;
  for (int k = 0; k < 10; ++k) exact.push_back((k + 0.5) / 10);
  CHECK(ks_uniform(exact) == doctest::Approx(0.05));
}
