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

#include "nsm/error.hpp"
#include "nsm/evaluation.hpp"
#include "nsm/generator.hpp"
#include "test_util.hpp"

using namespace nsm;

namespace {

GeneratorConfig small_config() {
  GeneratorConfig cfg;
  cfg.row_sizes = {10, 12};
  cfg.col_sizes = {11, 9};
  const auto hs = hypothesis_set();
  cfg.blocks = {BlockSpec{0, 10, hs[0], 0.2}, BlockSpec{0, 20, hs[7], 0.2}, BlockSpec{0, 30, hs[12], 0.2},
                BlockSpec{0, 40, hs[2], 0.2}};
  cfg.seed = 1;
  return cfg;
}

// Entropy-based NMI with the arithmetic mean, computed from scratch.
double nmi_oracle(const std::vector<int>& a, const std::vector<int>& b) {
  const double n = static_cast<double>(a.size());
  const int ka = *std::max_element(a.begin(), a.end()) + 1, kb = *std::max_element(b.begin(), b.end()) + 1;
  std::vector<double> joint(ka * kb, 0), pa(ka, 0), pb(kb, 0);
  for (std::size_t k = 0; k < a.size(); ++k) {
    joint[a[k] * kb + b[k]] += 1 / n;
    pa[a[k]] += 1 / n;
    pb[b[k]] += 1 / n;
  }
  double mi = 0, ha = 0, hb = 0;
  for (int x = 0; x < ka; ++x)
    for (int y = 0; y < kb; ++y)
      if (joint[x * kb + y] > 0) mi += joint[x * kb + y] * std::log(joint[x * kb + y] / (pa[x] * pb[y]));
  for (double p : pa)
    if (p > 0) ha -= p * std::log(p);
  for (double p : pb)
    if (p > 0) hb -= p * std::log(p);
  return mi / (0.5 * (ha + hb));
}

}  // namespace

TEST_CASE("error metrics") {
  const std::vector<double> pred = {1, 2, 3}, truth = {1, 4, 0};
  CHECK(mse(pred, truth) == doctest::Approx(13.0 / 3));
  CHECK(rmse(pred, truth) == doctest::Approx(std::sqrt(13.0 / 3)));
  CHECK(nmae(pred, truth, 0, 10) == doctest::Approx(5.0 / 30));
  CHECK_THROWS_AS(mse(pred, std::vector<double>{1.0}), DomainError);
  CHECK_THROWS_AS(nmae(pred, truth, 1, 1), DomainError);
}

TEST_CASE("nmi") {
  const std::vector<int> a = {0, 0, 1, 1, 2, 2}, b = {1, 1, 0, 0, 2, 2}, c = {0, 1, 0, 1, 0, 1};
  CHECK(nmi(a, b) == 1.0);
  CHECK(nmi(a, a, NmiNormalization::kMin) == 1.0);
  CHECK(nmi({0, 0, 0}, {0, 0, 0}) == 1.0);
  CHECK(nmi({0, 0, 0}, {0, 1, 2}) == 0.0);
  CHECK(nmi(a, c) == doctest::Approx(nmi_oracle(a, c)).epsilon(1e-12));
  for (std::uint64_t s = 0; s < 10; ++s) {
    const auto x = testing::random_labels(40, 4, s, 1), y = testing::random_labels(40, 3, s, 2);
    CHECK(nmi(x, y) == nmi(y, x));
    CHECK(nmi(x, y) == doctest::Approx(nmi_oracle(x, y)).epsilon(1e-12));
    for (auto norm : {NmiNormalization::kArithmetic, NmiNormalization::kMin, NmiNormalization::kSqrt}) {
      const double v = nmi(x, y, norm);
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
    }
    CHECK(nmi(x, y, NmiNormalization::kMin) >= nmi(x, y, NmiNormalization::kSqrt));
    CHECK(nmi(x, y, NmiNormalization::kSqrt) >= nmi(x, y, NmiNormalization::kArithmetic) - 1e-15);
  }
  CHECK(parse_nmi_normalization(to_string(NmiNormalization::kSqrt)) == NmiNormalization::kSqrt);
  CHECK_THROWS_AS(parse_nmi_normalization("geometric-ish"), DomainError);
}

TEST_CASE("folds") {
  const auto m = testing::random_matrix(20, 15, 0.5, 2);
  const auto f = assign_folds(m, 3, 5);
  CHECK(f.size() == m.observed_count());
  CHECK(f == assign_folds(m, 3, 5));
  std::vector<int> counts(3, 0);
  for (int k : f) ++counts[k];
  CHECK(*std::max_element(counts.begin(), counts.end()) - *std::min_element(counts.begin(), counts.end()) <= 1);
  CHECK_THROWS_AS(assign_folds(testing::random_matrix(2, 2, 1.0, 1), 3, 1), InsufficientDataError);
}

TEST_CASE("cross-validation ties resolve to the earliest entry") {
  // The same transformation listed twice must tie and keep the first.
  const auto net = sample_network(small_config());
  CvOptions opt;
  opt.range_lo = 0;
  opt.range_hi = 40;
  opt.fit.iterations = 2;
  opt.transformations = {Transformation::kNone, Transformation::kNone};
  const auto r = cross_validate_transformations(mcar_mask(net.matrix, 0.3, 1), opt);
  CHECK(r.best == Transformation::kNone);
  REQUIRE(r.mean_nmae.size() == 2);
  CHECK(r.mean_nmae[0].second == r.mean_nmae[1].second);
}

TEST_CASE("evaluation pipeline") {
  const auto net = sample_network(small_config());
  const auto m = mcar_mask(net.matrix, 0.3, 2);
  EvaluateOptions opt;
  opt.truth = net.truth;
  opt.fit.iterations = 3;
  const auto e = evaluate_pipeline(m, SplitSpec{SplitScheme::kHoldEdges, 0.2, 3}, opt);
  CHECK(e.report.test_edges > 0);
  CHECK(e.report.train_edges + e.report.test_edges == m.observed_count());
  CHECK(e.report.rmse == doctest::Approx(std::sqrt(e.report.mse)));
  REQUIRE(e.report.nmi_rows);
  CHECK(*e.report.nmi_rows >= 0.0);
  CHECK(e.predictions.observed_count() == e.report.test_edges);

  const auto again = evaluate_pipeline(m, SplitSpec{SplitScheme::kHoldEdges, 0.2, 3}, opt);
  CHECK(again.report == e.report);

  const auto back = EvaluationReport::from_json(e.report.to_json());
  CHECK(back == e.report);
  CHECK(back.to_json().dump() == e.report.to_json().dump());

  for (auto scheme : {SplitScheme::kHoldNodes, SplitScheme::kHoldNodesAndEdges}) {
    const auto n = evaluate_pipeline(m, SplitSpec{scheme, 0.2, 4}, opt);
    CHECK(n.report.test_edges > 0);
    CHECK(std::isfinite(n.report.mse));
    CHECK(n.assignment.row_labels.size() == m.rows());
  }

  CHECK_THROWS_AS(evaluate_pipeline(m, SplitSpec{SplitScheme::kHoldEdges, 0.0, 3}, opt), Error);
}
