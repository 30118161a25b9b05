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
#include "nsm/estimation.hpp"
#include "nsm/generator.hpp"
#include "nsm/normal.hpp"
#include "test_util.hpp"

using namespace nsm;

namespace {

BlockData dense_block(std::size_t rows, std::size_t cols, std::vector<double> values) {
  return BlockData{rows, cols, std::move(values)};
}

GeneratorConfig single_block(const HFunctionSpec& h, double sigma, int n, std::uint64_t seed) {
  GeneratorConfig cfg;
  cfg.row_sizes = {n};
  cfg.col_sizes = {n};
  cfg.blocks = {BlockSpec{0, 100, h, sigma}};
  cfg.seed = seed;
  return cfg;
}

}  // namespace

TEST_CASE("empirical G") {
  const auto one = fit_empirical_G({3});
  CHECK(one.cdf(3) == 0.5);
  const auto g = fit_empirical_G({3, 1, 2});
  CHECK(g.cdf(1) == 0.25);
  CHECK(g.cdf(2) == 0.5);
  CHECK(g.cdf(3) == 0.75);
  const auto ties = fit_empirical_G({5, 9, 5});
  CHECK(ties.cdf(5) == 0.375);
  CHECK(ties.cdf(9) == 0.75);
  CHECK(g.quantile(0.25) == 1.0);
  CHECK(g.quantile(0.375) == doctest::Approx(1.5));
  CHECK(g.quantile(0.01) == 1.0);
  CHECK(g.quantile(0.99) == 3.0);
  CHECK(g.median() == 2.0);
  CHECK_THROWS_AS(fit_empirical_G({}), InsufficientDataError);
}

TEST_CASE("psi ranks") {
  const double nan = std::nan("");
  const auto block = dense_block(3, 3, {1, 2, 3, 7, 8, 9, nan, nan, nan});
  const auto g = fit_empirical_G(block.observed());
  const auto psi = estimate_psi(block, g);
  CHECK(psi.row[0] == doctest::Approx(1.0 / 3));
  CHECK(psi.row[1] == doctest::Approx(2.0 / 3));
  CHECK(psi.row[2] == 0.5);
  CHECK(psi.row_flagged[2]);
  CHECK(psi.col[0] == doctest::Approx(0.25));
  CHECK(psi.col[2] == doctest::Approx(0.75));

  // Equal scores keep distinct ranks, in node order.
  const auto flat = dense_block(2, 2, {4, 4, 4, 4});
  const auto p = estimate_psi(flat, fit_empirical_G(flat.observed()));
  CHECK(p.row[0] < p.row[1]);

  const auto sum = estimate_psi(block, g, PsiAggregate::kSum);
  CHECK(sum.row[0] < sum.row[1]);
}

TEST_CASE("closed-form shrink matches a sigma grid") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const CounterRng rng(seed, 31);
    std::vector<double> a(40), b(40);
    const double slope = 1.2 * rng.uniform(999) - 0.1;
    for (std::size_t k = 0; k < a.size(); ++k) {
      b[k] = normal_quantile(rng.uniform(2 * k));
      a[k] = slope * b[k] + 0.3 * normal_quantile(rng.uniform(2 * k + 1));
    }
    const auto fit = fit_shrink(a, b);
    double grid_best = 1e300;
    for (int s = 0; s < 10000; ++s) {
      // Log-spaced over [0, 1e3].
      const double sigma = std::expm1(s * std::log(1001.0) / 9999);
      const double c = 1.0 / std::sqrt(1.0 + sigma * sigma);
      double loss = 0;
      for (std::size_t k = 0; k < a.size(); ++k) loss += (a[k] - c * b[k]) * (a[k] - c * b[k]);
      grid_best = std::min(grid_best, loss);
    }
    INFO("seed " << seed << " c " << fit.c);
    CHECK(fit.loss <= grid_best + 1e-9);
    if (!fit.pure_noise) CHECK(fit.loss >= grid_best - 1e-3 * grid_best - 1e-6);
    CHECK(fit.c == doctest::Approx(1.0 / std::sqrt(1.0 + fit.sigma * fit.sigma)));
  }
  const std::vector<double> same = {0.5, -1.0, 2.0};
  CHECK(fit_shrink(same, same).sigma == 0.0);
  const std::vector<double> opposite = {-0.5, 1.0, -2.0};
  const auto noise = fit_shrink(opposite, same);
  CHECK(noise.pure_noise);
  CHECK(noise.sigma == kPureNoiseSigma);
}

TEST_CASE("fit_H_sigma recovers the generating function") {
  const auto hs = hypothesis_set();
  for (std::size_t k : {0u, 5u, 6u, 7u, 12u}) {
    const auto net = sample_network(single_block(hs[k], 0.0, 40, k));
    BlockData block{40, 40, {}};
    for (std::size_t u = 0; u < 40; ++u)
      for (std::size_t v = 0; v < 40; ++v) block.values.push_back(net.matrix.weight(u, v));
    const auto g = fit_empirical_G(block.observed());
    const auto psi = estimate_psi(block, g);
    const auto fit = fit_H_sigma(block, psi, g, hs);
    INFO(hs[k].id() << " chose " << fit.h.id());
    // Estimated psi are ranks of the weights, so a negative block is fitted
    // as its positive counterpart on reversed ranks.
    CHECK(fit.h.family == hs[k].family);
    CHECK(fit.h.shape1 == hs[k].shape1);
    CHECK(fit.h.shape2 == hs[k].shape2);
    CHECK(fit.shrink.sigma < 0.2);
    CHECK(fit.losses.size() == hs.size());
  }
}

TEST_CASE("fit is rank based") {
  const auto net = sample_network(single_block(catalog()[0], 0.5, 20, 3));
  const auto m = mcar_mask(net.matrix, 0.3, 3);
  RatingsMatrix affine(20, 20);
  for (std::size_t u = 0; u < 20; ++u)
    for (std::size_t v = 0; v < 20; ++v)
      if (m.observed(u, v)) affine.set(u, v, 3.0 * m.weight(u, v) - 7.0);
  FitOptions opt;
  opt.iterations = 3;
  const auto a = fit_model(m, net.truth, opt);
  const auto b = fit_model(affine, net.truth, opt);
  CHECK(a.model.blocks[0].h == b.model.blocks[0].h);
  CHECK(a.model.blocks[0].sigma == doctest::Approx(b.model.blocks[0].sigma).epsilon(1e-9));
  for (std::size_t u = 0; u < 20; ++u)
    for (std::size_t v = 0; v < 20; ++v)
      CHECK(b.completed.weight(u, v) == doctest::Approx(3.0 * a.completed.weight(u, v) - 7.0).epsilon(1e-9));
}

TEST_CASE("predictions") {
  const auto net = sample_network(single_block(catalog()[0], 0.0, 30, 1));
  const auto m = mcar_mask(net.matrix, 0.5, 1);
  const auto fit = fit_model(m, net.truth);
  const auto& block = fit.model.blocks[0];
  const double lo = block.g.min(), hi = block.g.max();
  double prev = -1e300;
  for (double p = 0.02; p < 1.0; p += 0.02) {
    const double w = predict_value(block, p, p);
    CHECK(w >= lo);
    CHECK(w <= hi);
    CHECK(w >= prev);
    prev = w;
  }
  for (std::size_t u = 0; u < 30; ++u)
    for (std::size_t v = 0; v < 30; ++v) {
      REQUIRE(fit.completed.observed(u, v));
      if (m.observed(u, v)) CHECK(fit.completed.weight(u, v) == m.weight(u, v));
      if (!m.observed(u, v))
        CHECK(predict_edge(fit.model, u, v) == doctest::Approx(fit.completed.weight(u, v)).epsilon(1e-12));
    }
}

TEST_CASE("self-consistency on noiseless data") {
  // With psi equally spaced, the generated ranks coincide with the estimated
  // ones and the fitted block reproduces the weights.
  const auto net = sample_network(single_block(catalog()[3], 0.0, 25, 2));
  const auto fit = fit_model(net.matrix, net.truth);
  CHECK(fit.model.blocks[0].h == catalog()[3]);
  CHECK(fit.model.blocks[0].sigma < 0.05);
}

TEST_CASE("iterations") {
  const auto net = sample_network(single_block(catalog()[0], 0.3, 15, 4));
  FitOptions opt;
  const auto full = fit_model(net.matrix, net.truth, opt);
  CHECK(full.model.diagnostics.size() == 1);
  const auto m = mcar_mask(net.matrix, 0.4, 4);
  const auto partial = fit_model(m, net.truth, opt);
  CHECK(partial.model.diagnostics.size() == 10);
  CHECK(partial.model.diagnostics[0].mean_abs_change == 0.0);
  opt.tolerance = 1e9;
  CHECK(fit_model(m, net.truth, opt).model.diagnostics.size() == 2);
  opt.iterations = 0;
  CHECK_THROWS_AS(fit_model(m, net.truth, opt), DomainError);
}

TEST_CASE("unfittable blocks fall back") {
  const auto m = testing::random_matrix(8, 8, 1.0, 5);
  RatingsMatrix holed = m;
  for (std::size_t u = 0; u < 4; ++u)
    for (std::size_t v = 0; v < 4; ++v) holed.hide(u, v);
  const CommunityAssignment ca{{0, 0, 0, 0, 1, 1, 1, 1}, {0, 0, 0, 0, 1, 1, 1, 1}};
  FitOptions opt;
  opt.iterations = 1;
  const auto fit = fit_model(holed, ca, opt);
  CHECK(fit.model.block(0, 0).fallback);
  CHECK(fit.model.diagnostics[0].unfittable_blocks == 1);
  CHECK(std::isfinite(fit.completed.weight(0, 0)));
}

TEST_CASE("model JSON round trip") {
  const auto net = sample_network(single_block(catalog()[8], 0.2, 12, 6));
  const auto fit = fit_model(mcar_mask(net.matrix, 0.3, 6), net.truth);
  const auto j = fit.model.to_json();
  const auto back = ModelFit::from_json(j);
  CHECK(back.to_json() == j);
  for (std::size_t u = 0; u < 12; ++u)
    for (std::size_t v = 0; v < 12; ++v) CHECK(predict_edge(back, u, v) == predict_edge(fit.model, u, v));
}

TEST_CASE("held-out psi placement") {
  const auto net = sample_network(single_block(catalog()[0], 0.0, 20, 8));
  std::vector<bool> held(20, false);
  held[19] = true;
  FitOptions opt;
  opt.frozen_rows = held;
  auto fit = fit_model(net.matrix, net.truth, opt).model;
  const std::size_t pos = fit.row_position[19];
  CHECK(fit.blocks[0].psi_row[pos] == 0.5);
  place_heldout_psi(fit, net.matrix, held, std::vector<bool>(20, false));
  // Largest generated psi: the node ranks above every training row.
  CHECK(fit.blocks[0].psi_row[pos] > 0.9);
}
