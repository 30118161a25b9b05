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
#include <functional>
#include <map>
#include <numeric>

#include "nsm/detection.hpp"
#include "nsm/error.hpp"
#include "nsm/generator.hpp"
#include "test_util.hpp"

using namespace nsm;

namespace {

// Relabels in order of first appearance so that partitions compare by value.
std::vector<int> canonical(std::vector<int> labels) {
  compact_labels(labels);
  return labels;
}

// All set partitions of n elements as restricted growth strings.
std::vector<std::vector<int>> set_partitions(int n) {
  std::vector<std::vector<int>> out;
  std::vector<int> a(n, 0);
  std::function<void(int, int)> rec = [&](int k, int used) {
    if (k == n) {
      out.push_back(a);
      return;
    }
    for (int v = 0; v <= used; ++v) {
      a[k] = v;
      rec(k + 1, std::max(used, v + 1));
    }
  };
  rec(0, 0);
  return out;
}

// Block model with H drawn from the whole hypothesis set.
GeneratorConfig mixed_config(std::vector<int> rows, std::vector<int> cols, std::uint64_t seed) {
  GeneratorConfig cfg;
  cfg.row_sizes = std::move(rows);
  cfg.col_sizes = std::move(cols);
  cfg.psi_mode = PsiMode::kIidUniform;
  cfg.seed = seed;
  const auto hs = hypothesis_set();
  for (std::size_t b = 0; b < cfg.row_sizes.size() * cfg.col_sizes.size(); ++b) {
    BlockSpec spec;
    spec.lo = 0;
    spec.hi = 20.0 * static_cast<double>(1 + (b + seed) % 4);
    spec.h = hs[(3 * b + seed) % hs.size()];
    cfg.blocks.push_back(spec);
  }
  return cfg;
}

// Positive H on blocks with i + j even and negative H elsewhere, so that no
// two communities share a pattern and the planted partition maximises L.
GeneratorConfig checker_config(std::vector<int> rows, std::vector<int> cols, std::uint64_t seed) {
  GeneratorConfig cfg = mixed_config(std::move(rows), std::move(cols), seed);
  const auto hs = hypothesis_set();
  for (std::size_t b = 0; b < cfg.blocks.size(); ++b) {
    const std::size_t i = b / cfg.col_sizes.size(), j = b % cfg.col_sizes.size();
    cfg.blocks[b].h = hs[(b + seed) % 7 + ((i + j) % 2 ? 7 : 0)];
  }
  return cfg;
}

}  // namespace

TEST_CASE("set partition enumeration") {
  CHECK(set_partitions(6).size() == 203);
}

TEST_CASE("reaches the exhaustive optimum on small planted networks") {
  const auto parts = set_partitions(6);
  int hits = 0;
  const int instances = 50;
  for (int s = 0; s < instances; ++s) {
    const auto net = sample_network(mixed_config({3, 3}, {3, 3}, static_cast<std::uint64_t>(s)));
    const BipartiteNetwork bn(net.matrix);
    double best = -1e300;
    for (const auto& r : parts)
      for (const auto& c : parts) best = std::max(best, measure_total(bn, r, c));
    const auto result = detect(net.matrix);
    INFO("instance " << s << " detected " << result.breakdown.total << " optimum " << best);
    CHECK(result.breakdown.total <= best + 1e-9);
    if (result.breakdown.total >= best - 1e-9) ++hits;
  }
  MESSAGE("optimum reached in " << hits << " of " << instances);
  CHECK(10 * hits >= 9 * instances);
}

TEST_CASE("one-step candidates") {
  const auto net = sample_network(checker_config({5, 6, 4}, {6, 5}, 3));
  const NetworkPair nets(net.matrix);
  const Labels truth{net.truth.row_labels, net.truth.col_labels};
  const auto step = get_largest_one_step_L(nets, truth);
  REQUIRE(step.candidates.size() == kOneStepCandidates);
  for (const auto& c : step.candidates) {
    CHECK(c.measure == doctest::Approx(nets.measure(c.labels)).epsilon(1e-12));
    CHECK(step.candidates[step.best].measure >= c.measure);
  }
  if (step.best_larger) {
    const auto& bl = step.candidates[*step.best_larger].labels;
    for (int n : community_sizes(canonical(bl.rows))) CHECK(n > 2);
    for (int n : community_sizes(canonical(bl.cols))) CHECK(n > 2);
  }
  CHECK(candidate_letter(0) == 'a');
  CHECK(candidate_letter(13) == 'n');
}

TEST_CASE("remove and regroup keep their contracts") {
  const auto net = sample_network(checker_config({6, 5, 7}, {5, 6}, 5));
  const NetworkPair nets(net.matrix);
  Labels perturbed{net.truth.row_labels, net.truth.col_labels};
  perturbed.rows[0] = 2;
  perturbed.cols[7] = 0;
  for (const auto& removal : {remove_nodes_a(nets, perturbed), remove_nodes_b(nets, perturbed)}) {
    CHECK(removal.previous.rows == canonical(perturbed.rows));
    CHECK(removal.measure == doctest::Approx(nets.measure(removal.labels)).epsilon(1e-12));
    for (auto u : removal.wrong_rows) CHECK(removal.labels.rows[u] >= removal.previous_row_communities);
    for (auto v : removal.wrong_cols) CHECK(removal.labels.cols[v] >= removal.previous_col_communities);
    for (bool ban : {false, true})
      for (const auto& c : {regroup_nodes_a(nets, removal, ban), regroup_nodes_b(nets, removal, ban)}) {
        CHECK(c.labels.rows == canonical(c.labels.rows));
        CHECK(c.labels.cols == canonical(c.labels.cols));
        CHECK(c.measure == doctest::Approx(nets.measure(c.labels)).epsilon(1e-12));
      }
  }
}

TEST_CASE("misplaced nodes are flagged") {
  // Two row communities with opposite orientation against one column
  // community: a row moved across correlates negatively with its new home.
  GeneratorConfig cfg;
  cfg.row_sizes = {8, 8};
  cfg.col_sizes = {10};
  cfg.blocks = {{0, 10, catalog()[0], 0}, {0, 10, hypothesis_set()[7], 0}};
  const auto net = sample_network(cfg);
  const NetworkPair nets(net.matrix);
  Labels labels{net.truth.row_labels, net.truth.col_labels};
  labels.rows[0] = 1;
  const auto removal = remove_nodes_a(nets, labels);
  CHECK(std::find(removal.wrong_rows.begin(), removal.wrong_rows.end(), 0u) != removal.wrong_rows.end());
  const auto fixed = fix_communities(nets, labels, nets.measure(labels), 50);
  CHECK(fixed.measure >= nets.measure(labels));
  CHECK(canonical(fixed.labels.rows) == canonical(net.truth.row_labels));
}

TEST_CASE("fix_communities never lowers the measure") {
  const auto m = testing::random_matrix(12, 10, 0.8, 9);
  const NetworkPair nets(m);
  const Labels start{testing::random_labels(12, 3, 9, 1), testing::random_labels(10, 3, 9, 2)};
  const double l0 = nets.measure(start);
  const auto fixed = fix_communities(nets, start, l0, 50);
  CHECK(fixed.measure >= l0);
  CHECK(fixed.measure == doctest::Approx(nets.measure(fixed.labels)).epsilon(1e-12));
  for (const auto& t : fixed.trace) CHECK(t.after > t.before);
}

TEST_CASE("detect") {
  SUBCASE("planted communities") {
    const auto net = sample_network(checker_config({8, 9}, {9, 8}, 11));
    const auto r = detect(net.matrix);
    CHECK(r.assignment.row_labels == canonical(net.truth.row_labels));
    CHECK(r.assignment.col_labels == canonical(net.truth.col_labels));
    CHECK(r.breakdown.total >= r.agglomeration_measure);
  }
  SUBCASE("deterministic") {
    const auto m = testing::random_matrix(15, 12, 0.6, 3);
    const auto a = detect(m), b = detect(m);
    CHECK(a.assignment == b.assignment);
    CHECK(a.breakdown.total == b.breakdown.total);
  }
  SUBCASE("row permutation") {
    const auto net = sample_network(checker_config({7, 8}, {8, 7}, 2));
    std::vector<std::size_t> perm(15), cols(15);
    std::iota(perm.begin(), perm.end(), 0);
    std::iota(cols.begin(), cols.end(), 0);
    std::reverse(perm.begin(), perm.end());
    const auto a = detect(net.matrix), b = detect(net.matrix.submatrix(perm, cols));
    std::vector<int> back(15);
    for (std::size_t k = 0; k < 15; ++k) back[perm[k]] = b.assignment.row_labels[k];
    CHECK(canonical(back) == a.assignment.row_labels);
    CHECK(b.breakdown.total == doctest::Approx(a.breakdown.total).epsilon(1e-12));
  }
  SUBCASE("warm start") {
    const auto net = sample_network(checker_config({8, 9}, {9, 8}, 4));
    DetectionConfig cfg;
    cfg.warm_rows = net.truth.row_labels;
    cfg.warm_cols = net.truth.col_labels;
    const auto r = detect(net.matrix, cfg);
    CHECK(r.breakdown.total >= measure_L(net.matrix, net.truth).total - 1e-9);
    cfg.warm_rows = std::vector<int>{0, 1};
    CHECK_THROWS_AS(detect(net.matrix, cfg), DomainError);
  }
  SUBCASE("degenerate inputs") {
    const auto one = detect(RatingsMatrix::dense(1, 1, {4}));
    CHECK(one.assignment.row_labels == std::vector<int>{0});
    CHECK(one.breakdown.total == 0.0);
    CHECK_THROWS_AS(detect(RatingsMatrix(3, 3)), InsufficientDataError);
  }
}

TEST_CASE("held-out assignment") {
  const auto m = testing::random_matrix(11, 9, 0.8, 21);
  const CommunityAssignment ca{testing::random_labels(11, 3, 21, 1), testing::random_labels(9, 2, 21, 2)};
  std::vector<double> edges(9, std::nan(""));
  for (std::size_t v = 0; v < 9; v += 2) edges[v] = static_cast<double>(v);

  // Brute force: append the node to every community and keep the best L.
  int expected = -1;
  double best = -1e300;
  for (int k = 0; k < ca.row_communities(); ++k) {
    RatingsMatrix aug(12, 9);
    for (std::size_t u = 0; u < 11; ++u)
      for (std::size_t v = 0; v < 9; ++v)
        if (m.observed(u, v)) aug.set(u, v, m.weight(u, v));
    for (std::size_t v = 0; v < 9; ++v)
      if (!std::isnan(edges[v])) aug.set(11, v, edges[v]);
    CommunityAssignment a = ca;
    a.row_labels.push_back(k);
    const double l = measure_L(aug, a).total;
    if (l > best) {
      best = l;
      expected = k;
    }
  }
  CHECK(assign_heldout(m, ca, edges, Side::kRows) == expected);

  std::vector<double> col_edges(11, std::nan(""));
  col_edges[3] = 5.0;
  col_edges[4] = 1.0;
  const int k = assign_heldout(m, ca, col_edges, Side::kCols);
  CHECK(k >= 0);
  CHECK(k < ca.col_communities());

  CHECK_THROWS_AS(assign_heldout(m, ca, std::vector<double>(9, std::nan("")), Side::kRows), ColdStartError);
  CHECK_THROWS_AS(assign_heldout(m, ca, std::vector<double>(4, 1.0), Side::kRows), DomainError);
}

TEST_CASE("trace serialisation") {
  const TraceStep t{2, "larger-b>c", 1.5, 2.5};
  const auto j = to_json(t);
  CHECK(j.at("cycle") == 2);
  CHECK(j.at("heuristic") == "larger-b>c");
}
