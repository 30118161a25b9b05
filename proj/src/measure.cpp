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
#include "nsm/measure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nsm/error.hpp"

namespace nsm {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Spreads below this are rounding noise between correlations that are equal
// in exact arithmetic; sqrt(SD) would magnify them to ~1e-8.
constexpr double kSdFloor = 1e-12;

// Two-pass Pearson correlation. Constant vectors are detected exactly.
Correlation correlate(const double* xs, const double* ys, std::size_t n,
                      std::size_t min_pairs) {
  if (n < min_pairs || n < 2) return {};
  double mx = 0.0, my = 0.0;
  double xmin = xs[0], xmax = xs[0], ymin = ys[0], ymax = ys[0];
  for (std::size_t k = 0; k < n; ++k) {
    mx += xs[k];
    my += ys[k];
    xmin = std::min(xmin, xs[k]);
    xmax = std::max(xmax, xs[k]);
    ymin = std::min(ymin, ys[k]);
    ymax = std::max(ymax, ys[k]);
  }
  if (xmin == xmax || ymin == ymax) return {};
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double dx = xs[k] - mx, dy = ys[k] - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (!(sxx > 0.0 && syy > 0.0)) return {};
  return {std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0), false};
}

struct MeanSd {
  double mean = 0.0;
  double sd = 0.0;
};

MeanSd mean_sd(const double* values, std::size_t stride, const std::size_t* members,
               std::size_t count) {
  if (count == 0) return {};
  double sum = 0.0;
  for (std::size_t k = 0; k < count; ++k) sum += values[members[k] * stride];
  const double mean = sum / static_cast<double>(count);
  double ss = 0.0;
  for (std::size_t k = 0; k < count; ++k) {
    const double d = values[members[k] * stride] - mean;
    ss += d * d;
  }
  double sd = std::sqrt(ss / static_cast<double>(count));
  if (sd < kSdFloor) sd = 0.0;
  return {mean, sd};
}

// Communities of one side, restricted to the "active" ones that take part in
// the computation, with member lists in ascending node order.
struct SideIndex {
  std::vector<int> active_of_node;      // active index per node, -1 if inactive
  std::vector<std::size_t> offsets;     // active index -> range in members
  std::vector<std::size_t> members;
  std::vector<int> sizes;               // per active community
  int total_communities = 0;

  std::size_t count() const { return sizes.size(); }
  const std::size_t* begin(std::size_t a) const { return members.data() + offsets[a]; }
  std::size_t size(std::size_t a) const { return offsets[a + 1] - offsets[a]; }
};

// Compacts ids in ascending order. With all == false only communities with
// more than two members are active.
void index_side(std::span<const int> labels, bool all, std::vector<int>& remap,
                std::vector<int>& full_sizes, SideIndex& out) {
  int max_id = -1;
  for (int l : labels) {
    if (l < 0) throw DomainError("negative community id");
    max_id = std::max(max_id, l);
  }
  full_sizes.assign(static_cast<std::size_t>(max_id + 1), 0);
  for (int l : labels) ++full_sizes[static_cast<std::size_t>(l)];
  remap.assign(full_sizes.size(), -1);
  int active = 0, total = 0;
  for (std::size_t id = 0; id < full_sizes.size(); ++id) {
    if (full_sizes[id] == 0) continue;
    ++total;
    if (all || full_sizes[id] > 2) remap[id] = active++;
  }
  out.total_communities = total;
  out.sizes.assign(static_cast<std::size_t>(active), 0);
  out.active_of_node.resize(labels.size());
  for (std::size_t n = 0; n < labels.size(); ++n) {
    const int a = remap[static_cast<std::size_t>(labels[n])];
    out.active_of_node[n] = a;
    if (a >= 0) ++out.sizes[static_cast<std::size_t>(a)];
  }
  out.offsets.assign(out.sizes.size() + 1, 0);
  for (std::size_t a = 0; a < out.sizes.size(); ++a)
    out.offsets[a + 1] = out.offsets[a] + static_cast<std::size_t>(out.sizes[a]);
  out.members.resize(out.offsets.back());
  std::vector<std::size_t> cursor(out.offsets.begin(), out.offsets.end() - 1);
  for (std::size_t n = 0; n < labels.size(); ++n) {
    const int a = out.active_of_node[n];
    if (a >= 0) out.members[cursor[static_cast<std::size_t>(a)]++] = n;
  }
}

struct Workspace {
  std::vector<int> remap_r, remap_c, full_r, full_c;
  SideIndex rows, cols;
  std::vector<double> row_agg;   // active row community x n_c
  std::vector<double> col_agg;   // active col community x n_r
  std::vector<double> row_corr;  // n_r x active col communities
  std::vector<double> col_corr;  // n_c x active row communities
  std::vector<double> block_obs;
  std::vector<double> xs, ys;
};

Workspace& workspace() {
  thread_local Workspace ws;
  return ws;
}

// Fills the aggregates and correlation tables for the active communities.
void compute_correlations(const BipartiteNetwork& net, std::span<const int> row_labels,
                          std::span<const int> col_labels, bool all, Workspace& ws) {
  const std::size_t nr = net.rows(), nc = net.cols();
  if (row_labels.size() != nr || col_labels.size() != nc)
    throw DomainError("label vector length does not match the matrix");
  index_side(row_labels, all, ws.remap_r, ws.full_r, ws.rows);
  index_side(col_labels, all, ws.remap_c, ws.full_c, ws.cols);
  const std::size_t kr = ws.rows.count(), kc = ws.cols.count();

  ws.row_agg.assign(kr * nc, 0.0);
  ws.col_agg.assign(kc * nr, 0.0);
  for (std::size_t u = 0; u < nr; ++u) {
    const int ru = ws.rows.active_of_node[u];
    const double* w = net.row(u);
    for (std::size_t v = 0; v < nc; ++v) {
      if (std::isnan(w[v])) continue;
      if (ru >= 0) ws.row_agg[static_cast<std::size_t>(ru) * nc + v] += w[v];
      const int cv = ws.cols.active_of_node[v];
      if (cv >= 0) ws.col_agg[static_cast<std::size_t>(cv) * nr + u] += w[v];
    }
  }

  ws.row_corr.assign(nr * kc, 0.0);
  ws.col_corr.assign(nc * kr, 0.0);
  ws.block_obs.assign(kr * kc, 0.0);
  ws.xs.resize(std::max(nr, nc));
  ws.ys.resize(std::max(nr, nc));

  for (std::size_t u = 0; u < nr; ++u) {
    const int ru = ws.rows.active_of_node[u];
    if (ru < 0) continue;
    const double* w = net.row(u);
    const double* degree = &ws.row_agg[static_cast<std::size_t>(ru) * nc];
    for (std::size_t j = 0; j < kc; ++j) {
      std::size_t n = 0;
      const std::size_t* members = ws.cols.begin(j);
      for (std::size_t k = 0, m = ws.cols.size(j); k < m; ++k) {
        const std::size_t v = members[k];
        if (std::isnan(w[v])) continue;
        ws.xs[n] = degree[v];
        ws.ys[n] = w[v];
        ++n;
      }
      ws.row_corr[u * kc + j] = correlate(ws.xs.data(), ws.ys.data(), n, 2).value;
      ws.block_obs[static_cast<std::size_t>(ru) * kc + j] += static_cast<double>(n);
    }
  }

  for (std::size_t v = 0; v < nc; ++v) {
    const int cv = ws.cols.active_of_node[v];
    if (cv < 0) continue;
    const double* w = net.col(v);
    const double* degree = &ws.col_agg[static_cast<std::size_t>(cv) * nr];
    for (std::size_t i = 0; i < kr; ++i) {
      std::size_t n = 0;
      const std::size_t* members = ws.rows.begin(i);
      for (std::size_t k = 0, m = ws.rows.size(i); k < m; ++k) {
        const std::size_t u = members[k];
        if (std::isnan(w[u])) continue;
        ws.xs[n] = degree[u];
        ws.ys[n] = w[u];
        ++n;
      }
      ws.col_corr[v * kr + i] = correlate(ws.xs.data(), ws.ys.data(), n, 2).value;
    }
  }
}

struct BlockTerms {
  MeanSd rows, cols;
  double density = 0.0;
  double contribution = 0.0;
};

BlockTerms block_terms(const Workspace& ws, std::size_t i, std::size_t j) {
  const std::size_t kr = ws.rows.count(), kc = ws.cols.count();
  BlockTerms t;
  t.rows = mean_sd(ws.row_corr.data() + j, kc, ws.rows.begin(i), ws.rows.size(i));
  t.cols = mean_sd(ws.col_corr.data() + i, kr, ws.cols.begin(j), ws.cols.size(j));
  const double ni = static_cast<double>(ws.rows.size(i));
  const double nj = static_cast<double>(ws.cols.size(j));
  t.density = ws.block_obs[i * kc + j] / (ni * nj);
  const double size_factor = std::max(0.0, ni - 2.0) * std::max(0.0, nj - 2.0);
  t.contribution = (t.rows.mean * (1.0 - std::sqrt(t.rows.sd)) +
                    t.cols.mean * (1.0 - std::sqrt(t.cols.sd))) *
                   size_factor * t.density;
  return t;
}

}  // namespace

BipartiteNetwork::BipartiteNetwork(const RatingsMatrix& m)
    : rows_(m.rows()), cols_(m.cols()), by_row_(m.rows() * m.cols(), kNaN),
      by_col_(m.rows() * m.cols(), kNaN) {
  for (std::size_t u = 0; u < rows_; ++u)
    for (std::size_t v = 0; v < cols_; ++v)
      if (m.observed(u, v)) {
        by_row_[u * cols_ + v] = m.weight(u, v);
        by_col_[v * rows_ + u] = m.weight(u, v);
      }
}

BipartiteNetwork BipartiteNetwork::transposed() const {
  BipartiteNetwork t;
  t.rows_ = cols_;
  t.cols_ = rows_;
  t.by_row_ = by_col_;
  t.by_col_ = by_row_;
  return t;
}

double pairwise_correlation(const double* a, const double* b, std::size_t n,
                            std::size_t min_pairs) {
  auto& ws = workspace();
  ws.xs.resize(std::max(ws.xs.size(), n));
  ws.ys.resize(std::max(ws.ys.size(), n));
  std::size_t m = 0;
  for (std::size_t k = 0; k < n; ++k) {
    if (std::isnan(a[k]) || std::isnan(b[k])) continue;
    ws.xs[m] = a[k];
    ws.ys[m] = b[k];
    ++m;
  }
  return correlate(ws.xs.data(), ws.ys.data(), m, min_pairs).value;
}

LocalDegree local_degree(const RatingsMatrix& m, const CommunityAssignment& ca, int i,
                         std::size_t v) {
  LocalDegree d;
  for (std::size_t u = 0; u < m.rows(); ++u) {
    if (ca.row_labels[u] != i || !m.observed(u, v)) continue;
    d.value += m.weight(u, v);
    d.empty = false;
  }
  return d;
}

Correlation node_community_correlation(const RatingsMatrix& m, const CommunityAssignment& ca,
                                       std::size_t u, int j) {
  const int i = ca.row_labels[u];
  std::vector<double> xs, ys;
  for (std::size_t v = 0; v < m.cols(); ++v) {
    if (ca.col_labels[v] != j || !m.observed(u, v)) continue;
    xs.push_back(local_degree(m, ca, i, v).value);
    ys.push_back(m.weight(u, v));
  }
  return correlate(xs.data(), ys.data(), xs.size(), 2);
}

Correlation column_community_correlation(const RatingsMatrix& m,
                                         const CommunityAssignment& ca, std::size_t v, int i) {
  const CommunityAssignment swapped{ca.col_labels, ca.row_labels};
  return node_community_correlation(m.transposed(), swapped, v, i);
}

double measure_total(const BipartiteNetwork& net, std::span<const int> row_labels,
                     std::span<const int> col_labels) {
  auto& ws = workspace();
  compute_correlations(net, row_labels, col_labels, false, ws);
  double total = 0.0;
  for (std::size_t i = 0; i < ws.rows.count(); ++i)
    for (std::size_t j = 0; j < ws.cols.count(); ++j) total += block_terms(ws, i, j).contribution;
  return total;
}

MeasureBreakdown measure_breakdown(const BipartiteNetwork& net, std::span<const int> row_labels,
                                   std::span<const int> col_labels) {
  auto& ws = workspace();
  compute_correlations(net, row_labels, col_labels, true, ws);
  const std::size_t kr = ws.rows.count(), kc = ws.cols.count();
  MeasureBreakdown b;
  b.row_communities = static_cast<int>(kr);
  b.col_communities = static_cast<int>(kc);
  for (auto* table : {&b.per_block, &b.mean_corr_rows, &b.sd_corr_rows, &b.mean_corr_cols,
                      &b.sd_corr_cols, &b.density})
    table->assign(kr * kc, 0.0);
  for (std::size_t i = 0; i < kr; ++i)
    for (std::size_t j = 0; j < kc; ++j) {
      const auto t = block_terms(ws, i, j);
      const std::size_t k = i * kc + j;
      b.per_block[k] = t.contribution;
      b.mean_corr_rows[k] = t.rows.mean;
      b.sd_corr_rows[k] = t.rows.sd;
      b.mean_corr_cols[k] = t.cols.mean;
      b.sd_corr_cols[k] = t.cols.sd;
      b.density[k] = t.density;
      b.total += t.contribution;
    }
  return b;
}

MeasureBreakdown measure_L(const RatingsMatrix& m, const CommunityAssignment& ca) {
  ca.validate();
  return measure_breakdown(BipartiteNetwork(m), ca.row_labels, ca.col_labels);
}

CorrelationTables correlation_tables(const BipartiteNetwork& net,
                                     std::span<const int> row_labels,
                                     std::span<const int> col_labels) {
  auto& ws = workspace();
  compute_correlations(net, row_labels, col_labels, true, ws);
  return {ws.row_corr, ws.col_corr, static_cast<int>(ws.rows.count()),
          static_cast<int>(ws.cols.count())};
}

nlohmann::json MeasureBreakdown::to_json() const {
  nlohmann::json j;
  j["total"] = total;
  j["row_communities"] = row_communities;
  j["col_communities"] = col_communities;
  auto table = [&](const std::vector<double>& t) {
    nlohmann::json rows = nlohmann::json::array();
    for (int i = 0; i < row_communities; ++i) {
      auto first = t.begin() + static_cast<std::ptrdiff_t>(i) * col_communities;
      rows.push_back(std::vector<double>(first, first + col_communities));
    }
    return rows;
  };
  j["per_block"] = table(per_block);
  j["mean_corr_rows"] = table(mean_corr_rows);
  j["sd_corr_rows"] = table(sd_corr_rows);
  j["mean_corr_cols"] = table(mean_corr_cols);
  j["sd_corr_cols"] = table(sd_corr_cols);
  j["density"] = table(density);
  return j;
}

}  // namespace nsm
