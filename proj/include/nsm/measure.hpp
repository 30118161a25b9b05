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
#ifndef NSM_MEASURE_HPP_
#define NSM_MEASURE_HPP_

#include <cstddef>
#include <span>
#include <vector>

#include <json.hpp>

#include "nsm/ratings.hpp"

namespace nsm {

// Read-only view of a ratings matrix in both row-major and column-major
// layout, with NaN at unobserved positions. Shared by all measure and
// detection routines.
class BipartiteNetwork {
 public:
  explicit BipartiteNetwork(const RatingsMatrix& m);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  // NaN when unobserved.
  double at(std::size_t u, std::size_t v) const { return by_row_[u * cols_ + v]; }
  const double* row(std::size_t u) const { return &by_row_[u * cols_]; }
  const double* col(std::size_t v) const { return &by_col_[v * rows_]; }
  // Same network with the roles of rows and columns swapped.
  BipartiteNetwork transposed() const;

 private:
  BipartiteNetwork() = default;
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> by_row_;
  std::vector<double> by_col_;
};

struct LocalDegree {
  double value = 0.0;
  bool empty = true;  // no observed edge from the community to the node
};

// Sum of observed weights from rows in community i to column v.
LocalDegree local_degree(const RatingsMatrix& m, const CommunityAssignment& ca, int i,
                         std::size_t v);

struct Correlation {
  double value = 0.0;
  bool degenerate = true;  // < 2 complete pairs or a constant vector; value 0
};

// Pearson correlation over v in column community j with W_uv observed, between
// W_uv and the local degree of v with respect to u's own row community.
Correlation node_community_correlation(const RatingsMatrix& m, const CommunityAssignment& ca,
                                       std::size_t u, int j);
// Column-node analogue: v against row community i.
Correlation column_community_correlation(const RatingsMatrix& m,
                                         const CommunityAssignment& ca, std::size_t v, int i);

struct MeasureBreakdown {
  double total = 0.0;
  int row_communities = 0;
  int col_communities = 0;
  // Row-major K_r x K_c tables.
  std::vector<double> per_block;
  std::vector<double> mean_corr_rows;
  std::vector<double> sd_corr_rows;
  std::vector<double> mean_corr_cols;
  std::vector<double> sd_corr_cols;
  std::vector<double> density;

  nlohmann::json to_json() const;
};

MeasureBreakdown measure_L(const RatingsMatrix& m, const CommunityAssignment& ca);
MeasureBreakdown measure_breakdown(const BipartiteNetwork& net, std::span<const int> row_labels,
                                   std::span<const int> col_labels);

// Total L only. Labels may be arbitrary non-negative ids (gaps allowed).
// Blocks with a side of size <= 2 are skipped since they contribute 0.
double measure_total(const BipartiteNetwork& net, std::span<const int> row_labels,
                     std::span<const int> col_labels);

// Node-community correlation tables. Labels must be contiguous 0..K-1.
// rows: n_r x K_c, entry (u, j) = C for row u against column community j.
// cols: n_c x K_r.
struct CorrelationTables {
  std::vector<double> rows;
  std::vector<double> cols;
  int row_communities = 0;
  int col_communities = 0;
};
CorrelationTables correlation_tables(const BipartiteNetwork& net,
                                     std::span<const int> row_labels,
                                     std::span<const int> col_labels);

// Pairwise-complete Pearson correlation of two equally long vectors with NaN
// marking missing entries. Returns 0 when fewer than min_pairs complete pairs
// exist or either side is constant.
double pairwise_correlation(const double* a, const double* b, std::size_t n,
                            std::size_t min_pairs);

}  // namespace nsm

#endif  // NSM_MEASURE_HPP_
