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
#ifndef NSM_RATINGS_HPP_
#define NSM_RATINGS_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace nsm {

// A dense weighted bipartite network with an observation mask. Rows are users
// and columns are items. Weights at unobserved positions are stored as NaN and
// are only reachable through the masked accessors.
class RatingsMatrix {
 public:
  RatingsMatrix() = default;
  // All entries unobserved.
  RatingsMatrix(std::size_t rows, std::size_t cols);

  // Fully observed matrix from row-major values.
  static RatingsMatrix dense(std::size_t rows, std::size_t cols,
                             std::vector<double> values);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  bool observed(std::size_t u, std::size_t v) const {
    return mask_[u * cols_ + v] != 0;
  }
  // Precondition: observed(u, v).
  double weight(std::size_t u, std::size_t v) const {
    return values_[u * cols_ + v];
  }
  std::optional<double> get(std::size_t u, std::size_t v) const;

  // Throws DomainError for non-finite weights.
  void set(std::size_t u, std::size_t v, double w);
  void hide(std::size_t u, std::size_t v);

  std::size_t observed_count() const;
  double density() const;
  bool fully_observed() const;

  RatingsMatrix transposed() const;
  RatingsMatrix submatrix(const std::vector<std::size_t>& rows,
                          const std::vector<std::size_t>& cols) const;

  const std::vector<std::uint8_t>& mask() const { return mask_; }
  // Observed weights in row-major order.
  std::vector<double> observed_values() const;

  bool operator==(const RatingsMatrix& other) const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> values_;
  std::vector<std::uint8_t> mask_;
};

// Row and column community labels. Ids are 0-based and contiguous in memory;
// label files on disk use 1-based ids.
struct CommunityAssignment {
  std::vector<int> row_labels;
  std::vector<int> col_labels;

  int row_communities() const;
  int col_communities() const;
  // Throws DomainError unless both label vectors are contiguous 0..K-1.
  void validate() const;
  bool operator==(const CommunityAssignment&) const = default;
};

// Renumbers arbitrary non-negative labels to 0..K-1 in order of first
// appearance. Returns K.
int compact_labels(std::vector<int>& labels);
std::vector<int> community_sizes(const std::vector<int>& labels);

struct CsvOptions {
  std::string missing_token;  // empty cell by default
  bool header = false;
};

RatingsMatrix parse_csv(const std::string& text, const CsvOptions& options = {});
RatingsMatrix load_csv(const std::string& path, const CsvOptions& options = {});
// Observed values are written with 17 significant digits.
std::string format_csv(const RatingsMatrix& m, const CsvOptions& options = {});
void write_csv(const std::string& path, const RatingsMatrix& m,
               const CsvOptions& options = {});
// 0/1 observation mask, for audit.
void write_mask_csv(const std::string& path, const RatingsMatrix& m);

// Label files: one "node,community" line per node, both 1-based.
std::vector<int> load_labels(const std::string& path);
void write_labels(const std::string& path, const std::vector<int>& labels);

enum class Side { kRows, kCols };

enum class SplitScheme { kHoldEdges, kHoldNodes, kHoldNodesAndEdges };

struct SplitSpec {
  SplitScheme scheme = SplitScheme::kHoldEdges;
  double fraction = 0.25;
  std::uint64_t seed = 0;
};

std::string to_string(SplitScheme scheme);
SplitScheme parse_split_scheme(const std::string& name);

struct Split {
  RatingsMatrix train;
  RatingsMatrix test;
  // Held-out nodes' edges that stay visible for community assignment but are
  // never used for training (hold-nodes-and-edges only).
  RatingsMatrix revealed;
  std::vector<bool> held_rows;
  std::vector<bool> held_cols;
  // Non-held nodes left with no training edges.
  std::vector<std::size_t> empty_rows;
  std::vector<std::size_t> empty_cols;
};

Split split(const RatingsMatrix& m, const SplitSpec& spec);

// Fraction of observed cells in the block (row community i, col community j).
double subnetwork_density(const RatingsMatrix& m, const CommunityAssignment& ca,
                          int i, int j);

}  // namespace nsm

#endif  // NSM_RATINGS_HPP_
