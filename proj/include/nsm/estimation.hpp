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
#ifndef NSM_ESTIMATION_HPP_
#define NSM_ESTIMATION_HPP_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "nsm/hfunction.hpp"
#include "nsm/ratings.hpp"

namespace nsm {

// Empirical weight distribution of one block. cdf() maps a weight to its
// midrank divided by (m + 1); quantile() interpolates linearly between the
// points (k / (m + 1), w_(k)) and clamps outside them.
class EmpiricalDistribution {
 public:
  EmpiricalDistribution() = default;
  // Throws InsufficientDataError("unfittable block") when weights is empty.
  explicit EmpiricalDistribution(std::vector<double> weights);

  std::size_t size() const { return sorted_.size(); }
  const std::vector<double>& sorted() const { return sorted_; }
  double min() const { return sorted_.front(); }
  double max() const { return sorted_.back(); }
  double median() const { return quantile(0.5); }

  double cdf(double w) const;
  double quantile(double p) const;

 private:
  std::vector<double> sorted_;
};

EmpiricalDistribution fit_empirical_G(std::vector<double> weights);

// Dense view of one block: NaN marks an unobserved cell.
struct BlockData {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;

  double at(std::size_t r, std::size_t c) const { return values[r * cols + c]; }
  std::vector<double> observed() const;
};

enum class PsiAggregate { kMean, kSum };

struct PsiEstimate {
  std::vector<double> row;
  std::vector<double> col;
  // Mean (or sum) of Phi^{-1}(G(w)) per node; NaN when flagged.
  std::vector<double> row_score;
  std::vector<double> col_score;
  // Nodes with no observed edge in the block; their psi is 1/2.
  std::vector<bool> row_flagged;
  std::vector<bool> col_flagged;
};

// Ranks node scores within each side of the block: psi = rank / (n + 1),
// where n counts the nodes with at least one edge. Ties are broken by
// position so that psi values on a side are distinct.
PsiEstimate estimate_psi(const BlockData& block, const EmpiricalDistribution& g,
                         PsiAggregate aggregate = PsiAggregate::kMean);

// Optimal shrink for the least-squares fit of a by c * b with c in (0, 1].
struct ShrinkFit {
  double c = 1.0;
  double sigma = 0.0;
  double loss = 0.0;
  bool pure_noise = false;
};

inline constexpr double kPureNoiseSigma = 1e6;

ShrinkFit fit_shrink(std::span<const double> a, std::span<const double> b);

struct HSigmaFit {
  std::size_t index = 0;  // position in the hypothesis list
  HFunctionSpec h;
  ShrinkFit shrink;
  std::vector<double> losses;  // one per hypothesis, at its own optimal sigma
};

// Minimises sum over observed cells of
//   (Phi^{-1}(G(W_uv)) - c Phi^{-1}(H(psi_u, psi_v)))^2
// over the hypotheses and c = 1 / sqrt(1 + sigma^2). Ties go to the first
// hypothesis.
HSigmaFit fit_H_sigma(const BlockData& block, const PsiEstimate& psi,
                      const EmpiricalDistribution& g, std::span<const HFunctionSpec> hypotheses);

struct BlockFit {
  std::vector<std::size_t> row_members;  // global node indices, ascending
  std::vector<std::size_t> col_members;
  // When true no model was fitted and every prediction is fallback_value.
  bool fallback = false;
  double fallback_value = 0.0;
  EmpiricalDistribution g;
  std::vector<double> psi_row;
  std::vector<double> psi_col;
  // Training scores of ranked nodes, used to place new nodes.
  std::vector<double> score_row;
  std::vector<double> score_col;
  HFunctionSpec h;
  double sigma = 0.0;
  double c = 1.0;
  double loss = 0.0;
  bool pure_noise = false;
};

// G^{-1}(Phi(c Phi^{-1}(H(psi_u, psi_v)))).
double predict_value(const BlockFit& block, double psi_u, double psi_v);

struct IterationDiagnostics {
  int iteration = 0;
  // Mean absolute change of imputed cells against the previous iteration;
  // 0 for the first iteration.
  double mean_abs_change = 0.0;
  int unfittable_blocks = 0;
};

struct ModelFit {
  CommunityAssignment assignment;
  int row_communities = 0;
  int col_communities = 0;
  std::vector<BlockFit> blocks;  // row-major K_r x K_c
  std::vector<std::size_t> row_position;  // index of each row inside its community
  std::vector<std::size_t> col_position;
  PsiAggregate aggregate = PsiAggregate::kMean;
  std::vector<IterationDiagnostics> diagnostics;

  const BlockFit& block(int i, int j) const {
    return blocks[static_cast<std::size_t>(i * col_communities + j)];
  }
  BlockFit& block(int i, int j) { return blocks[static_cast<std::size_t>(i * col_communities + j)]; }

  nlohmann::json to_json() const;
  static ModelFit from_json(const nlohmann::json& j);
};

double predict_edge(const ModelFit& fit, std::size_t u, std::size_t v);

struct FitOptions {
  int iterations = 10;
  PsiAggregate aggregate = PsiAggregate::kMean;
  bool include_auxiliary = false;
  // Stop once the mean absolute change drops below this; 0 disables.
  double tolerance = 0.0;
  // Nodes kept out of training entirely (held-out nodes). Their psi stays
  // 1/2 until placed with place_heldout_psi. Empty means none.
  std::vector<bool> frozen_rows;
  std::vector<bool> frozen_cols;
};

struct FitResult {
  ModelFit model;
  RatingsMatrix completed;
};

// Fits every block, imputes missing cells and refits on observed plus imputed
// values. Observed values are never overwritten.
FitResult fit_model(const RatingsMatrix& m, const CommunityAssignment& ca,
                    const FitOptions& options = {});

// Places each held node inside every block's training ranking by the midrank
// of its score computed from the given edges (typically the revealed edges of
// held-out nodes). Nodes without such edges keep psi = 1/2.
void place_heldout_psi(ModelFit& fit, const RatingsMatrix& edges, const std::vector<bool>& held_rows,
                       const std::vector<bool>& held_cols);

}  // namespace nsm

#endif  // NSM_ESTIMATION_HPP_
