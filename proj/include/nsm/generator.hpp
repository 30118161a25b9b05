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
#ifndef NSM_GENERATOR_HPP_
#define NSM_GENERATOR_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "nsm/hfunction.hpp"
#include "nsm/ratings.hpp"

namespace nsm {

struct BlockSpec {
  double lo = 0.0;  // G = uniform(lo, hi)
  double hi = 1.0;
  HFunctionSpec h;
  double sigma = 0.0;
};

enum class PsiMode { kEquallySpaced, kIidUniform };

struct GeneratorConfig {
  std::vector<int> row_sizes;
  std::vector<int> col_sizes;
  std::vector<BlockSpec> blocks;  // row-major K_r x K_c
  PsiMode psi_mode = PsiMode::kEquallySpaced;
  double psi_lo = 0.05;  // equally spaced range, inclusive
  double psi_hi = 0.95;
  std::uint64_t seed = 0;  // psi (iid mode) and noise

  const BlockSpec& block(std::size_t i, std::size_t j) const { return blocks[i * col_sizes.size() + j]; }
  // Throws DomainError when sizes, the block table or the psi range are invalid.
  void validate() const;

  nlohmann::json to_json() const;
  static GeneratorConfig from_json(const nlohmann::json& j);
};

struct SampledNetwork {
  RatingsMatrix matrix;
  CommunityAssignment truth;
  // psi_rows[u * K_c + j]: row u's sociability towards column community j.
  std::vector<double> psi_rows;
  // psi_cols[v * K_r + i]: column v's sociability towards row community i.
  std::vector<double> psi_cols;
};

// One weight: G^{-1}(Phi((Phi^{-1}(H(psi_u, psi_v)) + sigma eps) / sqrt(1 + sigma^2)))
// with eps = Phi^{-1}(noise_uniform) and G uniform on [lo, hi].
double edge_weight(const BlockSpec& b, double psi_u, double psi_v, double noise_uniform);

// Nodes are laid out community by community; a node uses the same psi
// towards every opposite community.
SampledNetwork sample_network(const GeneratorConfig& cfg);

// 4 x 3 communities of 73 nodes, psi equally spaced in [.05, .95], sigma 0.
// Diagonal blocks: positive gamma(1/2) H, U(0, 200). Blocks with |i - j| = 1:
// negative, U(0, 100). Others: negative, U(0, 50).
GeneratorConfig canonical_config();

// Hides each observed edge independently with probability p_missing.
RatingsMatrix mcar_mask(const RatingsMatrix& m, double p_missing, std::uint64_t seed);

// Replicates every row and column factor times (copies are adjacent).
RatingsMatrix duplicate_nodes(const RatingsMatrix& m, int factor);
std::vector<int> duplicate_labels(const std::vector<int>& labels, int factor);

}  // namespace nsm

#endif  // NSM_GENERATOR_HPP_
