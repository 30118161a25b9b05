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
#ifndef NSM_EVALUATION_HPP_
#define NSM_EVALUATION_HPP_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "nsm/detection.hpp"
#include "nsm/estimation.hpp"
#include "nsm/ratings.hpp"
#include "nsm/transform.hpp"

namespace nsm {

double mse(std::span<const double> pred, std::span<const double> truth);
double rmse(std::span<const double> pred, std::span<const double> truth);
// Mean absolute error divided by (hi - lo).
double nmae(std::span<const double> pred, std::span<const double> truth, double lo, double hi);

enum class NmiNormalization { kArithmetic, kMin, kSqrt };

std::string to_string(NmiNormalization n);
NmiNormalization parse_nmi_normalization(const std::string& name);

// Normalized mutual information. Exactly 1 when the partitions agree up to
// relabeling (including two single-community partitions), 0 when exactly one
// of them is constant.
double nmi(const std::vector<int>& a, const std::vector<int>& b,
           NmiNormalization normalization = NmiNormalization::kArithmetic);

struct CvOptions {
  int folds = 3;
  std::uint64_t seed = 0;
  double range_lo = 0.0;
  double range_hi = 1.0;
  DetectionConfig detection;
  FitOptions fit;
  std::vector<Transformation> transformations{kAllTransformations.begin(),
                                              kAllTransformations.end()};
};

struct CvResult {
  Transformation best = Transformation::kNone;
  // Fold-mean NMAE per transformation, in the order tried.
  std::vector<std::pair<Transformation, double>> mean_nmae;
};

// Fold index per observed edge, in row-major order of the observed cells.
std::vector<int> assign_folds(const RatingsMatrix& m, int folds, std::uint64_t seed);

// For each transformation and fold: detect on the transformed remaining
// folds, fit on the untransformed remaining folds with those communities and
// score NMAE on the held fold. Ties resolve to the earliest transformation.
CvResult cross_validate_transformations(const RatingsMatrix& train, const CvOptions& options);

struct EvaluateOptions {
  bool cross_validate = false;
  int folds = 3;
  std::optional<std::pair<double, double>> range;  // default: observed range
  DetectionConfig detection;
  FitOptions fit;
  NmiNormalization nmi_normalization = NmiNormalization::kArithmetic;
  std::optional<CommunityAssignment> truth;
};

struct EvaluationReport {
  SplitSpec split;
  std::string transformation = "none";
  bool cross_validated = false;
  std::vector<std::pair<std::string, double>> cv_nmae;
  int row_communities = 0;
  int col_communities = 0;
  std::size_t train_edges = 0;
  std::size_t test_edges = 0;
  double range_lo = 0.0;
  double range_hi = 1.0;
  double mse = 0.0;
  double rmse = 0.0;
  double nmae = 0.0;
  std::optional<double> nmi_rows;
  std::optional<double> nmi_cols;
  std::string nmi_normalization = "arithmetic";
  double detection_measure = 0.0;
  int detection_cycles = 0;
  int cold_start_nodes = 0;
  std::vector<IterationDiagnostics> iterations;
  double wall_clock_seconds = 0.0;

  nlohmann::json to_json() const;
  static EvaluationReport from_json(const nlohmann::json& j);
  // Ignores wall_clock_seconds.
  bool operator==(const EvaluationReport&) const;
};

struct Evaluation {
  EvaluationReport report;
  CommunityAssignment assignment;
  // Predictions at the test cells.
  RatingsMatrix predictions;
};

// split -> (optional cross-validation) -> detect -> fit -> predict -> metrics.
// Node schemes detect on the non-held submatrix and place held nodes with
// assign_heldout; held nodes without edges go to the largest community.
Evaluation evaluate_pipeline(const RatingsMatrix& m, const SplitSpec& split_spec,
                             const EvaluateOptions& options = {});

}  // namespace nsm

#endif  // NSM_EVALUATION_HPP_
