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
#include "nsm/evaluation.hpp"

#include <algorithm>
#include <chrono>
#include <limits>
#include <cmath>
#include <map>
#include <numeric>

#include "nsm/error.hpp"
#include "nsm/log.hpp"
#include "nsm/rng.hpp"

namespace nsm {
namespace {

void check_lengths(std::span<const double> pred, std::span<const double> truth) {
  if (pred.size() != truth.size()) throw DomainError("metric: length mismatch");
  if (pred.empty()) throw DomainError("metric: empty input");
}

double entropy(const std::map<int, std::size_t>& counts, double n) {
  double h = 0.0;
  for (const auto& [id, c] : counts) {
    const double p = static_cast<double>(c) / n;
    h -= p * std::log(p);
  }
  return h;
}

// True when a and b induce the same partition.
bool same_partition(const std::vector<int>& a, const std::vector<int>& b) {
  std::map<int, int> ab, ba;
  for (std::size_t k = 0; k < a.size(); ++k) {
    auto [i, fresh_a] = ab.try_emplace(a[k], b[k]);
    auto [j, fresh_b] = ba.try_emplace(b[k], a[k]);
    if (i->second != b[k] || j->second != a[k]) return false;
  }
  return true;
}

std::vector<std::size_t> kept(const std::vector<bool>& held) {
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < held.size(); ++k)
    if (!held[k]) out.push_back(k);
  return out;
}

std::pair<double, double> observed_range(const RatingsMatrix& m) {
  const auto v = m.observed_values();
  if (v.empty()) throw InsufficientDataError("evaluate: no observed edges");
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  return {*lo, *hi > *lo ? *hi : *lo + 1.0};
}

int largest_community(const std::vector<int>& labels) {
  const auto sizes = community_sizes(labels);
  return static_cast<int>(std::max_element(sizes.begin(), sizes.end()) - sizes.begin());
}

}  // namespace

double mse(std::span<const double> pred, std::span<const double> truth) {
  check_lengths(pred, truth);
  double s = 0.0;
  for (std::size_t k = 0; k < pred.size(); ++k) s += (pred[k] - truth[k]) * (pred[k] - truth[k]);
  return s / static_cast<double>(pred.size());
}

double rmse(std::span<const double> pred, std::span<const double> truth) {
  return std::sqrt(mse(pred, truth));
}

double nmae(std::span<const double> pred, std::span<const double> truth, double lo, double hi) {
  check_lengths(pred, truth);
  if (!(hi > lo)) throw DomainError("nmae: range needs hi > lo");
  double s = 0.0;
  for (std::size_t k = 0; k < pred.size(); ++k) s += std::abs(pred[k] - truth[k]);
  return s / static_cast<double>(pred.size()) / (hi - lo);
}

std::string to_string(NmiNormalization n) {
  switch (n) {
    case NmiNormalization::kArithmetic: return "arithmetic";
    case NmiNormalization::kMin: return "min";
    case NmiNormalization::kSqrt: return "sqrt";
  }
  return "arithmetic";
}

NmiNormalization parse_nmi_normalization(const std::string& name) {
  if (name == "arithmetic") return NmiNormalization::kArithmetic;
  if (name == "min") return NmiNormalization::kMin;
  if (name == "sqrt") return NmiNormalization::kSqrt;
  throw DomainError("unknown NMI normalization '" + name + "'");
}

double nmi(const std::vector<int>& a_in, const std::vector<int>& b_in,
           NmiNormalization normalization) {
  if (a_in.size() != b_in.size()) throw DomainError("nmi: length mismatch");
  if (a_in.empty()) throw DomainError("nmi: empty input");
  if (same_partition(a_in, b_in)) return 1.0;
  // Fixed argument order makes the floating-point evaluation symmetric.
  const bool swap = b_in < a_in;
  const auto& a = swap ? b_in : a_in;
  const auto& b = swap ? a_in : b_in;
  const double n = static_cast<double>(a.size());
  std::map<int, std::size_t> ca, cb;
  std::map<std::pair<int, int>, std::size_t> joint;
  for (std::size_t k = 0; k < a.size(); ++k) {
    ++ca[a[k]];
    ++cb[b[k]];
    ++joint[{a[k], b[k]}];
  }
  const double ha = entropy(ca, n), hb = entropy(cb, n);
  if (ha == 0.0 || hb == 0.0) return 0.0;
  double mi = 0.0;
  for (const auto& [key, c] : joint) {
    const double pxy = static_cast<double>(c) / n;
    const double px = static_cast<double>(ca[key.first]) / n;
    const double py = static_cast<double>(cb[key.second]) / n;
    mi += pxy * std::log(pxy / (px * py));
  }
  double denom = 0.5 * (ha + hb);
  if (normalization == NmiNormalization::kMin) denom = std::min(ha, hb);
  if (normalization == NmiNormalization::kSqrt) denom = std::sqrt(ha * hb);
  return std::clamp(mi / denom, 0.0, 1.0);
}

std::vector<int> assign_folds(const RatingsMatrix& m, int folds, std::uint64_t seed) {
  if (folds < 2) throw DomainError("cross-validation needs at least 2 folds");
  const std::size_t n = m.observed_count();
  if (n < 3 * static_cast<std::size_t>(folds))
    throw InsufficientDataError("cross-validation: " + std::to_string(n) +
                                " observed edges, need at least " + std::to_string(3 * folds));
  const CounterRng rng(seed, streams::kFolds);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::vector<std::uint64_t> key(n);
  for (std::size_t k = 0; k < n; ++k) key[k] = rng.bits(k);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return key[x] < key[y]; });
  std::vector<int> fold(n);
  for (std::size_t p = 0; p < n; ++p) fold[order[p]] = static_cast<int>(p % static_cast<std::size_t>(folds));
  return fold;
}

CvResult cross_validate_transformations(const RatingsMatrix& train, const CvOptions& options) {
  if (options.transformations.empty()) throw DomainError("cross-validation: no transformations");
  const auto fold = assign_folds(train, options.folds, options.seed);
  std::vector<std::pair<std::size_t, std::size_t>> cells;
  for (std::size_t u = 0; u < train.rows(); ++u)
    for (std::size_t v = 0; v < train.cols(); ++v)
      if (train.observed(u, v)) cells.emplace_back(u, v);

  CvResult result;
  double best = 0.0;
  for (auto t : options.transformations) {
    double total = 0.0;
    for (int f = 0; f < options.folds; ++f) {
      RatingsMatrix remaining = train;
      std::vector<double> truth;
      for (std::size_t k = 0; k < cells.size(); ++k)
        if (fold[k] == f) {
          remaining.hide(cells[k].first, cells[k].second);
          truth.push_back(train.weight(cells[k].first, cells[k].second));
        }
      const auto transformed = apply_transformation(remaining, t);
      const auto detected = detect(transformed.matrix, options.detection);
      const auto fitted = fit_model(remaining, detected.assignment, options.fit);
      std::vector<double> pred;
      for (std::size_t k = 0; k < cells.size(); ++k)
        if (fold[k] == f) pred.push_back(predict_edge(fitted.model, cells[k].first, cells[k].second));
      total += nmae(pred, truth, options.range_lo, options.range_hi);
    }
    const double mean = total / options.folds;
    result.mean_nmae.emplace_back(t, mean);
    if (result.mean_nmae.size() == 1 || mean < best) {
      best = mean;
      result.best = t;
    }
  }
  return result;
}

Evaluation evaluate_pipeline(const RatingsMatrix& m, const SplitSpec& split_spec,
                             const EvaluateOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  const Split s = split(m, split_spec);
  if (s.test.observed_count() == 0) throw InsufficientDataError("evaluate: empty test set");
  if (options.truth) {
    if (options.truth->row_labels.size() != m.rows() || options.truth->col_labels.size() != m.cols())
      throw DomainError("evaluate: truth labels do not match matrix dimensions");
  }
  const auto [lo, hi] = options.range ? *options.range : observed_range(m);
  if (!(hi > lo)) throw DomainError("evaluate: range needs hi > lo");

  EvaluationReport report;
  report.split = split_spec;
  report.range_lo = lo;
  report.range_hi = hi;
  report.train_edges = s.train.observed_count();
  report.test_edges = s.test.observed_count();
  report.nmi_normalization = to_string(options.nmi_normalization);

  const bool node_scheme = split_spec.scheme != SplitScheme::kHoldEdges;
  const auto rows = kept(s.held_rows), cols = kept(s.held_cols);
  const RatingsMatrix train_view = node_scheme ? s.train.submatrix(rows, cols) : s.train;

  Transformation t = Transformation::kNone;
  if (options.cross_validate) {
    CvOptions cv;
    cv.folds = options.folds;
    cv.seed = split_spec.seed;
    cv.range_lo = lo;
    cv.range_hi = hi;
    cv.detection = options.detection;
    cv.fit = options.fit;
    const CvResult r = cross_validate_transformations(train_view, cv);
    t = r.best;
    report.cross_validated = true;
    for (const auto& [kind, value] : r.mean_nmae) report.cv_nmae.emplace_back(to_string(kind), value);
  }
  report.transformation = to_string(t);

  const auto detected = detect(apply_transformation(train_view, t).matrix, options.detection);
  report.detection_measure = detected.breakdown.total;
  report.detection_cycles = detected.cycles;

  CommunityAssignment assignment;
  if (!node_scheme) {
    assignment = detected.assignment;
  } else {
    assignment.row_labels.assign(m.rows(), 0);
    assignment.col_labels.assign(m.cols(), 0);
    for (std::size_t k = 0; k < rows.size(); ++k) assignment.row_labels[rows[k]] = detected.assignment.row_labels[k];
    for (std::size_t k = 0; k < cols.size(); ++k) assignment.col_labels[cols[k]] = detected.assignment.col_labels[k];
    // Held nodes are placed from their visible edges towards non-held nodes.
    const RatingsMatrix& visible = split_spec.scheme == SplitScheme::kHoldNodes ? s.test : s.revealed;
    auto place = [&](bool row_side, std::size_t node) {
      const auto& others = row_side ? cols : rows;
      std::vector<double> edges(others.size(), std::numeric_limits<double>::quiet_NaN());
      for (std::size_t k = 0; k < others.size(); ++k) {
        const std::size_t u = row_side ? node : others[k], v = row_side ? others[k] : node;
        if (visible.observed(u, v)) edges[k] = visible.weight(u, v);
      }
      try {
        return assign_heldout(train_view, detected.assignment, edges, row_side ? Side::kRows : Side::kCols);
      } catch (const ColdStartError&) {
        ++report.cold_start_nodes;
        return largest_community(row_side ? detected.assignment.row_labels : detected.assignment.col_labels);
      }
    };
    for (std::size_t u = 0; u < m.rows(); ++u)
      if (s.held_rows[u]) assignment.row_labels[u] = place(true, u);
    for (std::size_t v = 0; v < m.cols(); ++v)
      if (s.held_cols[v]) assignment.col_labels[v] = place(false, v);
    if (report.cold_start_nodes > 0)
      warn(std::to_string(report.cold_start_nodes) +
           " held-out node(s) without visible edges placed in the largest community");
  }
  report.row_communities = assignment.row_communities();
  report.col_communities = assignment.col_communities();

  FitOptions fit_options = options.fit;
  if (node_scheme) {
    fit_options.frozen_rows = s.held_rows;
    fit_options.frozen_cols = s.held_cols;
  }
  FitResult fitted = fit_model(s.train, assignment, fit_options);
  if (split_spec.scheme == SplitScheme::kHoldNodesAndEdges)
    place_heldout_psi(fitted.model, s.revealed, s.held_rows, s.held_cols);
  report.iterations = fitted.model.diagnostics;

  Evaluation out{report, assignment, RatingsMatrix(m.rows(), m.cols())};
  std::vector<double> pred, truth;
  for (std::size_t u = 0; u < m.rows(); ++u)
    for (std::size_t v = 0; v < m.cols(); ++v) {
      if (!s.test.observed(u, v)) continue;
      const double p = predict_edge(fitted.model, u, v);
      out.predictions.set(u, v, p);
      pred.push_back(p);
      truth.push_back(s.test.weight(u, v));
    }
  auto& r = out.report;
  r.mse = mse(pred, truth);
  r.rmse = std::sqrt(r.mse);
  r.nmae = nmae(pred, truth, lo, hi);
  if (options.truth) {
    r.nmi_rows = nmi(options.truth->row_labels, assignment.row_labels, options.nmi_normalization);
    r.nmi_cols = nmi(options.truth->col_labels, assignment.col_labels, options.nmi_normalization);
  }
  r.wall_clock_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

nlohmann::json EvaluationReport::to_json() const {
  nlohmann::json cv = nlohmann::json::array();
  for (const auto& [name, value] : cv_nmae) cv.push_back({{"transformation", name}, {"nmae", value}});
  nlohmann::json iters = nlohmann::json::array();
  for (const auto& d : iterations)
    iters.push_back({{"iteration", d.iteration},
                     {"mean_abs_change", d.mean_abs_change},
                     {"unfittable_blocks", d.unfittable_blocks}});
  nlohmann::json j = {
      {"split", {{"scheme", to_string(split.scheme)}, {"fraction", split.fraction}, {"seed", split.seed}}},
      {"transformation", transformation},
      {"cross_validated", cross_validated},
      {"cv_nmae", cv},
      {"row_communities", row_communities},
      {"col_communities", col_communities},
      {"train_edges", train_edges},
      {"test_edges", test_edges},
      {"range", {range_lo, range_hi}},
      {"metrics", {{"mse", mse}, {"rmse", rmse}, {"nmae", nmae}}},
      {"nmi_normalization", nmi_normalization},
      {"detection", {{"measure", detection_measure}, {"cycles", detection_cycles}}},
      {"cold_start_nodes", cold_start_nodes},
      {"iterations", iters},
      {"wall_clock_seconds", wall_clock_seconds}};
  if (nmi_rows) j["metrics"]["nmi_rows"] = *nmi_rows;
  if (nmi_cols) j["metrics"]["nmi_cols"] = *nmi_cols;
  return j;
}

EvaluationReport EvaluationReport::from_json(const nlohmann::json& j) {
  try {
    EvaluationReport r;
    const auto& sp = j.at("split");
    r.split.scheme = parse_split_scheme(sp.at("scheme").get<std::string>());
    r.split.fraction = sp.at("fraction").get<double>();
    r.split.seed = sp.at("seed").get<std::uint64_t>();
    r.transformation = j.at("transformation").get<std::string>();
    r.cross_validated = j.at("cross_validated").get<bool>();
    for (const auto& c : j.at("cv_nmae"))
      r.cv_nmae.emplace_back(c.at("transformation").get<std::string>(), c.at("nmae").get<double>());
    r.row_communities = j.at("row_communities").get<int>();
    r.col_communities = j.at("col_communities").get<int>();
    r.train_edges = j.at("train_edges").get<std::size_t>();
    r.test_edges = j.at("test_edges").get<std::size_t>();
    r.range_lo = j.at("range").at(0).get<double>();
    r.range_hi = j.at("range").at(1).get<double>();
    const auto& mt = j.at("metrics");
    r.mse = mt.at("mse").get<double>();
    r.rmse = mt.at("rmse").get<double>();
    r.nmae = mt.at("nmae").get<double>();
    if (mt.contains("nmi_rows")) r.nmi_rows = mt.at("nmi_rows").get<double>();
    if (mt.contains("nmi_cols")) r.nmi_cols = mt.at("nmi_cols").get<double>();
    r.nmi_normalization = j.at("nmi_normalization").get<std::string>();
    r.detection_measure = j.at("detection").at("measure").get<double>();
    r.detection_cycles = j.at("detection").at("cycles").get<int>();
    r.cold_start_nodes = j.at("cold_start_nodes").get<int>();
    for (const auto& d : j.at("iterations"))
      r.iterations.push_back({d.at("iteration").get<int>(), d.at("mean_abs_change").get<double>(),
                              d.at("unfittable_blocks").get<int>()});
    r.wall_clock_seconds = j.at("wall_clock_seconds").get<double>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("report: ") + e.what());
  }
}

bool EvaluationReport::operator==(const EvaluationReport& o) const {
  auto a = to_json(), b = o.to_json();
  a.erase("wall_clock_seconds");
  b.erase("wall_clock_seconds");
  return a == b;
}

}  // namespace nsm
