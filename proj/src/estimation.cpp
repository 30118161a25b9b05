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
#include "nsm/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "nsm/error.hpp"
#include "nsm/log.hpp"
#include "nsm/normal.hpp"
#include "nsm/parallel.hpp"

namespace nsm {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kMinShrink = 1e-6;

// Ordinal ranks of the unflagged scores (ties by position), mapped to
// rank / (n + 1). Flagged entries get 1/2.
std::vector<double> rank_scores(const std::vector<double>& score, const std::vector<bool>& flagged) {
  std::vector<std::size_t> idx;
  for (std::size_t k = 0; k < score.size(); ++k)
    if (!flagged[k]) idx.push_back(k);
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t x, std::size_t y) { return score[x] < score[y]; });
  std::vector<double> psi(score.size(), 0.5);
  const double denom = static_cast<double>(idx.size() + 1);
  for (std::size_t r = 0; r < idx.size(); ++r) psi[idx[r]] = static_cast<double>(r + 1) / denom;
  return psi;
}

double midrank_position(const std::vector<double>& training, double s) {
  std::size_t less = 0, equal = 0;
  for (double t : training) {
    if (t < s) ++less;
    else if (t == s) ++equal;
  }
  return (static_cast<double>(less) + (static_cast<double>(equal) + 1.0) / 2.0) /
         static_cast<double>(training.size() + 1);
}

std::string to_string(PsiAggregate a) { return a == PsiAggregate::kSum ? "sum" : "mean"; }

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

EmpiricalDistribution::EmpiricalDistribution(std::vector<double> weights)
    : sorted_(std::move(weights)) {
  if (sorted_.empty()) throw InsufficientDataError("unfittable block");
  for (double w : sorted_)
    if (!std::isfinite(w)) throw DomainError("empirical distribution: non-finite weight");
  std::sort(sorted_.begin(), sorted_.end());
}

double EmpiricalDistribution::cdf(double w) const {
  const auto lo = std::lower_bound(sorted_.begin(), sorted_.end(), w);
  const auto hi = std::upper_bound(lo, sorted_.end(), w);
  const double less = static_cast<double>(lo - sorted_.begin());
  const double equal = static_cast<double>(hi - lo);
  return (less + (equal + 1.0) / 2.0) / static_cast<double>(sorted_.size() + 1);
}

double EmpiricalDistribution::quantile(double p) const {
  const std::size_t m = sorted_.size();
  const double pos = p * static_cast<double>(m + 1);  // 1-based order statistic
  if (!(pos > 1.0)) return sorted_.front();
  if (!(pos < static_cast<double>(m))) return sorted_.back();
  const auto k = static_cast<std::size_t>(std::floor(pos));
  const double frac = pos - static_cast<double>(k);
  return sorted_[k - 1] + frac * (sorted_[k] - sorted_[k - 1]);
}

EmpiricalDistribution fit_empirical_G(std::vector<double> weights) {
  return EmpiricalDistribution(std::move(weights));
}

std::vector<double> BlockData::observed() const {
  std::vector<double> out;
  for (double w : values)
    if (!std::isnan(w)) out.push_back(w);
  return out;
}

PsiEstimate estimate_psi(const BlockData& block, const EmpiricalDistribution& g,
                         PsiAggregate aggregate) {
  PsiEstimate p;
  std::vector<double> row_sum(block.rows, 0.0), col_sum(block.cols, 0.0);
  std::vector<std::size_t> row_n(block.rows, 0), col_n(block.cols, 0);
  for (std::size_t r = 0; r < block.rows; ++r)
    for (std::size_t c = 0; c < block.cols; ++c) {
      const double w = block.at(r, c);
      if (std::isnan(w)) continue;
      const double a = normal_quantile(g.cdf(w));
      row_sum[r] += a;
      col_sum[c] += a;
      ++row_n[r];
      ++col_n[c];
    }
  auto finish = [aggregate](const std::vector<double>& sum, const std::vector<std::size_t>& n,
                            std::vector<double>& score, std::vector<bool>& flagged) {
    score.assign(sum.size(), kNaN);
    flagged.assign(sum.size(), false);
    for (std::size_t k = 0; k < sum.size(); ++k) {
      if (n[k] == 0) {
        flagged[k] = true;
        continue;
      }
      score[k] = aggregate == PsiAggregate::kSum ? sum[k] : sum[k] / static_cast<double>(n[k]);
    }
  };
  finish(row_sum, row_n, p.row_score, p.row_flagged);
  finish(col_sum, col_n, p.col_score, p.col_flagged);
  p.row = rank_scores(p.row_score, p.row_flagged);
  p.col = rank_scores(p.col_score, p.col_flagged);
  return p;
}

ShrinkFit fit_shrink(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw DomainError("fit_shrink: length mismatch");
  double sab = 0.0, sbb = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    sab += a[k] * b[k];
    sbb += b[k] * b[k];
  }
  ShrinkFit f;
  double c = sbb > 0.0 ? sab / sbb : 0.0;
  if (!(c > kMinShrink)) {
    f.pure_noise = true;
    f.sigma = kPureNoiseSigma;
    c = 1.0 / std::sqrt(1.0 + kPureNoiseSigma * kPureNoiseSigma);
  } else {
    c = std::min(c, 1.0);
    f.sigma = std::sqrt(std::max(0.0, 1.0 / (c * c) - 1.0));
  }
  f.c = c;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double r = a[k] - c * b[k];
    f.loss += r * r;
  }
  return f;
}

HSigmaFit fit_H_sigma(const BlockData& block, const PsiEstimate& psi,
                      const EmpiricalDistribution& g, std::span<const HFunctionSpec> hypotheses) {
  if (hypotheses.empty()) throw DomainError("fit_H_sigma: empty hypothesis set");
  std::vector<std::size_t> cell_r, cell_c;
  std::vector<double> a;
  for (std::size_t r = 0; r < block.rows; ++r)
    for (std::size_t c = 0; c < block.cols; ++c) {
      const double w = block.at(r, c);
      if (std::isnan(w)) continue;
      cell_r.push_back(r);
      cell_c.push_back(c);
      a.push_back(normal_quantile(g.cdf(w)));
    }

  HSigmaFit best;
  best.losses.resize(hypotheses.size());
  std::vector<double> row_term(block.rows), col_term(block.cols), b(a.size());
  for (std::size_t k = 0; k < hypotheses.size(); ++k) {
    const HFunction h(hypotheses[k]);
    for (std::size_t r = 0; r < block.rows; ++r) row_term[r] = h.row_term(psi.row[r]);
    for (std::size_t c = 0; c < block.cols; ++c) col_term[c] = h.col_term(psi.col[c]);
    for (std::size_t e = 0; e < a.size(); ++e)
      b[e] = normal_quantile(h.combine(row_term[cell_r[e]] + col_term[cell_c[e]]));
    const ShrinkFit f = fit_shrink(a, b);
    best.losses[k] = f.loss;
    if (k == 0 || f.loss < best.shrink.loss) {
      best.index = k;
      best.h = hypotheses[k];
      best.shrink = f;
    }
  }
  return best;
}

double predict_value(const BlockFit& block, double psi_u, double psi_v) {
  if (block.fallback) return block.fallback_value;
  const double t = block.c * normal_quantile(eval_h(block.h, psi_u, psi_v));
  return block.g.quantile(normal_cdf(t));
}

double predict_edge(const ModelFit& fit, std::size_t u, std::size_t v) {
  const auto& rl = fit.assignment.row_labels;
  const auto& cl = fit.assignment.col_labels;
  if (u >= rl.size() || v >= cl.size()) throw DomainError("predict_edge: node index out of range");
  const BlockFit& b = fit.block(rl[u], cl[v]);
  return predict_value(b, b.psi_row[fit.row_position[u]], b.psi_col[fit.col_position[v]]);
}

FitResult fit_model(const RatingsMatrix& m, const CommunityAssignment& ca,
                    const FitOptions& options) {
  ca.validate();
  if (ca.row_labels.size() != m.rows() || ca.col_labels.size() != m.cols())
    throw DomainError("fit: assignment does not match matrix dimensions");
  if (options.iterations < 1) throw DomainError("fit: iterations must be >= 1");
  const std::size_t nr = m.rows(), nc = m.cols();
  std::vector<bool> frozen_rows = options.frozen_rows, frozen_cols = options.frozen_cols;
  frozen_rows.resize(nr, false);
  frozen_cols.resize(nc, false);

  ModelFit fit;
  fit.assignment = ca;
  fit.row_communities = ca.row_communities();
  fit.col_communities = ca.col_communities();
  fit.aggregate = options.aggregate;
  const auto kr = static_cast<std::size_t>(fit.row_communities);
  const auto kc = static_cast<std::size_t>(fit.col_communities);

  std::vector<std::vector<std::size_t>> row_members(kr), col_members(kc);
  fit.row_position.resize(nr);
  fit.col_position.resize(nc);
  for (std::size_t u = 0; u < nr; ++u) {
    auto& g = row_members[static_cast<std::size_t>(ca.row_labels[u])];
    fit.row_position[u] = g.size();
    g.push_back(u);
  }
  for (std::size_t v = 0; v < nc; ++v) {
    auto& g = col_members[static_cast<std::size_t>(ca.col_labels[v])];
    fit.col_position[v] = g.size();
    g.push_back(v);
  }

  std::vector<double> current(nr * nc, kNaN);
  std::vector<double> observed_weights;
  for (std::size_t u = 0; u < nr; ++u)
    for (std::size_t v = 0; v < nc; ++v)
      if (m.observed(u, v)) {
        current[u * nc + v] = m.weight(u, v);
        if (!frozen_rows[u] && !frozen_cols[v]) observed_weights.push_back(m.weight(u, v));
      }
  if (observed_weights.empty()) throw InsufficientDataError("fit: no observed training edges");
  const double global_median = median_of(observed_weights);
  const auto hypotheses = hypothesis_set(options.include_auxiliary);
  const bool any_missing = !m.fully_observed();

  fit.blocks.resize(kr * kc);
  std::vector<std::vector<double>> predictions(kr * kc);
  for (int it = 0; it < options.iterations; ++it) {
    parallel_for(kr * kc, [&](std::size_t bi) {
      const std::size_t i = bi / kc, j = bi % kc;
      BlockFit bf;
      bf.row_members = row_members[i];
      bf.col_members = col_members[j];
      std::vector<std::size_t> train_rows, train_cols;  // positions within members
      for (std::size_t p = 0; p < bf.row_members.size(); ++p)
        if (!frozen_rows[bf.row_members[p]]) train_rows.push_back(p);
      for (std::size_t p = 0; p < bf.col_members.size(); ++p)
        if (!frozen_cols[bf.col_members[p]]) train_cols.push_back(p);
      BlockData data{train_rows.size(), train_cols.size(), {}};
      data.values.reserve(data.rows * data.cols);
      for (auto pr : train_rows)
        for (auto pc : train_cols)
          data.values.push_back(current[bf.row_members[pr] * nc + bf.col_members[pc]]);

      bf.psi_row.assign(bf.row_members.size(), 0.5);
      bf.psi_col.assign(bf.col_members.size(), 0.5);
      auto weights = data.observed();
      if (weights.empty()) {
        bf.fallback = true;
        bf.fallback_value = global_median;
      } else {
        bf.g = EmpiricalDistribution(std::move(weights));
        const PsiEstimate psi = estimate_psi(data, bf.g, options.aggregate);
        const HSigmaFit hs = fit_H_sigma(data, psi, bf.g, hypotheses);
        for (std::size_t k = 0; k < train_rows.size(); ++k) {
          bf.psi_row[train_rows[k]] = psi.row[k];
          if (!psi.row_flagged[k]) bf.score_row.push_back(psi.row_score[k]);
        }
        for (std::size_t k = 0; k < train_cols.size(); ++k) {
          bf.psi_col[train_cols[k]] = psi.col[k];
          if (!psi.col_flagged[k]) bf.score_col.push_back(psi.col_score[k]);
        }
        bf.h = hs.h;
        bf.sigma = hs.shrink.sigma;
        bf.c = hs.shrink.c;
        bf.loss = hs.shrink.loss;
        bf.pure_noise = hs.shrink.pure_noise;
      }

      auto& out = predictions[bi];
      out.clear();
      for (std::size_t pr = 0; pr < bf.row_members.size(); ++pr)
        for (std::size_t pc = 0; pc < bf.col_members.size(); ++pc) {
          const std::size_t u = bf.row_members[pr], v = bf.col_members[pc];
          if (!m.observed(u, v)) out.push_back(predict_value(bf, bf.psi_row[pr], bf.psi_col[pc]));
        }
      fit.blocks[bi] = std::move(bf);
    });

    IterationDiagnostics diag;
    diag.iteration = it;
    double change = 0.0;
    std::size_t changed_cells = 0;
    for (std::size_t bi = 0; bi < kr * kc; ++bi) {
      const BlockFit& bf = fit.blocks[bi];
      if (bf.fallback) ++diag.unfittable_blocks;
      std::size_t k = 0;
      for (auto u : bf.row_members)
        for (auto v : bf.col_members) {
          if (m.observed(u, v)) continue;
          double& cell = current[u * nc + v];
          const double next = predictions[bi][k++];
          if (it > 0) change += std::abs(next - cell);
          ++changed_cells;
          cell = next;
        }
    }
    diag.mean_abs_change = it > 0 && changed_cells > 0 ? change / static_cast<double>(changed_cells) : 0.0;
    fit.diagnostics.push_back(diag);
    if (diag.unfittable_blocks > 0 && it == 0)
      warn(std::to_string(diag.unfittable_blocks) + " unfittable block(s); using the global median");
    if (!any_missing) break;
    if (it > 0 && options.tolerance > 0.0 && diag.mean_abs_change < options.tolerance) break;
  }

  const auto& d = fit.diagnostics;
  for (std::size_t k = 4; k < d.size(); ++k)
    if (d[k].mean_abs_change > d[k - 1].mean_abs_change * (1.0 + 1e-9) + 1e-12) {
      warn("imputation change increased at iteration " + std::to_string(d[k].iteration));
      break;
    }

  FitResult result{std::move(fit), RatingsMatrix(nr, nc)};
  for (std::size_t u = 0; u < nr; ++u)
    for (std::size_t v = 0; v < nc; ++v) result.completed.set(u, v, current[u * nc + v]);
  return result;
}

void place_heldout_psi(ModelFit& fit, const RatingsMatrix& edges, const std::vector<bool>& held_rows,
                       const std::vector<bool>& held_cols) {
  const auto& rl = fit.assignment.row_labels;
  const auto& cl = fit.assignment.col_labels;
  auto place = [&](BlockFit& b, bool row_side, std::size_t node, std::size_t position) {
    if (b.fallback) return;
    const auto& others = row_side ? b.col_members : b.row_members;
    double sum = 0.0;
    std::size_t n = 0;
    for (auto o : others) {
      const std::size_t u = row_side ? node : o, v = row_side ? o : node;
      if (!edges.observed(u, v)) continue;
      sum += normal_quantile(b.g.cdf(edges.weight(u, v)));
      ++n;
    }
    if (n == 0) return;
    const double s = fit.aggregate == PsiAggregate::kSum ? sum : sum / static_cast<double>(n);
    if (row_side) b.psi_row[position] = midrank_position(b.score_row, s);
    else b.psi_col[position] = midrank_position(b.score_col, s);
  };
  for (std::size_t u = 0; u < held_rows.size() && u < rl.size(); ++u) {
    if (!held_rows[u]) continue;
    for (int j = 0; j < fit.col_communities; ++j) place(fit.block(rl[u], j), true, u, fit.row_position[u]);
  }
  for (std::size_t v = 0; v < held_cols.size() && v < cl.size(); ++v) {
    if (!held_cols[v]) continue;
    for (int i = 0; i < fit.row_communities; ++i) place(fit.block(i, cl[v]), false, v, fit.col_position[v]);
  }
}

nlohmann::json ModelFit::to_json() const {
  nlohmann::json blocks_json = nlohmann::json::array();
  for (int i = 0; i < row_communities; ++i)
    for (int j = 0; j < col_communities; ++j) {
      const BlockFit& b = block(i, j);
      nlohmann::json jb = {{"row_community", i + 1},
                           {"col_community", j + 1},
                           {"fallback", b.fallback}};
      if (b.fallback) {
        jb["fallback_value"] = b.fallback_value;
      } else {
        jb["h"] = b.h.id();
        jb["sigma"] = b.sigma;
        jb["shrink"] = b.c;
        jb["loss"] = b.loss;
        jb["pure_noise"] = b.pure_noise;
        jb["weights"] = b.g.sorted();
        jb["score_row"] = b.score_row;
        jb["score_col"] = b.score_col;
      }
      jb["psi_row"] = b.psi_row;
      jb["psi_col"] = b.psi_col;
      blocks_json.push_back(std::move(jb));
    }
  nlohmann::json diag = nlohmann::json::array();
  for (const auto& d : diagnostics)
    diag.push_back({{"iteration", d.iteration},
                    {"mean_abs_change", d.mean_abs_change},
                    {"unfittable_blocks", d.unfittable_blocks}});
  std::vector<int> rows1(assignment.row_labels), cols1(assignment.col_labels);
  for (int& l : rows1) ++l;
  for (int& l : cols1) ++l;
  return {{"format", "nsm-model"},
          {"version", 1},
          {"psi_aggregate", to_string(aggregate)},
          {"row_labels", rows1},
          {"col_labels", cols1},
          {"blocks", std::move(blocks_json)},
          {"iterations", std::move(diag)}};
}

ModelFit ModelFit::from_json(const nlohmann::json& j) {
  try {
    if (j.at("format").get<std::string>() != "nsm-model") throw FormatError("not a model file");
    ModelFit fit;
    fit.aggregate = j.at("psi_aggregate").get<std::string>() == "sum" ? PsiAggregate::kSum
                                                                      : PsiAggregate::kMean;
    fit.assignment.row_labels = j.at("row_labels").get<std::vector<int>>();
    fit.assignment.col_labels = j.at("col_labels").get<std::vector<int>>();
    for (int& l : fit.assignment.row_labels) --l;
    for (int& l : fit.assignment.col_labels) --l;
    fit.assignment.validate();
    fit.row_communities = fit.assignment.row_communities();
    fit.col_communities = fit.assignment.col_communities();
    const auto kr = static_cast<std::size_t>(fit.row_communities);
    const auto kc = static_cast<std::size_t>(fit.col_communities);
    std::vector<std::vector<std::size_t>> rm(kr), cm(kc);
    fit.row_position.resize(fit.assignment.row_labels.size());
    fit.col_position.resize(fit.assignment.col_labels.size());
    for (std::size_t u = 0; u < fit.row_position.size(); ++u) {
      auto& g = rm[static_cast<std::size_t>(fit.assignment.row_labels[u])];
      fit.row_position[u] = g.size();
      g.push_back(u);
    }
    for (std::size_t v = 0; v < fit.col_position.size(); ++v) {
      auto& g = cm[static_cast<std::size_t>(fit.assignment.col_labels[v])];
      fit.col_position[v] = g.size();
      g.push_back(v);
    }
    const auto& blocks = j.at("blocks");
    if (blocks.size() != kr * kc) throw FormatError("model: wrong number of blocks");
    fit.blocks.resize(kr * kc);
    for (const auto& jb : blocks) {
      const int i = jb.at("row_community").get<int>() - 1;
      const int c = jb.at("col_community").get<int>() - 1;
      if (i < 0 || c < 0 || i >= fit.row_communities || c >= fit.col_communities)
        throw FormatError("model: block index out of range");
      BlockFit& b = fit.block(i, c);
      b.row_members = rm[static_cast<std::size_t>(i)];
      b.col_members = cm[static_cast<std::size_t>(c)];
      b.fallback = jb.at("fallback").get<bool>();
      if (b.fallback) {
        b.fallback_value = jb.at("fallback_value").get<double>();
      } else {
        b.h = parse_h_id(jb.at("h").get<std::string>());
        b.sigma = jb.at("sigma").get<double>();
        b.c = jb.at("shrink").get<double>();
        b.loss = jb.at("loss").get<double>();
        b.pure_noise = jb.at("pure_noise").get<bool>();
        b.g = EmpiricalDistribution(jb.at("weights").get<std::vector<double>>());
        b.score_row = jb.at("score_row").get<std::vector<double>>();
        b.score_col = jb.at("score_col").get<std::vector<double>>();
      }
      b.psi_row = jb.at("psi_row").get<std::vector<double>>();
      b.psi_col = jb.at("psi_col").get<std::vector<double>>();
      if (b.psi_row.size() != b.row_members.size() || b.psi_col.size() != b.col_members.size())
        throw FormatError("model: psi array length does not match community size");
    }
    for (const auto& d : j.at("iterations"))
      fit.diagnostics.push_back({d.at("iteration").get<int>(), d.at("mean_abs_change").get<double>(),
                                 d.at("unfittable_blocks").get<int>()});
    return fit;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("model: ") + e.what());
  }
}

}  // namespace nsm
