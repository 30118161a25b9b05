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
#include "nsm/generator.hpp"

#include <cmath>

#include "nsm/error.hpp"
#include "nsm/normal.hpp"
#include "nsm/rng.hpp"

namespace nsm {
namespace {

std::vector<double> draw_psi(const GeneratorConfig& cfg, std::size_t n, std::uint64_t stream) {
  std::vector<double> psi(n);
  if (cfg.psi_mode == PsiMode::kIidUniform) {
    const CounterRng rng(cfg.seed, stream);
    for (std::size_t k = 0; k < n; ++k) psi[k] = rng.uniform(k);
  }
  return psi;
}

// Equally spaced values in [lo, hi] for a community of the given size.
void spaced(std::vector<double>& psi, std::size_t start, int size, double lo, double hi) {
  for (int k = 0; k < size; ++k)
    psi[start + static_cast<std::size_t>(k)] =
        size == 1 ? 0.5 * (lo + hi) : lo + (hi - lo) * k / (size - 1);
}

}  // namespace

void GeneratorConfig::validate() const {
  if (row_sizes.empty() || col_sizes.empty()) throw DomainError("generator: no communities");
  for (int s : row_sizes)
    if (s < 1) throw DomainError("generator: community sizes must be >= 1");
  for (int s : col_sizes)
    if (s < 1) throw DomainError("generator: community sizes must be >= 1");
  if (blocks.size() != row_sizes.size() * col_sizes.size())
    throw DomainError("generator: block table must have K_r x K_c entries");
  for (const auto& b : blocks) {
    if (!(b.hi > b.lo)) throw DomainError("generator: block needs hi > lo");
    if (!(b.sigma >= 0.0) || !std::isfinite(b.sigma)) throw DomainError("generator: sigma must be >= 0");
  }
  if (psi_mode == PsiMode::kEquallySpaced && !(psi_lo > 0.0 && psi_lo < psi_hi && psi_hi < 1.0))
    throw DomainError("generator: psi range must satisfy 0 < lo < hi < 1");
}

double edge_weight(const BlockSpec& b, double psi_u, double psi_v, double noise_uniform) {
  const double h = eval_h(b.h, psi_u, psi_v);
  double p = h;
  if (b.sigma > 0.0) {
    const double scale = std::sqrt(1.0 + b.sigma * b.sigma);
    p = normal_cdf(normal_quantile(h) / scale + b.sigma / scale * normal_quantile(noise_uniform));
  }
  return b.lo + p * (b.hi - b.lo);
}

SampledNetwork sample_network(const GeneratorConfig& cfg) {
  cfg.validate();
  const std::size_t kr = cfg.row_sizes.size(), kc = cfg.col_sizes.size();
  SampledNetwork out;
  for (std::size_t i = 0; i < kr; ++i)
    out.truth.row_labels.insert(out.truth.row_labels.end(), static_cast<std::size_t>(cfg.row_sizes[i]),
                                static_cast<int>(i));
  for (std::size_t j = 0; j < kc; ++j)
    out.truth.col_labels.insert(out.truth.col_labels.end(), static_cast<std::size_t>(cfg.col_sizes[j]),
                                static_cast<int>(j));
  const std::size_t nr = out.truth.row_labels.size(), nc = out.truth.col_labels.size();

  std::vector<double> row_psi = draw_psi(cfg, nr, streams::kPsiRows);
  std::vector<double> col_psi = draw_psi(cfg, nc, streams::kPsiCols);
  if (cfg.psi_mode == PsiMode::kEquallySpaced) {
    std::size_t start = 0;
    for (int s : cfg.row_sizes) {
      spaced(row_psi, start, s, cfg.psi_lo, cfg.psi_hi);
      start += static_cast<std::size_t>(s);
    }
    start = 0;
    for (int s : cfg.col_sizes) {
      spaced(col_psi, start, s, cfg.psi_lo, cfg.psi_hi);
      start += static_cast<std::size_t>(s);
    }
  }
  out.psi_rows.resize(nr * kc);
  out.psi_cols.resize(nc * kr);
  for (std::size_t u = 0; u < nr; ++u)
    for (std::size_t j = 0; j < kc; ++j) out.psi_rows[u * kc + j] = row_psi[u];
  for (std::size_t v = 0; v < nc; ++v)
    for (std::size_t i = 0; i < kr; ++i) out.psi_cols[v * kr + i] = col_psi[v];

  const CounterRng noise(cfg.seed, streams::kNoise);
  std::vector<double> values(nr * nc);
  for (std::size_t u = 0; u < nr; ++u)
    for (std::size_t v = 0; v < nc; ++v) {
      const auto i = static_cast<std::size_t>(out.truth.row_labels[u]);
      const auto j = static_cast<std::size_t>(out.truth.col_labels[v]);
      values[u * nc + v] = edge_weight(cfg.block(i, j), out.psi_rows[u * kc + j], out.psi_cols[v * kr + i],
                                       noise.uniform(u * nc + v));
    }
  out.matrix = RatingsMatrix::dense(nr, nc, std::move(values));
  return out;
}

GeneratorConfig canonical_config() {
  GeneratorConfig cfg;
  cfg.row_sizes.assign(4, 73);
  cfg.col_sizes.assign(3, 73);
  const HFunctionSpec pos{HFamily::kGamma, 0.5, 0.5, Orientation::kPositive};
  const HFunctionSpec neg{HFamily::kGamma, 0.5, 0.5, Orientation::kNegative};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 3; ++j) {
      const int d = std::abs(i - j);
      if (d == 0) cfg.blocks.push_back({0.0, 200.0, pos, 0.0});
      else if (d == 1) cfg.blocks.push_back({0.0, 100.0, neg, 0.0});
      else cfg.blocks.push_back({0.0, 50.0, neg, 0.0});
    }
  return cfg;
}

RatingsMatrix mcar_mask(const RatingsMatrix& m, double p_missing, std::uint64_t seed) {
  if (!(p_missing >= 0.0 && p_missing < 1.0)) throw DomainError("mcar: p_missing must lie in [0, 1)");
  RatingsMatrix out = m;
  const CounterRng rng(seed, streams::kMcar);
  for (std::size_t u = 0; u < m.rows(); ++u)
    for (std::size_t v = 0; v < m.cols(); ++v)
      if (m.observed(u, v) && rng.uniform(u * m.cols() + v) < p_missing) out.hide(u, v);
  return out;
}

RatingsMatrix duplicate_nodes(const RatingsMatrix& m, int factor) {
  if (factor < 1) throw DomainError("duplicate: factor must be >= 1");
  const auto f = static_cast<std::size_t>(factor);
  RatingsMatrix out(m.rows() * f, m.cols() * f);
  for (std::size_t u = 0; u < out.rows(); ++u)
    for (std::size_t v = 0; v < out.cols(); ++v)
      if (m.observed(u / f, v / f)) out.set(u, v, m.weight(u / f, v / f));
  return out;
}

std::vector<int> duplicate_labels(const std::vector<int>& labels, int factor) {
  if (factor < 1) throw DomainError("duplicate: factor must be >= 1");
  std::vector<int> out;
  for (int l : labels) out.insert(out.end(), static_cast<std::size_t>(factor), l);
  return out;
}

nlohmann::json GeneratorConfig::to_json() const {
  nlohmann::json jb = nlohmann::json::array();
  for (const auto& b : blocks)
    jb.push_back({{"lo", b.lo}, {"hi", b.hi}, {"h", b.h.id()}, {"sigma", b.sigma}});
  return {{"row_sizes", row_sizes},
          {"col_sizes", col_sizes},
          {"blocks", jb},
          {"psi_mode", psi_mode == PsiMode::kIidUniform ? "iid-uniform" : "equally-spaced"},
          {"psi_lo", psi_lo},
          {"psi_hi", psi_hi},
          {"seed", seed}};
}

GeneratorConfig GeneratorConfig::from_json(const nlohmann::json& j) {
  try {
    GeneratorConfig cfg;
    cfg.row_sizes = j.at("row_sizes").get<std::vector<int>>();
    cfg.col_sizes = j.at("col_sizes").get<std::vector<int>>();
    for (const auto& b : j.at("blocks"))
      cfg.blocks.push_back({b.at("lo").get<double>(), b.at("hi").get<double>(),
                            parse_h_id(b.at("h").get<std::string>()), b.value("sigma", 0.0)});
    const std::string mode = j.value("psi_mode", "equally-spaced");
    if (mode == "iid-uniform") cfg.psi_mode = PsiMode::kIidUniform;
    else if (mode != "equally-spaced") throw FormatError("generator config: unknown psi_mode '" + mode + "'");
    cfg.psi_lo = j.value("psi_lo", 0.05);
    cfg.psi_hi = j.value("psi_hi", 0.95);
    cfg.seed = j.value("seed", std::uint64_t{0});
    cfg.validate();
    return cfg;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("generator config: ") + e.what());
  }
}

}  // namespace nsm
