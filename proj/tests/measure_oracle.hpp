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
#ifndef NSM_TESTS_MEASURE_ORACLE_HPP_
#define NSM_TESTS_MEASURE_ORACLE_HPP_

#include <algorithm>
#include <cmath>
#include <vector>

#include "nsm/ratings.hpp"

namespace nsm::testing {

// Direct, unoptimised transcription of the clustering measure:
//   L = sum_ij [mean_u C_ij(u) (1 - sqrt SD_u) + mean_v C_ji(v) (1 - sqrt SD_v)]
//       * ((n_i - 2)(n_j - 2))_+ * density(i, j)
// with C_ij(u) = corr{d_i(v), W_uv : v in j, W_uv observed}, a correlation
// with fewer than 2 pairs or a constant side scored 0, population SD, and SDs
// below 1e-12 treated as 0 (rounding noise between equal correlations).
inline double oracle_corr(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n < 2) return 0.0;
  if (std::all_of(x.begin(), x.end(), [&](double a) { return a == x[0]; })) return 0.0;
  if (std::all_of(y.begin(), y.end(), [&](double a) { return a == y[0]; })) return 0.0;
  long double mx = 0, my = 0;
  for (std::size_t k = 0; k < n; ++k) {
    mx += x[k];
    my += y[k];
  }
  mx /= n;
  my /= n;
  long double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t k = 0; k < n; ++k) {
    sxy += (x[k] - mx) * (y[k] - my);
    sxx += (x[k] - mx) * (x[k] - mx);
    syy += (y[k] - my) * (y[k] - my);
  }
  return static_cast<double>(sxy / std::sqrt(sxx * syy));
}

inline double oracle_L(const RatingsMatrix& m, const CommunityAssignment& ca) {
  const int kr = *std::max_element(ca.row_labels.begin(), ca.row_labels.end()) + 1;
  const int kc = *std::max_element(ca.col_labels.begin(), ca.col_labels.end()) + 1;
  auto members = [](const std::vector<int>& labels, int id) {
    std::vector<std::size_t> out;
    for (std::size_t n = 0; n < labels.size(); ++n)
      if (labels[n] == id) out.push_back(n);
    return out;
  };
  auto mean_sd = [](const std::vector<double>& c, double& mean, double& sd) {
    long double s = 0;
    for (double x : c) s += x;
    mean = static_cast<double>(s / c.size());
    long double ss = 0;
    for (double x : c) ss += (x - mean) * (x - mean);
    sd = static_cast<double>(std::sqrt(ss / c.size()));
    if (sd < 1e-12) sd = 0.0;
  };
  double total = 0.0;
  for (int i = 0; i < kr; ++i)
    for (int j = 0; j < kc; ++j) {
      const auto ri = members(ca.row_labels, i), cj = members(ca.col_labels, j);
      const double ni = static_cast<double>(ri.size()), nj = static_cast<double>(cj.size());
      const double size_term = std::max(0.0, (ni - 2) * (nj - 2));
      double present = 0;
      for (auto u : ri)
        for (auto v : cj) present += m.observed(u, v);
      const double density = present / (ni * nj);

      std::vector<double> row_c, col_c;
      for (auto u : ri) {
        std::vector<double> d, w;
        for (auto v : cj) {
          if (!m.observed(u, v)) continue;
          double deg = 0;
          for (auto up : ri)
            if (m.observed(up, v)) deg += m.weight(up, v);
          d.push_back(deg);
          w.push_back(m.weight(u, v));
        }
        row_c.push_back(oracle_corr(d, w));
      }
      for (auto v : cj) {
        std::vector<double> d, w;
        for (auto u : ri) {
          if (!m.observed(u, v)) continue;
          double deg = 0;
          for (auto vp : cj)
            if (m.observed(u, vp)) deg += m.weight(u, vp);
          d.push_back(deg);
          w.push_back(m.weight(u, v));
        }
        col_c.push_back(oracle_corr(d, w));
      }
      double mr, sr, mc, sc;
      mean_sd(row_c, mr, sr);
      mean_sd(col_c, mc, sc);
      total += (mr * (1 - std::sqrt(sr)) + mc * (1 - std::sqrt(sc))) * size_term * density;
    }
  return total;
}

}  // namespace nsm::testing

#endif  // NSM_TESTS_MEASURE_ORACLE_HPP_
