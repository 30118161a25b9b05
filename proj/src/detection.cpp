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
#include "nsm/detection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <set>

#include "nsm/error.hpp"
#include "nsm/parallel.hpp"

namespace nsm {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void relabel(std::vector<int>& labels, int from, int to) {
  std::replace(labels.begin(), labels.end(), from, to);
}

Labels compacted(Labels labels) {
  compact_labels(labels.rows);
  compact_labels(labels.cols);
  return labels;
}

int min_community_size(const std::vector<int>& labels) {
  int smallest = std::numeric_limits<int>::max();
  for (int s : community_sizes(labels))
    if (s > 0) smallest = std::min(smallest, s);
  return smallest;
}

std::vector<int> present_ids(const std::vector<int>& labels) {
  std::set<int> ids(labels.begin(), labels.end());
  return {ids.begin(), ids.end()};
}

void push_unique(std::vector<std::size_t>& queue, std::size_t node) {
  if (std::find(queue.begin(), queue.end(), node) == queue.end()) queue.push_back(node);
}

// Members of each other-side community, ascending ids then ascending nodes.
std::vector<std::vector<std::size_t>> group_members(std::span<const int> labels) {
  std::map<int, std::vector<std::size_t>> groups;
  for (std::size_t n = 0; n < labels.size(); ++n) groups[labels[n]].push_back(n);
  std::vector<std::vector<std::size_t>> out;
  for (auto& [id, members] : groups) out.push_back(std::move(members));
  return out;
}

// score(i, k) = sum over other-side communities j of
//   max(0, n_k - 2) * corr(aggregate_i on j, aggregate_k on j).
// Row-major |from| x |to| table.
std::vector<double> regroup_scores(const BipartiteNetwork& oriented, std::span<const int> labels,
                                   std::span<const int> other_labels,
                                   const std::vector<int>& from, const std::vector<int>& to) {
  const CommunityAggregate aggregate(oriented, labels);
  const auto sizes = community_sizes({labels.begin(), labels.end()});
  const auto groups = group_members(other_labels);
  std::vector<double> xs, ys;
  std::vector<double> scores(from.size() * to.size(), 0.0);
  for (std::size_t a = 0; a < from.size(); ++a) {
    const auto si = aggregate.sums(from[a]);
    for (std::size_t b = 0; b < to.size(); ++b) {
      const double factor = std::max(0, sizes[static_cast<std::size_t>(to[b])] - 2);
      if (factor == 0.0) continue;
      const auto sk = aggregate.sums(to[b]);
      double score = 0.0;
      for (const auto& members : groups) {
        xs.clear();
        ys.clear();
        for (auto v : members) {
          xs.push_back(si[v]);
          ys.push_back(sk[v]);
        }
        score += factor * pairwise_correlation(xs.data(), ys.data(), xs.size(), kMinAggregatePairs);
      }
      scores[a * to.size() + b] = score;
    }
  }
  return scores;
}

// First maximum among allowed targets; nullopt when every allowed score is 0
// (all correlations degenerate) or nothing is allowed.
std::optional<int> pick_target(const std::vector<double>& scores, std::size_t row,
                               const std::vector<int>& to, std::optional<int> banned) {
  std::optional<int> best;
  double best_score = 0.0;
  bool informative = false;
  for (std::size_t b = 0; b < to.size(); ++b) {
    if (banned && to[b] == *banned) continue;
    const double s = scores[row * to.size() + b];
    if (s != 0.0) informative = true;
    if (!best || s > best_score) {
      best = to[b];
      best_score = s;
    }
  }
  if (!informative) return std::nullopt;
  return best;
}

struct SideRegroup {
  const BipartiteNetwork* oriented;
  std::vector<int>* labels;
  const std::vector<int>* other_labels;
  const std::vector<int>* previous;
  const std::vector<std::size_t>* wrong;
  int previous_count;
};

std::vector<double> side_scores_a(const SideRegroup& s, std::vector<int>& from,
                                  std::vector<int>& to) {
  for (int id : present_ids(*s.labels)) (id >= s.previous_count ? from : to).push_back(id);
  return regroup_scores(*s.oriented, *s.labels, *s.other_labels, from, to);
}

void apply_regroup_a(const SideRegroup& s, const std::vector<double>& scores,
                     const std::vector<int>& from, const std::vector<int>& to, bool ban) {
  std::vector<bool> is_wrong(s.labels->size(), false);
  for (auto n : *s.wrong) is_wrong[n] = true;
  auto& labels = *s.labels;
  for (std::size_t a = 0; a < from.size(); ++a) {
    std::vector<std::size_t> members;
    for (std::size_t n = 0; n < labels.size(); ++n)
      if (labels[n] == from[a]) members.push_back(n);
    for (auto n : members) {
      std::optional<int> banned;
      if (ban && is_wrong[n]) banned = (*s.previous)[n];
      if (auto target = pick_target(scores, a, to, banned)) labels[n] = *target;
    }
  }
}

std::vector<double> side_scores_b(const SideRegroup& s, std::vector<int>& ids) {
  ids = present_ids(*s.labels);
  return regroup_scores(*s.oriented, *s.labels, *s.other_labels, ids, ids);
}

void apply_regroup_b(const SideRegroup& s, const std::vector<double>& scores,
                     const std::vector<int>& ids, bool ban) {
  std::vector<bool> is_wrong(s.labels->size(), false);
  for (auto n : *s.wrong) is_wrong[n] = true;
  auto& labels = *s.labels;
  // Sequential: a community already moved into a later id travels with it.
  for (std::size_t a = 0; a < ids.size(); ++a) {
    std::vector<std::size_t> members;
    for (std::size_t n = 0; n < labels.size(); ++n)
      if (labels[n] == ids[a]) members.push_back(n);
    for (auto n : members) {
      std::optional<int> banned;
      if (ban && is_wrong[n]) banned = (*s.previous)[n];
      if (auto target = pick_target(scores, a, ids, banned)) labels[n] = *target;
    }
  }
}

// Flags nodes of one side from its correlation table (n x k_other).
struct Flags {
  std::vector<std::size_t> wrong;
  std::vector<int> corresponding;  // opposite communities with negatives
};

Flags flag_nodes(const std::vector<double>& table, int k_other, const std::vector<int>& labels,
                 bool flag_pairs) {
  Flags f;
  const auto sizes = community_sizes(labels);
  const auto k = static_cast<std::size_t>(k_other);
  for (std::size_t n = 0; n < labels.size(); ++n) {
    const double* row = &table[n * k];
    const double lo = k == 0 ? 0.0 : *std::min_element(row, row + k);
    const double hi = k == 0 ? 0.0 : *std::max_element(row, row + k);
    const bool pair = flag_pairs && sizes[static_cast<std::size_t>(labels[n])] == 2;
    if (lo < 0.0 || hi == 0.0 || pair) {
      f.wrong.push_back(n);
      for (std::size_t j = 0; j < k; ++j)
        if (row[j] < 0.0) f.corresponding.push_back(static_cast<int>(j));
    }
  }
  return f;
}

// The single opposite community blamed by every flagged node, if the flag
// count reaches its size.
std::optional<int> blamed_community(const Flags& f, const std::vector<int>& other_labels) {
  if (f.corresponding.empty()) return std::nullopt;
  const auto [lo, hi] = std::minmax_element(f.corresponding.begin(), f.corresponding.end());
  if (*lo != *hi) return std::nullopt;
  const auto members = std::count(other_labels.begin(), other_labels.end(), *lo);
  if (static_cast<std::ptrdiff_t>(f.corresponding.size()) < members) return std::nullopt;
  return *lo;
}

void flag_community(std::vector<std::size_t>& wrong, const std::vector<int>& labels, int id) {
  for (std::size_t n = 0; n < labels.size(); ++n)
    if (labels[n] == id) push_unique(wrong, n);
}

}  // namespace

CommunityAggregate::CommunityAggregate(const BipartiteNetwork& oriented,
                                       std::span<const int> labels)
    : width_(oriented.cols()) {
  if (labels.size() != oriented.rows()) throw DomainError("aggregate: label length mismatch");
  int max_id = -1;
  for (int l : labels) max_id = std::max(max_id, l);
  const auto k = static_cast<std::size_t>(max_id + 1);
  sums_.assign(k * width_, kNaN);
  counts_.assign(k * width_, 0);
  active_.assign(k, false);
  for (std::size_t n = 0; n < labels.size(); ++n) {
    const int id = labels[n];
    active_[static_cast<std::size_t>(id)] = true;
    const double* w = oriented.row(n);
    for (std::size_t v = 0; v < width_; ++v) {
      if (std::isnan(w[v])) continue;
      const auto at = index(id, v);
      sums_[at] = counts_[at] == 0 ? w[v] : sums_[at] + w[v];
      ++counts_[at];
    }
  }
}

bool CommunityAggregate::active(int id) const {
  return id >= 0 && static_cast<std::size_t>(id) < active_.size() &&
         active_[static_cast<std::size_t>(id)];
}

std::vector<int> CommunityAggregate::ids() const {
  std::vector<int> out;
  for (std::size_t id = 0; id < active_.size(); ++id)
    if (active_[id]) out.push_back(static_cast<int>(id));
  return out;
}

std::span<const double> CommunityAggregate::sums(int id) const {
  return {sums_.data() + index(id, 0), width_};
}

double CommunityAggregate::total(int id) const {
  double t = 0.0;
  for (double s : sums(id))
    if (!std::isnan(s)) t += s;
  return t;
}

double CommunityAggregate::correlation(int a, int b) const {
  return pairwise_correlation(sums(a).data(), sums(b).data(), width_, kMinAggregatePairs);
}

void CommunityAggregate::merge(int into, int from) {
  for (std::size_t v = 0; v < width_; ++v) {
    const auto src = index(from, v), dst = index(into, v);
    if (counts_[src] == 0) continue;
    sums_[dst] = counts_[dst] == 0 ? sums_[src] : sums_[dst] + sums_[src];
    counts_[dst] += counts_[src];
  }
  active_[static_cast<std::size_t>(from)] = false;
}

bool attempt_merge(const BipartiteNetwork& oriented, CommunityAggregate& aggregate,
                   std::vector<int>& labels, std::deque<int>& order,
                   std::span<const int> other_labels, double& measure) {
  if (order.empty()) return false;
  const int a = order.front();
  std::optional<int> best;
  double best_corr = 0.0;
  for (int b : aggregate.ids()) {
    if (b == a) continue;
    const double c = aggregate.correlation(a, b);
    if (!best || c > best_corr) {
      best = b;
      best_corr = c;
    }
  }
  if (!best) return false;
  std::vector<int> merged = labels;
  relabel(merged, *best, a);
  const double candidate = measure_total(oriented, merged, other_labels);
  if (!(candidate >= measure)) return false;
  labels = std::move(merged);
  aggregate.merge(a, *best);
  std::replace(order.begin(), order.end(), *best, a);
  measure = candidate;
  return true;
}

bool sweep(const BipartiteNetwork& oriented, CommunityAggregate& aggregate,
           std::vector<int>& labels, std::span<const int> other_labels, double& measure) {
  struct Pair {
    int a, b;
    double corr;
  };
  const auto ids = aggregate.ids();
  std::vector<Pair> pairs;
  for (std::size_t x = 0; x < ids.size(); ++x)
    for (std::size_t y = x + 1; y < ids.size(); ++y)
      pairs.push_back({ids[x], ids[y], aggregate.correlation(ids[x], ids[y])});
  std::stable_sort(pairs.begin(), pairs.end(),
                   [](const Pair& p, const Pair& q) { return p.corr > q.corr; });
  for (const auto& p : pairs) {
    std::vector<int> merged = labels;
    relabel(merged, p.b, p.a);
    const double candidate = measure_total(oriented, merged, other_labels);
    if (candidate >= measure) {
      labels = std::move(merged);
      aggregate.merge(p.a, p.b);
      measure = candidate;
      return true;
    }
  }
  return false;
}

Candidate agglom(const NetworkPair& nets, const Labels& start) {
  Labels labels = compacted(start);
  CommunityAggregate rows(nets.net, labels.rows);
  CommunityAggregate cols(nets.net_t, labels.cols);
  double measure = nets.measure(labels);

  auto by_total = [](const CommunityAggregate& agg) {
    auto ids = agg.ids();
    std::vector<double> totals(ids.size());
    for (std::size_t k = 0; k < ids.size(); ++k) totals[k] = agg.total(ids[k]);
    std::vector<std::size_t> idx(ids.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t x, std::size_t y) { return totals[x] > totals[y]; });
    std::deque<int> order;
    for (auto k : idx) order.push_back(ids[k]);
    return order;
  };

  while (true) {
    bool changed = false;
    auto row_order = by_total(rows);
    auto col_order = by_total(cols);
    while (!row_order.empty() || !col_order.empty()) {
      if (!row_order.empty()) {
        changed |= attempt_merge(nets.net, rows, labels.rows, row_order, labels.cols, measure);
        row_order.pop_front();
      }
      if (!col_order.empty()) {
        changed |= attempt_merge(nets.net_t, cols, labels.cols, col_order, labels.rows, measure);
        col_order.pop_front();
      }
    }
    if (!changed) {
      changed |= sweep(nets.net, rows, labels.rows, labels.cols, measure);
      changed |= sweep(nets.net_t, cols, labels.cols, labels.rows, measure);
    }
    if (!changed) break;
  }
  return {compacted(std::move(labels)), measure};
}

Removal remove_nodes_a(const NetworkPair& nets, const Labels& input) {
  Removal r;
  r.previous = compacted(input);
  const auto tables = correlation_tables(nets.net, r.previous.rows, r.previous.cols);
  r.previous_row_communities = tables.row_communities;
  r.previous_col_communities = tables.col_communities;

  auto row_flags = flag_nodes(tables.rows, tables.col_communities, r.previous.rows, false);
  auto col_flags = flag_nodes(tables.cols, tables.row_communities, r.previous.cols, false);
  r.wrong_rows = row_flags.wrong;
  r.wrong_cols = col_flags.wrong;
  if (auto c = blamed_community(row_flags, r.previous.cols)) {
    r.wrong_rows.clear();
    flag_community(r.wrong_cols, r.previous.cols, *c);
  }
  if (auto i = blamed_community(col_flags, r.previous.rows)) {
    r.wrong_cols.clear();
    flag_community(r.wrong_rows, r.previous.rows, *i);
  }

  r.labels = r.previous;
  int next = r.previous_row_communities;
  for (auto u : r.wrong_rows) r.labels.rows[u] = next++;
  next = r.previous_col_communities;
  for (auto v : r.wrong_cols) r.labels.cols[v] = next++;
  r.measure = nets.measure(r.labels);
  return r;
}

Removal remove_nodes_b(const NetworkPair& nets, const Labels& input) {
  Removal r;
  r.previous = compacted(input);
  const auto tables = correlation_tables(nets.net, r.previous.rows, r.previous.cols);
  r.previous_row_communities = tables.row_communities;
  r.previous_col_communities = tables.col_communities;

  auto row_flags = flag_nodes(tables.rows, tables.col_communities, r.previous.rows, true);
  auto col_flags = flag_nodes(tables.cols, tables.row_communities, r.previous.cols, true);
  r.wrong_rows = row_flags.wrong;
  r.wrong_cols = col_flags.wrong;
  if (auto c = blamed_community(row_flags, r.previous.cols))
    flag_community(r.wrong_cols, r.previous.cols, *c);
  if (auto i = blamed_community(col_flags, r.previous.rows))
    flag_community(r.wrong_rows, r.previous.rows, *i);

  r.labels = r.previous;
  auto regroup = [](const std::vector<double>& table, int k_other, const std::vector<int>& prev,
                    int k_side, const std::vector<std::size_t>& wrong, std::vector<int>& out) {
    const auto sizes = community_sizes(prev);
    std::vector<bool> is_wrong(prev.size(), false);
    for (auto n : wrong) is_wrong[n] = true;
    int next = k_side;
    for (int i = 0; i < k_side; ++i) {
      std::map<std::vector<bool>, int> pattern_ids;
      for (std::size_t n = 0; n < prev.size(); ++n) {
        if (prev[n] != i || !is_wrong[n]) continue;
        if (sizes[static_cast<std::size_t>(i)] == 2) {
          out[n] = next++;
          continue;
        }
        std::vector<bool> pattern(static_cast<std::size_t>(k_other));
        for (std::size_t j = 0; j < pattern.size(); ++j)
          pattern[j] = table[n * pattern.size() + j] < 0.0;
        auto [it, inserted] = pattern_ids.try_emplace(pattern, next);
        if (inserted) ++next;
        out[n] = it->second;
      }
    }
  };
  regroup(tables.rows, tables.col_communities, r.previous.rows, r.previous_row_communities,
          r.wrong_rows, r.labels.rows);
  regroup(tables.cols, tables.row_communities, r.previous.cols, r.previous_col_communities,
          r.wrong_cols, r.labels.cols);
  r.measure = nets.measure(r.labels);
  return r;
}

Candidate regroup_nodes_a(const NetworkPair& nets, const Removal& removal, bool ban_remain) {
  Labels labels = removal.labels;
  const Labels before = labels;
  SideRegroup rows{&nets.net, &labels.rows, &before.cols, &removal.previous.rows,
                   &removal.wrong_rows, removal.previous_row_communities};
  SideRegroup cols{&nets.net_t, &labels.cols, &before.rows, &removal.previous.cols,
                   &removal.wrong_cols, removal.previous_col_communities};
  std::vector<int> row_from, row_to, col_from, col_to;
  const auto row_scores = side_scores_a(rows, row_from, row_to);
  const auto col_scores = side_scores_a(cols, col_from, col_to);
  apply_regroup_a(rows, row_scores, row_from, row_to, ban_remain);
  apply_regroup_a(cols, col_scores, col_from, col_to, ban_remain);
  labels = compacted(std::move(labels));
  return {labels, nets.measure(labels)};
}

Candidate regroup_nodes_b(const NetworkPair& nets, const Removal& removal, bool ban_remain) {
  Labels labels = removal.labels;
  const Labels before = labels;
  SideRegroup rows{&nets.net, &labels.rows, &before.cols, &removal.previous.rows,
                   &removal.wrong_rows, removal.previous_row_communities};
  SideRegroup cols{&nets.net_t, &labels.cols, &before.rows, &removal.previous.cols,
                   &removal.wrong_cols, removal.previous_col_communities};
  std::vector<int> row_ids, col_ids;
  const auto row_scores = side_scores_b(rows, row_ids);
  const auto col_scores = side_scores_b(cols, col_ids);
  apply_regroup_b(rows, row_scores, row_ids, ban_remain);
  apply_regroup_b(cols, col_scores, col_ids, ban_remain);
  labels = compacted(std::move(labels));
  return {labels, nets.measure(labels)};
}

char candidate_letter(std::size_t index) { return static_cast<char>('a' + index); }

OneStep get_largest_one_step_L(const NetworkPair& nets, const Labels& labels) {
  const Removal a = remove_nodes_a(nets, labels);
  const Removal g = remove_nodes_b(nets, labels);

  OneStep step;
  step.candidates.resize(kOneStepCandidates);
  auto& c = step.candidates;
  c[0] = {compacted(a.labels), a.measure};
  c[6] = {compacted(g.labels), g.measure};
  // Independent chains; each writes only its own slots.
  parallel_for(7, [&](std::size_t chain) {
    switch (chain) {
      case 0: c[1] = regroup_nodes_a(nets, a, false); c[4] = agglom(nets, c[1].labels); break;
      case 1: c[2] = regroup_nodes_a(nets, a, true); c[5] = agglom(nets, c[2].labels); break;
      case 2: c[3] = agglom(nets, a.labels); break;
      case 3: c[7] = regroup_nodes_b(nets, g, false); c[10] = agglom(nets, c[7].labels); break;
      case 4: c[8] = regroup_nodes_b(nets, g, true); c[11] = agglom(nets, c[8].labels); break;
      case 5: c[9] = agglom(nets, g.labels); break;
      case 6: c[12] = regroup_nodes_b(nets, a, false); c[13] = agglom(nets, c[12].labels); break;
    }
  });

  for (std::size_t k = 1; k < c.size(); ++k)
    if (c[k].measure > c[step.best].measure) step.best = k;
  for (std::size_t k = 0; k < c.size(); ++k) {
    if (min_community_size(c[k].labels.rows) <= 2 || min_community_size(c[k].labels.cols) <= 2)
      continue;
    if (!step.best_larger || c[k].measure > c[*step.best_larger].measure) step.best_larger = k;
  }
  return step;
}

nlohmann::json to_json(const TraceStep& step) {
  return {{"cycle", step.cycle},
          {"heuristic", step.heuristic},
          {"L_before", step.before},
          {"L_after", step.after}};
}

FixResult fix_communities(const NetworkPair& nets, const Labels& labels, double measure,
                          int max_repair_cycles) {
  if (max_repair_cycles < 1) throw DomainError("max_repair_cycles must be >= 1");
  FixResult r{compacted(labels), measure, 0, {}};
  double old_measure = 0.0;

  auto adopt = [&](const Candidate& c, std::string heuristic) {
    if (!(c.measure > r.measure)) throw Error("internal: adopted a non-improving clustering");
    r.trace.push_back({r.cycles, std::move(heuristic), r.measure, c.measure});
    r.labels = c.labels;
    r.measure = c.measure;
  };

  while (old_measure < r.measure && r.cycles < max_repair_cycles) {
    ++r.cycles;
    old_measure = r.measure;
    const OneStep step = get_largest_one_step_L(nets, r.labels);
    const Candidate& best = step.candidates[step.best];
    if (best.measure > old_measure) {
      adopt(best, std::string(1, candidate_letter(step.best)));
      continue;
    }
    if (step.best_larger && step.candidates[*step.best_larger].labels != r.labels) {
      const OneStep again = get_largest_one_step_L(nets, step.candidates[*step.best_larger].labels);
      const Candidate& second = again.candidates[again.best];
      if (second.measure > old_measure) {
        adopt(second, std::string("larger-") + candidate_letter(*step.best_larger) + ">" +
                          candidate_letter(again.best));
        continue;
      }
    }
    // Last resort: every pairwise merge on each side.
    std::optional<Candidate> merged;
    std::string which;
    for (int side = 0; side < 2; ++side) {
      const auto& current = side == 0 ? r.labels.rows : r.labels.cols;
      const auto ids = present_ids(current);
      for (std::size_t x = 0; x < ids.size(); ++x)
        for (std::size_t y = x + 1; y < ids.size(); ++y) {
          Labels trial = r.labels;
          relabel(side == 0 ? trial.rows : trial.cols, ids[y], ids[x]);
          const double m = nets.measure(trial);
          if (!merged || m > merged->measure) {
            merged = Candidate{compacted(std::move(trial)), m};
            which = side == 0 ? "merge-rows" : "merge-cols";
          }
        }
    }
    if (merged && merged->measure > old_measure) adopt(*merged, which);
  }
  return r;
}

DetectionResult detect(const RatingsMatrix& m, const DetectionConfig& cfg) {
  if (m.observed_count() == 0) throw InsufficientDataError("detect: no observed edges");
  Labels start;
  start.rows.resize(m.rows());
  start.cols.resize(m.cols());
  std::iota(start.rows.begin(), start.rows.end(), 0);
  std::iota(start.cols.begin(), start.cols.end(), 0);
  if (cfg.warm_rows) {
    if (cfg.warm_rows->size() != m.rows()) throw DomainError("warm-start rows: length mismatch");
    start.rows = *cfg.warm_rows;
  }
  if (cfg.warm_cols) {
    if (cfg.warm_cols->size() != m.cols()) throw DomainError("warm-start cols: length mismatch");
    start.cols = *cfg.warm_cols;
  }

  const NetworkPair nets(m);
  const Candidate initial = agglom(nets, start);
  FixResult fixed = fix_communities(nets, initial.labels, initial.measure, cfg.max_repair_cycles);

  DetectionResult result;
  result.assignment = {fixed.labels.rows, fixed.labels.cols};
  compact_labels(result.assignment.row_labels);
  compact_labels(result.assignment.col_labels);
  result.breakdown =
      measure_breakdown(nets.net, result.assignment.row_labels, result.assignment.col_labels);
  result.agglomeration_measure = initial.measure;
  result.cycles = fixed.cycles;
  result.trace = std::move(fixed.trace);
  return result;
}

int assign_heldout(const RatingsMatrix& train, const CommunityAssignment& fit,
                   std::span<const double> edges, Side side) {
  const bool rows = side == Side::kRows;
  const RatingsMatrix oriented = rows ? train : train.transposed();
  const auto& side_labels = rows ? fit.row_labels : fit.col_labels;
  const auto& other_labels = rows ? fit.col_labels : fit.row_labels;
  if (edges.size() != oriented.cols()) throw DomainError("assign_heldout: edge vector length");
  if (std::none_of(edges.begin(), edges.end(), [](double w) { return !std::isnan(w); }))
    throw ColdStartError("cold start: held-out node has no observed edges");

  RatingsMatrix augmented(oriented.rows() + 1, oriented.cols());
  for (std::size_t u = 0; u < oriented.rows(); ++u)
    for (std::size_t v = 0; v < oriented.cols(); ++v)
      if (oriented.observed(u, v)) augmented.set(u, v, oriented.weight(u, v));
  for (std::size_t v = 0; v < edges.size(); ++v)
    if (!std::isnan(edges[v])) augmented.set(oriented.rows(), v, edges[v]);
  const BipartiteNetwork net(augmented);

  std::vector<int> labels = side_labels;
  labels.push_back(0);
  const int k = *std::max_element(side_labels.begin(), side_labels.end()) + 1;
  int best = 0;
  double best_measure = -std::numeric_limits<double>::infinity();
  for (int c = 0; c < k; ++c) {
    labels.back() = c;
    const double m = measure_total(net, labels, other_labels);
    if (m > best_measure) {
      best = c;
      best_measure = m;
    }
  }
  return best;
}

}  // namespace nsm
