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
#ifndef NSM_DETECTION_HPP_
#define NSM_DETECTION_HPP_

#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "nsm/measure.hpp"
#include "nsm/ratings.hpp"

namespace nsm {

// Working labels of both sides. Ids are non-negative but may have gaps while
// the greedy search is running.
struct Labels {
  std::vector<int> rows;
  std::vector<int> cols;
  bool operator==(const Labels&) const = default;
};

// Both networks of a bipartite problem: the matrix and its transpose. Every
// side-generic routine takes the oriented network in which the side being
// modified is the row side; L is invariant under this transposition.
struct NetworkPair {
  explicit NetworkPair(const RatingsMatrix& m) : net(m), net_t(net.transposed()) {}
  BipartiteNetwork net;
  BipartiteNetwork net_t;

  double measure(const Labels& labels) const {
    return measure_total(net, labels.rows, labels.cols);
  }
};

// Per-community sums of observed weights towards every node of the other side
// (a community treated as a "supernode"). NaN where no edge is observed.
class CommunityAggregate {
 public:
  CommunityAggregate(const BipartiteNetwork& oriented, std::span<const int> labels);

  std::size_t width() const { return width_; }
  bool active(int id) const;
  // Active ids in ascending order.
  std::vector<int> ids() const;
  std::span<const double> sums(int id) const;
  int observed(int id, std::size_t k) const { return counts_[index(id, k)]; }
  double total(int id) const;
  // Pairwise-complete correlation, 0 with fewer than 3 complete pairs.
  double correlation(int a, int b) const;
  // Adds community from into community into and deactivates from.
  void merge(int into, int from);

 private:
  std::size_t index(int id, std::size_t k) const {
    return static_cast<std::size_t>(id) * width_ + k;
  }
  std::size_t width_ = 0;
  std::vector<double> sums_;
  std::vector<int> counts_;
  std::vector<bool> active_;
};

inline constexpr std::size_t kMinAggregatePairs = 3;

// One greedy merge attempt for the head of order (community A): A absorbs the
// community whose aggregate correlates best with A's (ties: lowest id) iff L
// does not drop. On success the absorbed id is replaced by A in order and
// measure is updated. The caller dequeues the head.
bool attempt_merge(const BipartiteNetwork& oriented, CommunityAggregate& aggregate,
                   std::vector<int>& labels, std::deque<int>& order,
                   std::span<const int> other_labels, double& measure);

// Walks community pairs by decreasing aggregate correlation and performs the
// first merge that does not lower L. At most one merge per call.
bool sweep(const BipartiteNetwork& oriented, CommunityAggregate& aggregate,
           std::vector<int>& labels, std::span<const int> other_labels, double& measure);

struct Candidate {
  Labels labels;
  double measure = 0.0;
};

// Alternating greedy agglomeration from the given labels. Output labels are
// compacted.
Candidate agglom(const NetworkPair& nets, const Labels& start);

struct Removal {
  Labels labels;    // old ids kept; removed nodes carry ids >= previous count
  Labels previous;  // compacted input labels
  int previous_row_communities = 0;
  int previous_col_communities = 0;
  std::vector<std::size_t> wrong_rows;
  std::vector<std::size_t> wrong_cols;
  double measure = 0.0;
};

// Every node with a negative correlation towards some opposite community, or
// no positive one, becomes a singleton; if all of one side's problems point at
// a single opposite community that is not larger than the number of flagged
// nodes, that community is flagged instead.
Removal remove_nodes_a(const NetworkPair& nets, const Labels& labels);
// As remove_nodes_a, but also flags members of size-2 communities, keeps row
// flags when a whole opposite community is flagged, and groups flagged nodes
// from one community by their pattern of negative correlations. Size-2
// communities are always split into two.
Removal remove_nodes_b(const NetworkPair& nets, const Labels& labels);

// Places each new community into the pre-existing community k maximising
//   sum_j max(0, n_k - 2) corr(aggregate of the new community on j,
//                               aggregate of k on j).
// With ban_remain, removed nodes may not return to their previous community.
Candidate regroup_nodes_a(const NetworkPair& nets, const Removal& removal, bool ban_remain);
// Same score, but every community is moved to its argmax over all communities
// (itself included), so pre-existing communities can fuse.
Candidate regroup_nodes_b(const NetworkPair& nets, const Removal& removal, bool ban_remain);

struct OneStep {
  // Candidates a..n in order.
  std::vector<Candidate> candidates;
  std::size_t best = 0;
  // Best candidate whose communities all have more than two members.
  std::optional<std::size_t> best_larger;
};

inline constexpr std::size_t kOneStepCandidates = 14;
char candidate_letter(std::size_t index);

OneStep get_largest_one_step_L(const NetworkPair& nets, const Labels& labels);

struct TraceStep {
  int cycle = 0;
  std::string heuristic;
  double before = 0.0;
  double after = 0.0;
};

nlohmann::json to_json(const TraceStep& step);

struct FixResult {
  Labels labels;
  double measure = 0.0;
  int cycles = 0;
  std::vector<TraceStep> trace;
};

FixResult fix_communities(const NetworkPair& nets, const Labels& labels, double measure,
                          int max_repair_cycles);

struct DetectionConfig {
  std::optional<std::vector<int>> warm_rows;
  std::optional<std::vector<int>> warm_cols;
  int max_repair_cycles = 50;
  std::uint64_t seed = 0;
};

struct DetectionResult {
  CommunityAssignment assignment;
  MeasureBreakdown breakdown;
  double agglomeration_measure = 0.0;
  int cycles = 0;
  std::vector<TraceStep> trace;
};

// Agglomeration from singletons (or warm-start labels) followed by the repair
// loop. The search itself is deterministic; seed is recorded for provenance.
DetectionResult detect(const RatingsMatrix& m, const DetectionConfig& cfg = {});

// Community on the given side that maximises L when a new node with these
// edges (NaN = unobserved, one entry per node of the other side) joins it.
// Ties go to the lowest id. Throws ColdStartError when no edge is observed.
int assign_heldout(const RatingsMatrix& train, const CommunityAssignment& fit,
                   std::span<const double> edges, Side side);

}  // namespace nsm

#endif  // NSM_DETECTION_HPP_
