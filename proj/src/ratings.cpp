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
#include "nsm/ratings.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include "nsm/error.hpp"
#include "nsm/log.hpp"
#include "nsm/rng.hpp"

namespace nsm {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_cells(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      cells.push_back(trim(line.substr(start)));
      break;
    }
    cells.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
  return cells;
}

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t nl = text.find('\n', start);
    if (nl == std::string_view::npos) nl = text.size();
    lines.push_back(text.substr(start, nl - start));
    start = nl + 1;
  }
  // Trailing blank lines are not rows.
  while (!lines.empty() && trim(lines.back()).empty()) lines.pop_back();
  return lines;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out << text;
}

std::string format_double(double x) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, end);
}

std::vector<std::size_t> select_nodes(std::size_t n, double fraction,
                                      const CounterRng& rng) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto ka = rng.bits(a), kb = rng.bits(b);
    return ka != kb ? ka < kb : a < b;
  });
  auto count = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n)));
  count = std::min(count, n - 1);
  order.resize(count);
  std::sort(order.begin(), order.end());
  return order;
}

}  // namespace

RatingsMatrix::RatingsMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), values_(rows * cols, kNaN), mask_(rows * cols, 0) {}

RatingsMatrix RatingsMatrix::dense(std::size_t rows, std::size_t cols,
                                   std::vector<double> values) {
  if (values.size() != rows * cols) throw DomainError("dense: size mismatch");
  RatingsMatrix m(rows, cols);
  for (std::size_t k = 0; k < values.size(); ++k) m.set(k / cols, k % cols, values[k]);
  return m;
}

std::optional<double> RatingsMatrix::get(std::size_t u, std::size_t v) const {
  if (!observed(u, v)) return std::nullopt;
  return weight(u, v);
}

void RatingsMatrix::set(std::size_t u, std::size_t v, double w) {
  if (!std::isfinite(w)) throw DomainError("non-finite weight");
  values_[u * cols_ + v] = w;
  mask_[u * cols_ + v] = 1;
}

void RatingsMatrix::hide(std::size_t u, std::size_t v) {
  values_[u * cols_ + v] = kNaN;
  mask_[u * cols_ + v] = 0;
}

std::size_t RatingsMatrix::observed_count() const {
  return static_cast<std::size_t>(std::count(mask_.begin(), mask_.end(), 1));
}

double RatingsMatrix::density() const {
  if (mask_.empty()) return 0.0;
  return static_cast<double>(observed_count()) / static_cast<double>(mask_.size());
}

bool RatingsMatrix::fully_observed() const {
  return std::all_of(mask_.begin(), mask_.end(), [](std::uint8_t b) { return b != 0; });
}

RatingsMatrix RatingsMatrix::transposed() const {
  RatingsMatrix t(cols_, rows_);
  for (std::size_t u = 0; u < rows_; ++u)
    for (std::size_t v = 0; v < cols_; ++v)
      if (observed(u, v)) t.set(v, u, weight(u, v));
  return t;
}

RatingsMatrix RatingsMatrix::submatrix(const std::vector<std::size_t>& rows,
                                       const std::vector<std::size_t>& cols) const {
  RatingsMatrix s(rows.size(), cols.size());
  for (std::size_t a = 0; a < rows.size(); ++a)
    for (std::size_t b = 0; b < cols.size(); ++b)
      if (observed(rows[a], cols[b])) s.set(a, b, weight(rows[a], cols[b]));
  return s;
}

std::vector<double> RatingsMatrix::observed_values() const {
  std::vector<double> out;
  out.reserve(observed_count());
  for (std::size_t k = 0; k < mask_.size(); ++k)
    if (mask_[k]) out.push_back(values_[k]);
  return out;
}

bool RatingsMatrix::operator==(const RatingsMatrix& other) const {
  if (rows_ != other.rows_ || cols_ != other.cols_ || mask_ != other.mask_) return false;
  for (std::size_t k = 0; k < mask_.size(); ++k)
    if (mask_[k] && values_[k] != other.values_[k]) return false;
  return true;
}

int CommunityAssignment::row_communities() const {
  return row_labels.empty() ? 0 : *std::max_element(row_labels.begin(), row_labels.end()) + 1;
}

int CommunityAssignment::col_communities() const {
  return col_labels.empty() ? 0 : *std::max_element(col_labels.begin(), col_labels.end()) + 1;
}

void CommunityAssignment::validate() const {
  for (const auto* labels : {&row_labels, &col_labels}) {
    if (labels->empty()) throw DomainError("empty label vector");
    const int k = *std::max_element(labels->begin(), labels->end()) + 1;
    std::vector<bool> seen(static_cast<std::size_t>(std::max(k, 0)), false);
    for (int l : *labels) {
      if (l < 0) throw DomainError("negative community id");
      seen[static_cast<std::size_t>(l)] = true;
    }
    if (std::find(seen.begin(), seen.end(), false) != seen.end())
      throw DomainError("community ids are not contiguous");
  }
}

int compact_labels(std::vector<int>& labels) {
  std::unordered_map<int, int> remap;
  for (int& l : labels) {
    auto [it, inserted] = remap.try_emplace(l, static_cast<int>(remap.size()));
    l = it->second;
  }
  return static_cast<int>(remap.size());
}

std::vector<int> community_sizes(const std::vector<int>& labels) {
  std::vector<int> sizes;
  for (int l : labels) {
    if (static_cast<std::size_t>(l) >= sizes.size()) sizes.resize(static_cast<std::size_t>(l) + 1, 0);
    ++sizes[static_cast<std::size_t>(l)];
  }
  return sizes;
}

RatingsMatrix parse_csv(const std::string& text, const CsvOptions& options) {
  auto lines = split_lines(text);
  std::size_t first = options.header ? 1 : 0;
  if (lines.size() <= first) throw FormatError("csv: no data rows");
  const std::size_t rows = lines.size() - first;
  const std::size_t cols = split_cells(lines[first]).size();
  RatingsMatrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    const auto cells = split_cells(lines[first + r]);
    if (cells.size() != cols) {
      throw FormatError("csv: row " + std::to_string(r + 1) + " has " +
                        std::to_string(cells.size()) + " cells, expected " +
                        std::to_string(cols));
    }
    for (std::size_t c = 0; c < cols; ++c) {
      const std::string_view cell = cells[c];
      if (cell == options.missing_token) continue;
      double value = 0.0;
      const char* end = cell.data() + cell.size();
      auto [ptr, ec] = std::from_chars(cell.data(), end, value);
      if (cell.empty() || ec != std::errc() || ptr != end || !std::isfinite(value)) {
        throw ParseError("csv: cannot parse '" + std::string(cell) + "' at row " +
                             std::to_string(r + 1) + ", column " + std::to_string(c + 1),
                         r + 1, c + 1);
      }
      m.set(r, c, value);
    }
  }
  return m;
}

RatingsMatrix load_csv(const std::string& path, const CsvOptions& options) {
  return parse_csv(read_file(path), options);
}

std::string format_csv(const RatingsMatrix& m, const CsvOptions& options) {
  std::string out;
  for (std::size_t u = 0; u < m.rows(); ++u) {
    for (std::size_t v = 0; v < m.cols(); ++v) {
      if (v > 0) out += ',';
      out += m.observed(u, v) ? format_double(m.weight(u, v)) : options.missing_token;
    }
    out += '\n';
  }
  return out;
}

void write_csv(const std::string& path, const RatingsMatrix& m, const CsvOptions& options) {
  write_file(path, format_csv(m, options));
}

void write_mask_csv(const std::string& path, const RatingsMatrix& m) {
  std::string out;
  for (std::size_t u = 0; u < m.rows(); ++u) {
    for (std::size_t v = 0; v < m.cols(); ++v) {
      if (v > 0) out += ',';
      out += m.observed(u, v) ? '1' : '0';
    }
    out += '\n';
  }
  write_file(path, out);
}

std::vector<int> load_labels(const std::string& path) {
  const auto text = read_file(path);
  std::vector<std::pair<long, long>> rows;
  for (auto line : split_lines(text)) {
    if (trim(line).empty()) continue;
    const auto cells = split_cells(line);
    if (cells.size() != 2) throw FormatError("labels: expected 'node,community' in " + path);
    long node = 0, community = 0;
    auto r1 = std::from_chars(cells[0].data(), cells[0].data() + cells[0].size(), node);
    auto r2 = std::from_chars(cells[1].data(), cells[1].data() + cells[1].size(), community);
    if (r1.ec != std::errc() || r2.ec != std::errc()) {
      // A non-numeric first line is a header.
      if (rows.empty()) continue;
      throw FormatError("labels: bad line in " + path);
    }
    rows.emplace_back(node, community);
  }
  std::vector<int> labels(rows.size(), -1);
  for (auto [node, community] : rows) {
    if (node < 1 || static_cast<std::size_t>(node) > rows.size() || community < 1)
      throw FormatError("labels: ids must be 1-based in " + path);
    labels[static_cast<std::size_t>(node - 1)] = static_cast<int>(community - 1);
  }
  if (std::find(labels.begin(), labels.end(), -1) != labels.end())
    throw FormatError("labels: duplicate node in " + path);
  return labels;
}

void write_labels(const std::string& path, const std::vector<int>& labels) {
  std::string out = "node,community\n";
  for (std::size_t k = 0; k < labels.size(); ++k)
    out += std::to_string(k + 1) + ',' + std::to_string(labels[k] + 1) + '\n';
  write_file(path, out);
}

std::string to_string(SplitScheme scheme) {
  switch (scheme) {
    case SplitScheme::kHoldEdges: return "edges";
    case SplitScheme::kHoldNodes: return "nodes";
    case SplitScheme::kHoldNodesAndEdges: return "nodes-edges";
  }
  return "edges";
}

SplitScheme parse_split_scheme(const std::string& name) {
  if (name == "edges" || name == "hold-edges") return SplitScheme::kHoldEdges;
  if (name == "nodes" || name == "hold-nodes") return SplitScheme::kHoldNodes;
  if (name == "nodes-edges" || name == "hold-nodes-and-edges")
    return SplitScheme::kHoldNodesAndEdges;
  throw DomainError("unknown split scheme '" + name + "'");
}

Split split(const RatingsMatrix& m, const SplitSpec& spec) {
  if (!(spec.fraction > 0.0 && spec.fraction < 1.0))
    throw DomainError("split fraction must lie strictly between 0 and 1");
  const std::size_t nr = m.rows(), nc = m.cols();
  Split s{m, RatingsMatrix(nr, nc), RatingsMatrix(nr, nc),
          std::vector<bool>(nr, false), std::vector<bool>(nc, false), {}, {}};

  if (spec.scheme == SplitScheme::kHoldEdges) {
    if (m.observed_count() < 2) throw InsufficientDataError("split: need at least 2 observed edges");
    const CounterRng rng(spec.seed, streams::kSplitEdges);
    for (std::size_t u = 0; u < nr; ++u)
      for (std::size_t v = 0; v < nc; ++v)
        if (m.observed(u, v) && rng.uniform(u * nc + v) < spec.fraction) {
          s.test.set(u, v, m.weight(u, v));
          s.train.hide(u, v);
        }
  } else {
    if (nr < 2 || nc < 2) throw InsufficientDataError("split: node schemes need 2 rows and 2 columns");
    for (auto u : select_nodes(nr, spec.fraction, CounterRng(spec.seed, streams::kSplitRows)))
      s.held_rows[u] = true;
    for (auto v : select_nodes(nc, spec.fraction, CounterRng(spec.seed, streams::kSplitCols)))
      s.held_cols[v] = true;
    const CounterRng inner(spec.seed, streams::kSplitInner);
    for (std::size_t u = 0; u < nr; ++u)
      for (std::size_t v = 0; v < nc; ++v) {
        if (!m.observed(u, v) || !(s.held_rows[u] || s.held_cols[v])) continue;
        s.train.hide(u, v);
        if (spec.scheme == SplitScheme::kHoldNodes || inner.uniform(u * nc + v) < spec.fraction)
          s.test.set(u, v, m.weight(u, v));
        else
          s.revealed.set(u, v, m.weight(u, v));
      }
  }

  for (std::size_t u = 0; u < nr; ++u) {
    if (s.held_rows[u]) continue;
    bool any = false;
    for (std::size_t v = 0; v < nc && !any; ++v) any = s.train.observed(u, v);
    if (!any) s.empty_rows.push_back(u);
  }
  for (std::size_t v = 0; v < nc; ++v) {
    if (s.held_cols[v]) continue;
    bool any = false;
    for (std::size_t u = 0; u < nr && !any; ++u) any = s.train.observed(u, v);
    if (!any) s.empty_cols.push_back(v);
  }
  if (!s.empty_rows.empty() || !s.empty_cols.empty()) {
    std::string msg = "split: training set has unobserved";
    for (auto u : s.empty_rows) msg += " row " + std::to_string(u + 1);
    for (auto v : s.empty_cols) msg += " col " + std::to_string(v + 1);
    warn(msg);
  }
  return s;
}

double subnetwork_density(const RatingsMatrix& m, const CommunityAssignment& ca, int i, int j) {
  std::size_t cells = 0, present = 0;
  for (std::size_t u = 0; u < m.rows(); ++u) {
    if (ca.row_labels[u] != i) continue;
    for (std::size_t v = 0; v < m.cols(); ++v) {
      if (ca.col_labels[v] != j) continue;
      ++cells;
      present += m.observed(u, v) ? 1 : 0;
    }
  }
  return cells == 0 ? 0.0 : static_cast<double>(present) / static_cast<double>(cells);
}

}  // namespace nsm
