#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <limits>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "embedlab/error.hpp"
#include "embedlab/point.hpp"

namespace embedlab {

enum class SpaceLabel { MSpace, N0Space };

inline const char* to_string(SpaceLabel label) {
  return label == SpaceLabel::MSpace ? "M" : "N0";
}

// rho on N0: the root plays 0, integers play themselves.
inline int n0_distance(const PointM& x, const PointM& y) {
  if (x == y) return 0;
  return (x.is_root() || y.is_root()) ? 1 : 2;
}

inline int closed_form_distance(SpaceLabel label, const PointM& x, const PointM& y) {
  return label == SpaceLabel::MSpace ? distance(x, y) : n0_distance(x, y);
}

// Finite metric space on points of M. Canonical truncations serve distances
// from the closed-form table; spaces built from an explicit matrix (file
// input, tampered copies) store it densely. Immutable once constructed.
class TruncatedSpace {
 public:
  static constexpr int kDefaultMaxLevel = 20;

  // M_n: root, 1..n, then every nonempty subset of {1..n} by ascending mask.
  static TruncatedSpace m_space(int n, int max_level = kDefaultMaxLevel) {
    if (n < 1 || n > max_level || n > 62)
      throw Error(ErrorKind::SizeLimit,
                  "truncation level " + std::to_string(n) + " outside 1.." +
                      std::to_string(std::min(max_level, 62)));
    TruncatedSpace s;
    s.label_ = SpaceLabel::MSpace;
    s.level_ = n;
    const std::uint64_t subsets = (std::uint64_t{1} << n) - 1;
    s.points_.reserve(static_cast<std::size_t>(1 + n + subsets));
    s.points_.push_back(PointM::root());
    for (int k = 1; k <= n; ++k) s.points_.push_back(PointM::integer(k));
    for (std::uint64_t mask = 1; mask <= subsets; ++mask)
      s.points_.push_back(PointM::from_mask(mask));
    return s;
  }

  // (N0, rho) truncated to {0, 1, ..., n}.
  static TruncatedSpace n0_space(int n) {
    if (n < 1 || n > PointM::kMaxElement)
      throw Error(ErrorKind::SizeLimit,
                  "N0 truncation level " + std::to_string(n) + " outside 1.." +
                      std::to_string(PointM::kMaxElement));
    TruncatedSpace s;
    s.label_ = SpaceLabel::N0Space;
    s.level_ = n;
    s.points_.push_back(PointM::root());
    for (int k = 1; k <= n; ++k) s.points_.push_back(PointM::integer(k));
    return s;
  }

  // Arbitrary distance table over distinct points; no metric checks here
  // (see validate_metric).
  static TruncatedSpace from_matrix(SpaceLabel label, int n,
                                    std::vector<PointM> points,
                                    const std::vector<std::vector<int>>& dist) {
    if (points.empty()) throw Error(ErrorKind::Validation, "space has no points");
    if (dist.size() != points.size())
      throw Error(ErrorKind::Validation, "distance matrix row count mismatch");
    TruncatedSpace s;
    s.label_ = label;
    s.level_ = n;
    s.points_ = std::move(points);
    const std::size_t size = s.points_.size();
    s.dense_.reserve(size * size);
    for (const auto& row : dist) {
      if (row.size() != size)
        throw Error(ErrorKind::Validation, "distance matrix is not square");
      s.dense_.insert(s.dense_.end(), row.begin(), row.end());
    }
    s.lookup_.reserve(size);
    for (std::size_t i = 0; i < size; ++i) {
      if (!s.lookup_.emplace(s.points_[i], i).second)
        throw Error(ErrorKind::Validation,
                    "duplicate point " + s.points_[i].to_string());
    }
    return s;
  }

  SpaceLabel label() const { return label_; }
  int level() const { return level_; }
  std::size_t size() const { return points_.size(); }
  const std::vector<PointM>& points() const { return points_; }
  const PointM& point(std::size_t i) const { return points_[i]; }
  bool is_dense() const { return !dense_.empty(); }

  std::optional<std::size_t> index_of(const PointM& p) const {
    if (is_dense()) {
      auto it = lookup_.find(p);
      if (it == lookup_.end()) return std::nullopt;
      return it->second;
    }
    const auto n = static_cast<std::uint64_t>(level_);
    switch (p.kind()) {
      case PointM::Kind::Root: return 0;
      case PointM::Kind::Integer:
        if (static_cast<std::uint64_t>(p.value()) > n) return std::nullopt;
        return static_cast<std::size_t>(p.value());
      case PointM::Kind::FiniteSet:
        if (label_ != SpaceLabel::MSpace || p.max_element() > level_)
          return std::nullopt;
        return static_cast<std::size_t>(n + p.mask());
    }
    return std::nullopt;
  }

  bool contains(const PointM& p) const { return index_of(p).has_value(); }

  std::size_t require_index(const PointM& p) const {
    auto idx = index_of(p);
    if (!idx)
      throw Error(ErrorKind::Membership, "point " + name(p) + " is not in " +
                                             to_string(label_) + "_" +
                                             std::to_string(level_));
    return *idx;
  }

  int at(std::size_t i, std::size_t j) const {
    if (is_dense()) return dense_[i * points_.size() + j];
    return closed_form_distance(label_, points_[i], points_[j]);
  }

  int distance(const PointM& x, const PointM& y) const {
    return at(require_index(x), require_index(y));
  }

  // Point spelling for this space: N0 writes its base point as "0".
  std::string name(const PointM& p) const {
    if (label_ == SpaceLabel::N0Space && p.is_root()) return "0";
    return p.to_string();
  }
  std::string name(std::size_t i) const { return name(points_[i]); }

  PointM parse_point(std::string_view text) const {
    PointM p = PointM::parse(text);
    require_index(p);
    return p;
  }

  std::vector<std::vector<int>> matrix() const {
    const std::size_t size = points_.size();
    std::vector<std::vector<int>> out(size, std::vector<int>(size));
    for (std::size_t i = 0; i < size; ++i)
      for (std::size_t j = 0; j < size; ++j) out[i][j] = at(i, j);
    return out;
  }

  friend bool operator==(const TruncatedSpace& a, const TruncatedSpace& b) {
    if (a.label_ != b.label_ || a.level_ != b.level_ || a.points_ != b.points_)
      return false;
    for (std::size_t i = 0; i < a.size(); ++i)
      for (std::size_t j = 0; j < a.size(); ++j)
        if (a.at(i, j) != b.at(i, j)) return false;
    return true;
  }

 private:
  TruncatedSpace() = default;

  SpaceLabel label_ = SpaceLabel::MSpace;
  int level_ = 0;
  std::vector<PointM> points_;
  std::vector<int> dense_;
  std::unordered_map<PointM, std::size_t> lookup_;
};

inline TruncatedSpace build_truncation(int n,
                                       int max_level = TruncatedSpace::kDefaultMaxLevel) {
  return TruncatedSpace::m_space(n, max_level);
}

// Adjacency of the graph on M restricted to the space's points:
// root -- k for every integer k, and k -- A whenever k is in A.
inline std::vector<std::vector<std::size_t>> graph_adjacency(const TruncatedSpace& space) {
  std::vector<std::vector<std::size_t>> adj(space.size());
  std::unordered_map<int, std::size_t> integer_index;
  std::optional<std::size_t> root;
  for (std::size_t i = 0; i < space.size(); ++i) {
    const PointM& p = space.point(i);
    if (p.is_root()) root = i;
    if (p.is_integer()) integer_index.emplace(p.value(), i);
  }
  for (std::size_t i = 0; i < space.size(); ++i) {
    const PointM& p = space.point(i);
    if (p.is_integer() && root) {
      adj[*root].push_back(i);
      adj[i].push_back(*root);
    } else if (p.is_set()) {
      for (int k : p.elements()) {
        auto it = integer_index.find(k);
        if (it == integer_index.end()) continue;
        adj[it->second].push_back(i);
        adj[i].push_back(it->second);
      }
    }
  }
  return adj;
}

inline constexpr int kUnreachable = std::numeric_limits<int>::max();

inline std::vector<int> bfs_from(const std::vector<std::vector<std::size_t>>& adj,
                                 std::size_t source) {
  std::vector<int> dist(adj.size(), kUnreachable);
  std::deque<std::size_t> queue{source};
  dist[source] = 0;
  while (!queue.empty()) {
    std::size_t u = queue.front();
    queue.pop_front();
    for (std::size_t v : adj[u]) {
      if (dist[v] != kUnreachable) continue;
      dist[v] = dist[u] + 1;
      queue.push_back(v);
    }
  }
  return dist;
}

// Shortest-path length in the edge graph; independent of the distance table.
inline int bfs_distance(const TruncatedSpace& space, const PointM& x, const PointM& y) {
  std::size_t from = space.require_index(x);
  std::size_t to = space.require_index(y);
  return bfs_from(graph_adjacency(space), from)[to];
}

struct MetricViolation {
  enum class Kind {
    NonzeroDiagonal,
    Asymmetric,
    OutOfRange,
    Triangle,       // i, j with witness k: d(i,j) > d(i,k) + d(k,j)
    TableMismatch,  // disagrees with the closed-form table
    BfsMismatch,    // disagrees with graph shortest paths
  };
  Kind kind;
  std::size_t i = 0;
  std::size_t j = 0;
  std::size_t k = 0;
  int value = 0;
  int expected = 0;
};

inline const char* to_string(MetricViolation::Kind kind) {
  using K = MetricViolation::Kind;
  switch (kind) {
    case K::NonzeroDiagonal: return "nonzero-diagonal";
    case K::Asymmetric: return "asymmetric";
    case K::OutOfRange: return "out-of-range";
    case K::Triangle: return "triangle";
    case K::TableMismatch: return "table-mismatch";
    case K::BfsMismatch: return "bfs-mismatch";
  }
  return "unknown";
}

struct MetricReport {
  std::vector<MetricViolation> violations;

  bool ok() const { return violations.empty(); }
  std::size_t count(MetricViolation::Kind kind) const {
    std::size_t c = 0;
    for (const auto& v : violations) c += v.kind == kind;
    return c;
  }
};

// Triangle violations are reported once per unordered pair, with the
// intermediate point giving the largest excess.
inline MetricReport validate_metric(const TruncatedSpace& space) {
  using K = MetricViolation::Kind;
  MetricReport report;
  const std::size_t size = space.size();
  const int max_entry = space.label() == SpaceLabel::MSpace ? 4 : 2;
  const auto adj = graph_adjacency(space);

  for (std::size_t i = 0; i < size; ++i) {
    if (int d = space.at(i, i); d != 0)
      report.violations.push_back({K::NonzeroDiagonal, i, i, i, d, 0});
    const auto bfs = bfs_from(adj, i);
    for (std::size_t j = 0; j < size; ++j) {
      const int d = space.at(i, j);
      if (i != j && (d < 1 || d > max_entry))
        report.violations.push_back({K::OutOfRange, i, j, j, d, 0});
      if (j > i && d != space.at(j, i))
        report.violations.push_back({K::Asymmetric, i, j, j, d, space.at(j, i)});
      if (const int table = closed_form_distance(space.label(), space.point(i),
                                                 space.point(j));
          d != table)
        report.violations.push_back({K::TableMismatch, i, j, j, d, table});
      if (d != bfs[j])
        report.violations.push_back({K::BfsMismatch, i, j, j, d, bfs[j]});
    }
  }

  for (std::size_t i = 0; i < size; ++i) {
    for (std::size_t j = i + 1; j < size; ++j) {
      const int d = space.at(i, j);
      int best_excess = 0;
      std::size_t witness = 0;
      for (std::size_t k = 0; k < size; ++k) {
        const int excess = d - (space.at(i, k) + space.at(k, j));
        if (excess > best_excess) {
          best_excess = excess;
          witness = k;
        }
      }
      if (best_excess > 0)
        report.violations.push_back(
            {K::Triangle, i, j, witness, d, space.at(i, witness) + space.at(witness, j)});
    }
  }
  return report;
}

}  // namespace embedlab
