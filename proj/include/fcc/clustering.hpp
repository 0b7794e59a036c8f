#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include "fcc/error.hpp"

namespace fcc {

using PointId = std::uint32_t;
using Label = std::uint32_t;

/// A partition of the points 0..n-1, stored as a canonical label array:
/// labels are dense and appear in first-occurrence order starting at 0.
/// Two Clusterings describe the same partition iff their label arrays match.
class Clustering {
 public:
  Clustering() = default;

  /// Canonicalizes an arbitrary label array (any integer labels).
  static Clustering from_labels(std::span<const std::int64_t> raw);
  static Clustering from_labels(std::initializer_list<std::int64_t> raw);
  /// Builds from explicit groups of point ids; every id in 0..n-1 must appear
  /// exactly once.
  static Clustering from_groups(std::size_t n,
                                const std::vector<std::vector<PointId>>& groups);
  static Clustering singletons(std::size_t n);
  static Clustering single_cluster(std::size_t n);

  std::size_t size() const noexcept { return labels_.size(); }
  std::size_t num_clusters() const noexcept { return num_clusters_; }
  Label label(PointId v) const { return labels_[v]; }
  std::span<const Label> labels() const noexcept { return labels_; }
  bool together(PointId u, PointId v) const { return labels_[u] == labels_[v]; }

  /// Number of co-clustered pairs.
  std::uint64_t together_pairs() const noexcept { return together_; }
  std::vector<std::size_t> cluster_sizes() const;
  std::vector<std::vector<PointId>> groups() const;
  std::size_t hash() const noexcept;

  friend bool operator==(const Clustering& a, const Clustering& b) {
    return a.labels_ == b.labels_;
  }
  friend auto operator<=>(const Clustering& a, const Clustering& b) {
    return a.labels_ <=> b.labels_;
  }

 private:
  void finalize();

  std::vector<Label> labels_;
  std::size_t num_clusters_ = 0;
  std::uint64_t together_ = 0;
};

struct ClusteringHash {
  std::size_t operator()(const Clustering& c) const noexcept { return c.hash(); }
};

/// Canonical relabeling of a point->label map defined on 0..n-1.
/// Throws MalformedInput when a point id is missing or out of range.
Clustering canonicalize(std::size_t n, const std::map<std::size_t, std::int64_t>& raw);

/// Ordered list of m >= 1 clusterings over a shared point count.
class InputSet {
 public:
  InputSet() = default;
  explicit InputSet(std::vector<Clustering> clusterings);

  std::size_t num_points() const noexcept { return n_; }
  std::size_t size() const noexcept { return clusterings_.size(); }
  const Clustering& operator[](std::size_t i) const { return clusterings_[i]; }
  const std::vector<Clustering>& clusterings() const noexcept { return clusterings_; }
  auto begin() const { return clusterings_.begin(); }
  auto end() const { return clusterings_.end(); }

 private:
  std::vector<Clustering> clusterings_;
  std::size_t n_ = 0;
};

/// Unordered pairs {u,v}, u<v, kept sorted.
using PointPair = std::pair<PointId, PointId>;

class PairSet {
 public:
  PairSet() = default;
  explicit PairSet(std::vector<PointPair> pairs);

  std::size_t size() const noexcept { return pairs_.size(); }
  bool empty() const noexcept { return pairs_.empty(); }
  bool contains(PointId u, PointId v) const;
  const std::vector<PointPair>& pairs() const noexcept { return pairs_; }
  PairSet intersect(const PairSet& other) const;

  friend bool operator==(const PairSet&, const PairSet&) = default;

 private:
  std::vector<PointPair> pairs_;
};

inline constexpr std::size_t kPairSetGuard = 64;

/// Number of unordered pairs co-clustered in exactly one of the two inputs,
/// computed from the contingency table in O(n + L1*L2).
std::uint64_t dist(const Clustering& a, const Clustering& b);

/// Pairs on which `c` disagrees with `ref`. Materializes O(n^2) pairs, so n
/// is limited to kPairSetGuard.
PairSet u_set(const Clustering& c, const Clustering& ref);

/// Sum over inputs of the distance to the nearest center.
std::uint64_t objective(const InputSet& inputs, std::span<const Clustering> centers);
std::uint64_t objective(const InputSet& inputs, const Clustering& center);

struct WeightedClustering {
  Clustering clustering;
  double weight = 1.0;
};

double objective(std::span<const WeightedClustering> inputs,
                 std::span<const Clustering> centers);

inline std::uint64_t pair_count(std::size_t n) {
  return static_cast<std::uint64_t>(n) * (n > 0 ? n - 1 : 0) / 2;
}

}  // namespace fcc
