#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "fcc/clustering.hpp"
#include "fcc/corrclust.hpp"
#include "fcc/fairness.hpp"

namespace fcc::oracle {

inline constexpr std::size_t kEnumerationGuard = 12;
inline constexpr std::size_t kConsensusGuard = 8;
inline constexpr std::size_t kCorrelationGuard = 10;
inline constexpr std::uint64_t kTupleGuard = 1'000'000;

/// Visits every set partition of n points once, as restricted-growth
/// strings in lexicographic order. Throws Capability when n > 12.
class PartitionEnumerator {
 public:
  explicit PartitionEnumerator(std::size_t n);

  void for_each(const std::function<void(const Clustering&)>& visit) const;
  std::vector<Clustering> all() const;

 private:
  std::size_t n_;
};

std::vector<Clustering> enum_fair_partitions(std::size_t n, const ColorTable& colors,
                                             const FairnessConstraint& p);

/// Bell numbers B(0..n) by the triangle recurrence.
std::vector<std::uint64_t> bell_numbers(std::size_t n);

/// Pair-by-pair distance, quadratic; reference for the fast version.
std::uint64_t naive_dist(const Clustering& a, const Clustering& b);

/// Minimum distance from `c` to any fair partition.
std::uint64_t closest_fair_distance(const Clustering& c, const ColorTable& colors,
                                    const FairnessConstraint& p);

struct ConsensusOptimum {
  std::vector<Clustering> centers;
  std::uint64_t objective = 0;
  std::size_t fair_partitions = 0;
};

/// Exact fair k-median over all fair k-subsets. n <= 8 and
/// (#fair partitions)^k <= 1e6; k above the number of fair partitions is an
/// Argument error.
ConsensusOptimum opt_fair_consensus(const InputSet& inputs, std::size_t k,
                                    const ColorTable& colors, const FairnessConstraint& p);

struct CorrelationOptimum {
  Clustering clustering;
  std::uint64_t cost = 0;
};

/// Exact minimum correlation cost over fair partitions, n <= 10.
CorrelationOptimum opt_fair_correlation(const SignedGraph& g, const ColorTable& colors,
                                        const FairnessConstraint& p);
/// Exact minimum correlation cost over all partitions, n <= 10.
CorrelationOptimum opt_correlation(const SignedGraph& g);

}  // namespace fcc::oracle
