#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "fcc/clustering.hpp"
#include "fcc/fairness.hpp"
#include "fcc/rng.hpp"

namespace fcc {

/// Complete signed graph on n vertices; one bit per unordered pair
/// (set = '+', clear = '-').
class SignedGraph {
 public:
  SignedGraph() = default;
  explicit SignedGraph(std::size_t n);

  /// The graph whose '+' edges are exactly the co-clustered pairs of c.
  static SignedGraph consistent_with(const Clustering& c);
  /// Adopts a packed pair bitset (layout of pair_bits); unused high bits
  /// must be zero.
  static SignedGraph from_words(std::size_t n, std::vector<std::uint64_t> words);

  std::size_t size() const noexcept { return n_; }
  bool plus(PointId u, PointId v) const;
  void set(PointId u, PointId v, bool plus);
  std::uint64_t plus_count() const;

  std::span<const std::uint64_t> words() const noexcept { return words_; }
  std::size_t hash() const noexcept;

  friend bool operator==(const SignedGraph&, const SignedGraph&) = default;

 private:
  std::size_t index(PointId u, PointId v) const;

  std::size_t n_ = 0;
  std::vector<std::uint64_t> words_;
};

struct SignedGraphHash {
  std::size_t operator()(const SignedGraph& g) const noexcept { return g.hash(); }
};

/// Co-clustering relation of c as a bitset over pair indices, laid out like
/// SignedGraph so majority votes reduce to word-wise boolean algebra.
std::vector<std::uint64_t> pair_bits(const Clustering& c);

/// '+' iff the pair is together in at least two of the three clusterings.
SignedGraph majority_graph(std::span<const Clustering> triple);
SignedGraph majority_graph_from_bits(std::size_t n, std::span<const std::uint64_t> a,
                                     std::span<const std::uint64_t> b,
                                     std::span<const std::uint64_t> c);

/// Split '+' pairs plus joined '-' pairs.
std::uint64_t correlation_cost(const SignedGraph& g, const Clustering& c);

/// One run of random-pivot correlation clustering.
Clustering pivot_correlation(const SignedGraph& g, Rng& rng);

/// Exact minimum-cost correlation clustering by branch-and-bound over set
/// partitions. Deterministic; limited to n <= guard.
Clustering exact_correlation(const SignedGraph& g, std::size_t guard = 12);

struct CorrelationOptions {
  std::size_t exact_guard = 12;
  std::size_t pivot_restarts = 32;
};

struct FairCorrelationResult {
  Clustering clustering;
  Clustering unconstrained;  // correlation clustering before the fairness fit
  std::uint64_t cost = 0;
  bool exact_correlation = false;
};

/// Exact search up to the guard, otherwise the cheapest of R pivot runs
/// (first minimum wins).
Clustering correlation_clustering(const SignedGraph& g, Rng& rng,
                                  const CorrelationOptions& options = {});

/// correlation_clustering followed by the closest-fair backend. The output
/// is fair.
FairCorrelationResult fair_correlation(const SignedGraph& g, const ColorTable& colors,
                                       const FairnessConstraint& p,
                                       const ClosestFairBackend& backend, Rng& rng,
                                       const CorrelationOptions& options = {});

/// Seed of the pivot stream used by cluster_fitting for a given majority
/// graph. Deriving it from the graph makes ClusterFitting a pure function of
/// (graph, seed), so equal majority graphs always yield the same candidate.
std::uint64_t fitting_seed(std::uint64_t seed, const SignedGraph& g);

/// Majority graph of the triple, then fair correlation clustering on it.
Clustering cluster_fitting(std::span<const Clustering> triple, const ColorTable& colors,
                           const FairnessConstraint& p, const ClosestFairBackend& backend,
                           std::uint64_t seed, const CorrelationOptions& options = {});

Clustering cluster_fitting_graph(const SignedGraph& g, const ColorTable& colors,
                                 const FairnessConstraint& p, const ClosestFairBackend& backend,
                                 std::uint64_t seed, const CorrelationOptions& options = {});

}  // namespace fcc
