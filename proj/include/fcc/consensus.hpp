#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "fcc/clustering.hpp"
#include "fcc/corrclust.hpp"
#include "fcc/fairness.hpp"
#include "fcc/params.hpp"

namespace fcc {

enum class ProvenanceKind : std::uint8_t { FromInput, FromTriple, FromFaraway };

struct Provenance {
  ProvenanceKind kind = ProvenanceKind::FromInput;
  std::array<std::uint32_t, 3> index{};  // i | (i,j,k) | i

  friend bool operator==(const Provenance&, const Provenance&) = default;
};

struct Candidate {
  Provenance provenance;
  std::uint32_t pool_index = 0;  // into CandidateSet::pool()
};

/// Candidates in enumeration order, backed by a pool of distinct fair
/// clusterings kept in first-occurrence order. Minimizing over the pool in
/// order therefore breaks ties exactly like minimizing over the items.
class CandidateSet {
 public:
  std::size_t add(const Provenance& provenance, Clustering clustering);

  std::size_t size() const noexcept { return items_.size(); }
  const std::vector<Candidate>& items() const noexcept { return items_; }
  const std::vector<Clustering>& pool() const noexcept { return pool_; }
  /// Provenance of the first candidate that produced pool entry i.
  const Provenance& first_provenance(std::size_t i) const { return first_[i]; }
  const Clustering& clustering(const Candidate& c) const { return pool_[c.pool_index]; }

 private:
  std::vector<Candidate> items_;
  std::vector<Clustering> pool_;
  std::vector<Provenance> first_;
  std::unordered_map<Clustering, std::uint32_t, ClusteringHash> index_;
};

class FittingCache;

struct RunOptions {
  ClosestFairBackend backend;
  CorrelationOptions correlation;
  std::uint64_t seed = 0;
  /// Optional memo shared between runs on the same configuration.
  std::shared_ptr<FittingCache> cache;
};

/// Fair-fit and ClusterFitting memo tables. A cache binds to the first
/// (colors, constraint, backend, correlation options, seed) that uses it;
/// any other configuration is rejected with an Argument error.
class FittingCache {
 public:
  std::size_t fair_entries() const noexcept { return fair_.size(); }
  std::size_t fitting_entries() const noexcept { return fitting_.size(); }

 private:
  friend class CandidateBuilder;
  std::optional<std::uint64_t> key_;
  std::unordered_map<Clustering, Clustering, ClusteringHash> fair_;
  std::unordered_map<SignedGraph, Clustering, SignedGraphHash> fitting_;
};

/// Builds candidate sets with memoized sub-solvers. Both memo tables are
/// keyed by the solver's full input, so reuse never changes a result.
class CandidateBuilder {
 public:
  CandidateBuilder(const ColorTable& colors, const FairnessConstraint& p, const RunOptions& options);

  const Clustering& fair_fit(const Clustering& c);
  const Clustering& fitting(const SignedGraph& g);

  void add_inputs(CandidateSet& out, std::span<const Clustering> inputs,
                  std::span<const std::uint32_t> ids, ProvenanceKind kind);
  void add_triples(CandidateSet& out, std::span<const Clustering> inputs,
                   std::span<const std::uint32_t> ids);

  std::size_t fitting_calls() const noexcept { return fitting_calls_; }
  /// Distinct graphs in the memo (across runs when the cache is shared).
  std::size_t distinct_graphs() const noexcept { return memo_->fitting_.size(); }

 private:
  const ColorTable& colors_;
  const FairnessConstraint& p_;
  RunOptions options_;
  std::uint64_t fitting_seed_base_;
  std::shared_ptr<FittingCache> memo_;
  std::size_t fitting_calls_ = 0;
};

/// One candidate per input (its fair fit) and one per unordered triple of
/// inputs (ClusterFitting), m + C(m,3) in total.
CandidateSet find_candidates(std::span<const Clustering> inputs, const ColorTable& colors,
                             const FairnessConstraint& p, const RunOptions& options);

struct MedianResult {
  Clustering clustering;
  std::uint64_t objective = 0;
  Provenance provenance;
  std::size_t candidates = 0;
  std::size_t distinct_candidates = 0;
};

MedianResult consensus_1median(const InputSet& inputs, const ColorTable& colors,
                               const FairnessConstraint& p, const RunOptions& options);

inline constexpr std::uint64_t kSubsetGuard = 10'000'000;

struct SubsetChoice {
  std::vector<std::size_t> indices;  // into the pool, ascending
  double objective = 0.0;
  std::uint64_t subsets_evaluated = 0;
};

/// Lexicographically first k-subset of `pool` minimizing the weighted
/// objective over `points`. When the pool has at most k members all of them
/// are returned. Throws Capability when |pool|^k exceeds `guard`.
SubsetChoice best_k_subset(std::span<const Clustering> pool,
                           std::span<const WeightedClustering> points, std::size_t k,
                           std::uint64_t guard = kSubsetGuard);

struct KMedianResult {
  std::vector<Clustering> centers;
  std::uint64_t objective = 0;
  std::size_t candidates = 0;
  std::size_t distinct_candidates = 0;
  std::uint64_t subsets_evaluated = 0;
};

KMedianResult consensus_kmedian(const InputSet& inputs, std::size_t k, const ColorTable& colors,
                                const FairnessConstraint& p, const RunOptions& options);

}  // namespace fcc
