#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "fcc/clustering.hpp"
#include "fcc/consensus.hpp"
#include "fcc/fairness.hpp"
#include "fcc/rng.hpp"

namespace fcc {

/// One pairwise relation of input clustering j: b = 0 means u and v share a
/// cluster, b = 1 means they are separated.
struct StreamTriple {
  PointId u = 0;
  PointId v = 0;
  std::uint32_t j = 0;
  std::uint8_t b = 0;

  friend bool operator==(const StreamTriple&, const StreamTriple&) = default;
};

enum class StreamMode { Contiguous, General };

std::string_view to_string(StreamMode mode);
StreamMode parse_stream_mode(std::string_view text);

struct StreamHeader {
  std::size_t n = 0;
  std::size_t m = 0;
  ColorTable colors;
  FairnessConstraint constraint;
  StreamMode mode = StreamMode::Contiguous;
};

/// Range and self-pair checks for one triple; throws MalformedInput.
void validate_triple(const StreamHeader& header, const StreamTriple& t);

/// Tracks the contiguity property: once a block for index j has been left,
/// j may not reappear.
class ContiguityChecker {
 public:
  explicit ContiguityChecker(std::size_t m) : closed_(m, false) {}
  /// Returns true when `j` starts a new block.
  bool observe(std::uint32_t j);

 private:
  std::vector<bool> closed_;
  std::optional<std::uint32_t> current_;
};

/// All n(n-1)/2 triples describing clustering c under index j, in (u,v) order.
std::vector<StreamTriple> encode_triples(const Clustering& c, std::uint32_t j);

struct StoredPair {
  PointId u = 0;
  PointId v = 0;
  std::uint8_t b = 0;
};

enum class ReconstructMode { Strict, Validate };

struct Reconstruction {
  Clustering clustering;
  std::size_t contradictions = 0;  // b=1 pairs that ended up in one cluster
};

/// Union-find over the b = 0 pairs; components become clusters. b = 1 pairs
/// only serve as a consistency check: counted in Strict mode, an
/// Inconsistent error in Validate mode.
Reconstruction reconstruct(std::size_t n, std::span<const StoredPair> pairs,
                           ReconstructMode mode = ReconstructMode::Strict);

/// Uniform sample of `count` distinct indices from 0..m-1, sorted. A count
/// above m is clamped to m and reported through `clamped`.
std::vector<std::uint32_t> sample_indices(std::size_t m, std::size_t count, Rng& rng,
                                          bool* clamped = nullptr);

/// Keeps every arriving pair for a fixed set of watched clustering indices.
class SampledStore {
 public:
  explicit SampledStore(std::vector<std::uint32_t> watched);

  bool watches(std::uint32_t j) const { return slot_.contains(j); }
  void offer(const StreamTriple& t);

  const std::vector<std::uint32_t>& watched() const noexcept { return watched_; }
  std::span<const StoredPair> pairs(std::uint32_t j) const;
  /// Watched indices that have received at least one pair.
  std::size_t stored_clusterings() const noexcept { return nonempty_; }
  std::size_t stored_pairs() const noexcept { return pairs_stored_; }

 private:
  std::vector<std::uint32_t> watched_;
  std::unordered_map<std::uint32_t, std::size_t> slot_;
  std::vector<std::vector<StoredPair>> lists_;
  std::size_t nonempty_ = 0;
  std::size_t pairs_stored_ = 0;
};

struct St1MedParams {
  /// Size of the candidate store; default min(m, ceil(4 g log2 m)).
  std::optional<std::size_t> sample1_count;
  double epsilon = 0.2;
  double g = 64.0;
  ReconstructMode reconstruct = ReconstructMode::Strict;
};

std::size_t default_sample1_count(std::size_t m, double g);
/// min(m, ceil(64 eps^-2 log2 m)).
std::size_t default_sample2_count(std::size_t m, double epsilon);

struct St1MedReport {
  std::size_t sample1_count = 0;
  std::size_t sample2_count = 0;
  std::size_t peak_store1 = 0;
  std::size_t peak_store2 = 0;
  std::size_t pairs_stored = 0;
  std::size_t triples_seen = 0;
  std::size_t candidates = 0;
  std::size_t distinct_candidates = 0;
  std::size_t contradictions = 0;
  /// Objective of the output on the evaluation sample W.
  std::uint64_t sample_objective = 0;
  bool sample1_clamped = false;
  bool sample2_clamped = false;
  std::vector<std::uint32_t> store1_indices;
};

struct St1MedResult {
  Clustering clustering;
  Provenance provenance;
  St1MedReport report;
  /// Candidate pool in first-occurrence order (for analysis).
  std::vector<Clustering> candidate_pool;
};

/// Single-pass 1-median for generalized insertion-only streams. Both stores
/// pick their indices before the first triple arrives.
class St1Med {
 public:
  St1Med(StreamHeader header, const St1MedParams& params, const RunOptions& options);

  void consume(const StreamTriple& t);
  St1MedResult finish() const;

  const StreamHeader& header() const noexcept { return header_; }

 private:
  StreamHeader header_;
  St1MedParams params_;
  RunOptions options_;
  SampledStore store1_;
  SampledStore store2_;
  std::optional<ContiguityChecker> contiguity_;
  St1MedReport report_;
};

St1MedResult st_1med(const StreamHeader& header, std::span<const StreamTriple> stream,
                     const St1MedParams& params, const RunOptions& options);

}  // namespace fcc
