#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "fcc/clustering.hpp"
#include "fcc/consensus.hpp"
#include "fcc/rng.hpp"
#include "fcc/stream.hpp"

namespace fcc {

struct GridParams {
  double delta = 0.05;
  double lambda = 0.1;
  /// When false no cell is ever emptied (degenerate configuration).
  bool reset_enabled = true;
};

/// Threshold grid over (D, p): each cell keeps arriving clusterings with
/// probability p and only when they are at least delta*D from every member.
/// A cell that reaches the reset cap is emptied for the rest of the run.
class GridSampler {
 public:
  GridSampler(std::size_t n, std::size_t m, std::size_t k, const GridParams& params,
              std::uint64_t seed);

  void update(const Clustering& c, std::uint32_t index);

  struct Cell {
    double D = 0.0;
    double p = 1.0;
    bool dead = false;
    std::vector<std::uint32_t> members;  // arrival indices
  };

  const std::vector<Cell>& cells() const noexcept { return cells_; }
  const Clustering& stored(std::uint32_t index) const { return store_.at(index).clustering; }
  /// Union of all live members, in arrival order.
  std::vector<std::uint32_t> sample() const;

  std::size_t reset_cap() const noexcept { return cap_; }
  std::size_t num_cells() const noexcept { return cells_.size(); }
  std::size_t live_cells() const;
  /// Sum of member counts over all cells.
  std::size_t entries() const noexcept { return entries_; }
  std::size_t resets() const noexcept { return resets_; }

 private:
  struct Stored {
    Clustering clustering;
    std::size_t refs = 0;
  };
  void release(std::uint32_t index);

  GridParams params_;
  std::size_t cap_;
  std::vector<Cell> cells_;
  std::unordered_map<std::uint32_t, Stored> store_;
  Rng rng_;
  std::size_t entries_ = 0;
  std::size_t resets_ = 0;
};

struct FarawayParams {
  double kappa = 1.0 / 3.0;
  double rho = 0.5;
  std::optional<std::size_t> reservoir_size;
  std::optional<std::size_t> level_cap;
};

/// Doubling-threshold faraway sampler: one greedy net per distance scale
/// 2^l (members pairwise at least 2^l apart, at most level_cap of them, the
/// level dies on overflow) plus a uniform reservoir.
class FarawaySampler {
 public:
  FarawaySampler(std::size_t n, std::size_t m, std::size_t k, const FarawayParams& params,
                 std::uint64_t seed);

  void update(const Clustering& c, std::uint32_t index);
  /// Distinct sampled clusterings ordered by arrival index.
  std::vector<std::pair<std::uint32_t, Clustering>> output() const;

  std::size_t reservoir_size() const noexcept { return reservoir_cap_; }
  std::size_t level_cap() const noexcept { return level_cap_; }
  std::size_t num_levels() const noexcept { return levels_.size(); }
  std::size_t capacity() const noexcept { return reservoir_cap_ + levels_.size() * level_cap_; }
  std::size_t entries() const noexcept;

 private:
  struct Level {
    std::uint64_t radius = 1;
    bool dead = false;
    std::vector<std::pair<std::uint32_t, Clustering>> members;
  };

  std::size_t reservoir_cap_;
  std::size_t level_cap_;
  std::vector<Level> levels_;
  std::vector<std::pair<std::uint32_t, Clustering>> reservoir_;
  std::size_t seen_ = 0;
  Rng rng_;
};

/// R = ceil(k^2/(rho*kappa) * max(1, log2 k) * log2(1 + k*kappa*m)).
std::size_t default_reservoir_size(std::size_t m, std::size_t k, double kappa, double rho);

struct CoresetParams {
  double epsilon = 0.2;
  std::optional<std::size_t> cap;
  bool uncapped = false;
};

/// ceil(eps^-2 * k * log2(m + C(m,3))).
std::size_t default_coreset_cap(std::size_t m, std::size_t k, double epsilon);

/// Merge-and-reduce coreset: a buffer of raw arrivals flushed into a binary
/// counter of buckets; two buckets of equal rank are merged and reduced by
/// sensitivity sampling around distance-seeded centers.
class MergeReduceCoreset {
 public:
  MergeReduceCoreset(std::size_t m, std::size_t k, const CoresetParams& params, std::uint64_t seed);

  void update(const Clustering& c);
  /// Weighted members with identical clusterings merged; weights sum to the
  /// number of arrivals.
  std::vector<WeightedClustering> query() const;

  std::optional<std::size_t> cap() const noexcept { return cap_; }
  /// cap * (ceil(log2(m/cap)) + 2), or m when uncapped.
  std::size_t bound() const noexcept { return bound_; }
  std::size_t entries() const noexcept;
  std::size_t reductions() const noexcept { return reductions_; }

 private:
  std::vector<WeightedClustering> reduce(std::vector<WeightedClustering> points);

  std::size_t k_;
  std::optional<std::size_t> cap_;
  std::size_t bound_;
  std::uint64_t seed_;
  std::vector<WeightedClustering> buffer_;
  std::vector<std::optional<std::vector<WeightedClustering>>> buckets_;
  std::size_t reductions_ = 0;
};

/// Weighted merge of identical clusterings, first-occurrence order.
std::vector<WeightedClustering> merge_duplicates(std::span<const WeightedClustering> points);

struct StreamKMedianParams {
  std::size_t k = 1;
  GridParams grid;
  FarawayParams faraway;
  CoresetParams coreset;
  double epsilon1 = 0.0;  // analysis-only slack, echoed in reports
};

/// Every sampler sees everything and nothing is ever reduced.
StreamKMedianParams uncapped_kmedian_params(std::size_t k);

struct StreamKMedianReport {
  std::size_t clusterings_seen = 0;
  std::size_t triples_seen = 0;
  std::size_t sample_size = 0;    // |S|
  std::size_t faraway_size = 0;   // |F|
  std::size_t coreset_size = 0;   // |Q|
  std::size_t candidates = 0;
  std::size_t distinct_candidates = 0;
  std::uint64_t subsets_evaluated = 0;
  std::size_t grid_cells = 0;
  std::size_t grid_live_cells = 0;
  std::size_t grid_reset_cap = 0;
  std::size_t grid_resets = 0;
  std::size_t faraway_capacity = 0;
  std::size_t coreset_cap = 0;  // 0 when uncapped
  std::size_t coreset_bound = 0;
  std::size_t peak_grid = 0;
  std::size_t peak_faraway = 0;
  std::size_t peak_coreset = 0;
  std::size_t peak_stored = 0;
  /// grid reset cap * cells + faraway capacity + coreset bound.
  std::size_t space_budget = 0;
  double coreset_objective = 0.0;
};

struct StreamKMedianResult {
  std::vector<Clustering> centers;
  std::vector<Provenance> provenance;
  StreamKMedianReport report;
};

/// Contiguous-stream k-median: clusterings are rebuilt at block ends and fed
/// to the grid, faraway and coreset samplers; the query evaluates all
/// k-subsets of the candidate pool on the coreset.
class StreamKMedian {
 public:
  StreamKMedian(StreamHeader header, const StreamKMedianParams& params, const RunOptions& options);

  void consume(const StreamTriple& t);
  /// Feeds one whole clustering (bypassing triple decoding).
  void consume_clustering(const Clustering& c, std::uint32_t index);
  StreamKMedianResult finish();

  const GridSampler& grid() const noexcept { return grid_; }
  const FarawaySampler& faraway() const noexcept { return faraway_; }
  const MergeReduceCoreset& coreset() const noexcept { return coreset_; }

 private:
  void close_block();

  StreamHeader header_;
  StreamKMedianParams params_;
  RunOptions options_;
  ContiguityChecker contiguity_;
  GridSampler grid_;
  FarawaySampler faraway_;
  MergeReduceCoreset coreset_;
  std::optional<std::uint32_t> current_;
  std::vector<StoredPair> block_;
  StreamKMedianReport report_;
};

StreamKMedianResult stream_kmedian(const StreamHeader& header,
                                   std::span<const StreamTriple> stream,
                                   const StreamKMedianParams& params, const RunOptions& options);

}  // namespace fcc
