#include "fcc/consensus.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace fcc {

std::size_t CandidateSet::add(const Provenance& provenance, Clustering clustering) {
  auto [it, inserted] = index_.try_emplace(clustering, static_cast<std::uint32_t>(pool_.size()));
  if (inserted) {
    pool_.push_back(std::move(clustering));
    first_.push_back(provenance);
  }
  items_.push_back(Candidate{provenance, it->second});
  return it->second;
}

CandidateBuilder::CandidateBuilder(const ColorTable& colors, const FairnessConstraint& p,
                                   const RunOptions& options)
    : colors_(colors), p_(p), options_(options),
      fitting_seed_base_(derive_seed(options.seed, "find-candidates")),
      memo_(options.cache ? options.cache : std::make_shared<FittingCache>()) {
  p_.check_feasible(colors_);
  std::uint64_t key = mix64(options.seed);
  auto fold = [&key](std::uint64_t x) { key = mix64(key ^ x); };
  fold(colors.size());
  for (PointId v = 0; v < colors.size(); ++v) fold(colors.color(v));
  for (auto r : p.ratio()) fold(r);
  fold(static_cast<std::uint64_t>(options.backend.mode));
  fold(options.backend.exhaustive_guard);
  fold(options.correlation.exact_guard);
  fold(options.correlation.pivot_restarts);
  if (!memo_->key_) {
    memo_->key_ = key;
  } else if (*memo_->key_ != key) {
    throw Error(ErrorKind::Argument, "fitting cache was built for a different configuration");
  }
}

const Clustering& CandidateBuilder::fair_fit(const Clustering& c) {
  auto it = memo_->fair_.find(c);
  if (it != memo_->fair_.end()) return it->second;
  Clustering fitted = closest_fair(c, colors_, p_, options_.backend).clustering;
  return memo_->fair_.emplace(c, std::move(fitted)).first->second;
}

const Clustering& CandidateBuilder::fitting(const SignedGraph& g) {
  ++fitting_calls_;
  auto it = memo_->fitting_.find(g);
  if (it != memo_->fitting_.end()) return it->second;
  // Equals cluster_fitting_graph; the fair fit goes through the memo.
  if (g.size() != colors_.size()) throw Error(ErrorKind::Dimension, "color table size mismatch");
  Rng rng(fitting_seed(fitting_seed_base_, g));
  Clustering fitted = fair_fit(correlation_clustering(g, rng, options_.correlation));
  return memo_->fitting_.emplace(g, std::move(fitted)).first->second;
}

void CandidateBuilder::add_inputs(CandidateSet& out, std::span<const Clustering> inputs,
                                  std::span<const std::uint32_t> ids, ProvenanceKind kind) {
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    Provenance prov{kind, {ids[i], 0, 0}};
    out.add(prov, fair_fit(inputs[i]));
  }
}

void CandidateBuilder::add_triples(CandidateSet& out, std::span<const Clustering> inputs,
                                   std::span<const std::uint32_t> ids) {
  const std::size_t m = inputs.size();
  if (m < 3) return;
  const std::size_t n = inputs.front().size();
  std::vector<std::vector<std::uint64_t>> bits;
  bits.reserve(m);
  for (const auto& c : inputs) bits.push_back(pair_bits(c));
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) {
      for (std::size_t k = j + 1; k < m; ++k) {
        SignedGraph g = majority_graph_from_bits(n, bits[i], bits[j], bits[k]);
        out.add(Provenance{ProvenanceKind::FromTriple, {ids[i], ids[j], ids[k]}}, fitting(g));
      }
    }
  }
}

CandidateSet find_candidates(std::span<const Clustering> inputs, const ColorTable& colors,
                             const FairnessConstraint& p, const RunOptions& options) {
  if (inputs.empty()) throw Error(ErrorKind::Argument, "find_candidates needs at least one input");
  std::vector<std::uint32_t> ids(inputs.size());
  for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = static_cast<std::uint32_t>(i);
  CandidateBuilder builder(colors, p, options);
  CandidateSet out;
  builder.add_inputs(out, inputs, ids, ProvenanceKind::FromInput);
  builder.add_triples(out, inputs, ids);
  return out;
}

MedianResult consensus_1median(const InputSet& inputs, const ColorTable& colors,
                               const FairnessConstraint& p, const RunOptions& options) {
  if (inputs.num_points() != colors.size()) {
    throw Error(ErrorKind::Dimension, "color table size mismatch");
  }
  CandidateSet candidates = find_candidates(inputs.clusterings(), colors, p, options);
  const auto& pool = candidates.pool();
  std::size_t best = 0;
  std::uint64_t best_obj = std::numeric_limits<std::uint64_t>::max();
  for (std::size_t i = 0; i < pool.size(); ++i) {
    const std::uint64_t obj = objective(inputs, pool[i]);
    if (obj < best_obj) {
      best_obj = obj;
      best = i;
    }
  }
  MedianResult result;
  result.clustering = pool[best];
  result.objective = best_obj;
  result.provenance = candidates.first_provenance(best);
  result.candidates = candidates.size();
  result.distinct_candidates = pool.size();
  return result;
}

SubsetChoice best_k_subset(std::span<const Clustering> pool,
                           std::span<const WeightedClustering> points, std::size_t k,
                           std::uint64_t guard) {
  if (k == 0) throw Error(ErrorKind::Argument, "k must be at least 1");
  if (pool.empty()) throw Error(ErrorKind::Argument, "empty candidate pool");
  const std::size_t np = pool.size();
  const std::size_t kk = std::min(k, np);
  if (std::pow(static_cast<double>(np), static_cast<double>(kk)) > static_cast<double>(guard)) {
    throw Error(ErrorKind::Capability, std::to_string(np) + " candidates ^ k=" +
                                           std::to_string(kk) + " exceeds the subset guard " +
                                           std::to_string(guard));
  }
  const std::size_t mq = points.size();
  // Weighted distance matrix, one row per candidate.
  std::vector<double> cost(np * mq);
  for (std::size_t i = 0; i < np; ++i) {
    for (std::size_t q = 0; q < mq; ++q) {
      cost[i * mq + q] = points[q].weight * static_cast<double>(dist(pool[i], points[q].clustering));
    }
  }

  SubsetChoice best;
  best.objective = std::numeric_limits<double>::infinity();
  std::vector<std::size_t> chosen(kk);
  std::vector<std::vector<double>> mins(kk + 1, std::vector<double>(mq));
  std::fill(mins[0].begin(), mins[0].end(), std::numeric_limits<double>::infinity());

  // Depth-first walk over combinations in lexicographic order.
  auto walk = [&](auto&& self, std::size_t depth, std::size_t start) -> void {
    if (depth == kk) {
      ++best.subsets_evaluated;
      double total = 0.0;
      for (double v : mins[depth]) total += v;
      if (mq == 0) total = 0.0;
      if (total < best.objective) {
        best.objective = total;
        best.indices = chosen;
      }
      return;
    }
    for (std::size_t i = start; i + (kk - depth) <= np; ++i) {
      chosen[depth] = i;
      const double* row = &cost[i * mq];
      for (std::size_t q = 0; q < mq; ++q) mins[depth + 1][q] = std::min(mins[depth][q], row[q]);
      self(self, depth + 1, i + 1);
    }
  };
  walk(walk, 0, 0);
  return best;
}

KMedianResult consensus_kmedian(const InputSet& inputs, std::size_t k, const ColorTable& colors,
                                const FairnessConstraint& p, const RunOptions& options) {
  if (inputs.num_points() != colors.size()) {
    throw Error(ErrorKind::Dimension, "color table size mismatch");
  }
  CandidateSet candidates = find_candidates(inputs.clusterings(), colors, p, options);
  if (k == 0 || k > candidates.size()) {
    throw Error(ErrorKind::Argument, "k=" + std::to_string(k) + " outside 1.." +
                                         std::to_string(candidates.size()));
  }
  std::vector<WeightedClustering> points;
  points.reserve(inputs.size());
  for (const auto& c : inputs) points.push_back(WeightedClustering{c, 1.0});
  SubsetChoice choice = best_k_subset(candidates.pool(), points, k);

  KMedianResult result;
  for (auto i : choice.indices) result.centers.push_back(candidates.pool()[i]);
  while (result.centers.size() < k) result.centers.push_back(result.centers.back());
  result.objective = objective(inputs, result.centers);
  result.candidates = candidates.size();
  result.distinct_candidates = candidates.pool().size();
  result.subsets_evaluated = choice.subsets_evaluated;
  return result;
}

}  // namespace fcc
