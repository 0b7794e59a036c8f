#include "fcc/stream_kmedian.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <string>

namespace fcc {

namespace {

double log2_floor_one(double x) { return x > 2.0 ? std::log2(x) : 1.0; }

std::uint64_t max_distance(std::size_t n) { return std::max<std::uint64_t>(1, pair_count(n)); }

}  // namespace

GridSampler::GridSampler(std::size_t n, std::size_t m, std::size_t k, const GridParams& params,
                         std::uint64_t seed)
    : params_(params), rng_(seed) {
  if (!(params.lambda > 0.0)) throw Error(ErrorKind::Argument, "grid lambda must be positive");
  if (!(params.delta > 0.0)) throw Error(ErrorKind::Argument, "grid delta must be positive");
  if (m == 0 || k == 0) throw Error(ErrorKind::Argument, "grid needs m >= 1 and k >= 1");
  const double lg = log2_floor_one(static_cast<double>(m));
  cap_ = static_cast<std::size_t>(std::ceil(static_cast<double>(k) * lg * lg * lg));

  std::vector<double> ds;
  const double max_d = static_cast<double>(max_distance(n));
  for (double d = 0.5;; d *= 1.0 + params.lambda) {
    ds.push_back(d);
    if (d >= max_d) break;
  }
  std::vector<double> ps;
  const double p_min = 1.0 / static_cast<double>(m);
  for (double p = 1.0; p > p_min; p /= 1.0 + params.lambda) ps.push_back(p);
  ps.push_back(p_min);
  for (double d : ds) {
    for (double p : ps) cells_.push_back(Cell{d, p, false, {}});
  }
}

void GridSampler::release(std::uint32_t index) {
  auto it = store_.find(index);
  if (--it->second.refs == 0) store_.erase(it);
}

void GridSampler::update(const Clustering& c, std::uint32_t index) {
  std::unordered_map<std::uint32_t, std::uint64_t> cache;
  auto distance_to = [&](std::uint32_t member) {
    auto [it, fresh] = cache.try_emplace(member, 0);
    if (fresh) it->second = dist(c, store_.at(member).clustering);
    return it->second;
  };
  for (auto& cell : cells_) {
    if (cell.dead) continue;
    if (!rng_.bernoulli(cell.p)) continue;
    const double threshold = params_.delta * cell.D;
    bool separated = true;
    for (auto member : cell.members) {
      if (static_cast<double>(distance_to(member)) < threshold) {
        separated = false;
        break;
      }
    }
    if (!separated) continue;
    auto [it, fresh] = store_.try_emplace(index, Stored{c, 0});
    ++it->second.refs;
    cell.members.push_back(index);
    ++entries_;
    if (params_.reset_enabled && cell.members.size() >= cap_) {
      for (auto member : cell.members) release(member);
      entries_ -= cell.members.size();
      cell.members.clear();
      cell.dead = true;
      ++resets_;
    }
  }
}

std::vector<std::uint32_t> GridSampler::sample() const {
  std::set<std::uint32_t> all;
  for (const auto& cell : cells_) all.insert(cell.members.begin(), cell.members.end());
  return {all.begin(), all.end()};
}

std::size_t GridSampler::live_cells() const {
  return static_cast<std::size_t>(
      std::count_if(cells_.begin(), cells_.end(), [](const Cell& c) { return !c.dead; }));
}

std::size_t default_reservoir_size(std::size_t m, std::size_t k, double kappa, double rho) {
  const double kd = static_cast<double>(k);
  const double lk = std::max(1.0, std::log2(kd));
  const double value =
      kd * kd / (rho * kappa) * lk * std::log2(1.0 + kd * kappa * static_cast<double>(m));
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(value)));
}

FarawaySampler::FarawaySampler(std::size_t n, std::size_t m, std::size_t k,
                               const FarawayParams& params, std::uint64_t seed)
    : rng_(seed) {
  if (!(params.kappa > 0.0 && params.kappa < 1.0)) {
    throw Error(ErrorKind::Argument, "faraway kappa must lie in (0,1)");
  }
  if (!(params.rho > 0.0)) throw Error(ErrorKind::Argument, "faraway rho must be positive");
  if (k == 0) throw Error(ErrorKind::Argument, "faraway sampler needs k >= 1");
  reservoir_cap_ = params.reservoir_size.value_or(default_reservoir_size(m, k, params.kappa, params.rho));
  level_cap_ = params.level_cap.value_or(
      k * static_cast<std::size_t>(std::ceil(2.0 / params.kappa)));
  const std::uint64_t max_d = max_distance(n);
  for (std::uint64_t r = 1;; r *= 2) {
    levels_.push_back(Level{r, false, {}});
    if (r >= max_d) break;
  }
}

void FarawaySampler::update(const Clustering& c, std::uint32_t index) {
  ++seen_;
  if (reservoir_.size() < reservoir_cap_) {
    reservoir_.emplace_back(index, c);
  } else if (reservoir_cap_ > 0) {
    const std::uint64_t slot = rng_.below(seen_);
    if (slot < reservoir_cap_) reservoir_[slot] = {index, c};
  }
  for (auto& level : levels_) {
    if (level.dead) continue;
    const bool far = std::all_of(level.members.begin(), level.members.end(),
                                 [&](const auto& member) { return dist(c, member.second) >= level.radius; });
    if (!far) continue;
    level.members.emplace_back(index, c);
    if (level.members.size() > level_cap_) {
      level.members.clear();
      level.dead = true;
    }
  }
}

std::vector<std::pair<std::uint32_t, Clustering>> FarawaySampler::output() const {
  std::vector<std::pair<std::uint32_t, Clustering>> all(reservoir_.begin(), reservoir_.end());
  for (const auto& level : levels_) all.insert(all.end(), level.members.begin(), level.members.end());
  std::stable_sort(all.begin(), all.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<std::pair<std::uint32_t, Clustering>> out;
  std::unordered_map<Clustering, bool, ClusteringHash> seen;
  for (auto& item : all) {
    if (seen.try_emplace(item.second, true).second) out.push_back(std::move(item));
  }
  return out;
}

std::size_t FarawaySampler::entries() const noexcept {
  std::size_t total = reservoir_.size();
  for (const auto& level : levels_) total += level.members.size();
  return total;
}

std::size_t default_coreset_cap(std::size_t m, std::size_t k, double epsilon) {
  const double md = static_cast<double>(m);
  const double universe = md + md * (md - 1.0) * (md - 2.0) / 6.0;
  const double value =
      static_cast<double>(k) / (epsilon * epsilon) * std::max(1.0, std::log2(universe));
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(value)));
}

std::vector<WeightedClustering> merge_duplicates(std::span<const WeightedClustering> points) {
  std::vector<WeightedClustering> out;
  std::unordered_map<Clustering, std::size_t, ClusteringHash> where;
  for (const auto& p : points) {
    auto [it, fresh] = where.try_emplace(p.clustering, out.size());
    if (fresh) {
      out.push_back(p);
    } else {
      out[it->second].weight += p.weight;
    }
  }
  return out;
}

MergeReduceCoreset::MergeReduceCoreset(std::size_t m, std::size_t k, const CoresetParams& params,
                                       std::uint64_t seed)
    : k_(k), seed_(seed) {
  if (!(params.epsilon > 0.0 && params.epsilon < 1.0)) {
    throw Error(ErrorKind::Argument, "coreset epsilon must lie in (0,1)");
  }
  if (k == 0) throw Error(ErrorKind::Argument, "coreset needs k >= 1");
  if (params.uncapped) {
    bound_ = m;
    return;
  }
  cap_ = params.cap.value_or(default_coreset_cap(m, k, params.epsilon));
  if (*cap_ == 0) throw Error(ErrorKind::Argument, "coreset cap must be positive");
  const double ratio = static_cast<double>(m) / static_cast<double>(*cap_);
  const double levels = ratio > 1.0 ? std::ceil(std::log2(ratio)) : 0.0;
  bound_ = *cap_ * (static_cast<std::size_t>(levels) + 2);
}

void MergeReduceCoreset::update(const Clustering& c) {
  buffer_.push_back(WeightedClustering{c, 1.0});
  if (!cap_ || buffer_.size() < *cap_) return;
  std::vector<WeightedClustering> carry = std::move(buffer_);
  buffer_.clear();
  std::size_t level = 0;
  while (level < buckets_.size() && buckets_[level]) {
    auto& other = *buckets_[level];
    carry.insert(carry.end(), std::make_move_iterator(other.begin()),
                 std::make_move_iterator(other.end()));
    buckets_[level].reset();
    carry = reduce(std::move(carry));
    ++level;
  }
  if (level == buckets_.size()) buckets_.emplace_back();
  buckets_[level] = std::move(carry);
}

std::vector<WeightedClustering> MergeReduceCoreset::reduce(std::vector<WeightedClustering> points) {
  std::vector<WeightedClustering> merged = merge_duplicates(points);
  const std::size_t cap = *cap_;
  if (merged.size() <= cap) return merged;
  Rng rng(derive_seed(seed_, "coreset-reduce", reductions_++));
  const std::size_t np = merged.size();

  auto draw = [&](const std::vector<double>& mass) {
    const double total = std::accumulate(mass.begin(), mass.end(), 0.0);
    double x = rng.uniform01() * total;
    for (std::size_t i = 0; i < mass.size(); ++i) {
      if (mass[i] <= 0.0) continue;
      x -= mass[i];
      if (x < 0.0) return i;
    }
    for (std::size_t i = mass.size(); i-- > 0;) {
      if (mass[i] > 0.0) return i;
    }
    return std::size_t{0};
  };

  // Distance-proportional seeding of up to min(2k, cap) centers.
  const std::size_t want = std::min(2 * k_, cap);
  std::vector<std::size_t> centers;
  std::vector<double> dmin(np, std::numeric_limits<double>::infinity());
  std::vector<std::size_t> assign(np, 0);
  std::vector<double> mass(np);
  for (std::size_t i = 0; i < np; ++i) mass[i] = merged[i].weight;
  while (centers.size() < want) {
    const std::size_t c = draw(mass);
    centers.push_back(c);
    for (std::size_t i = 0; i < np; ++i) {
      const double d = static_cast<double>(dist(merged[i].clustering, merged[c].clustering));
      if (d < dmin[i]) {
        dmin[i] = d;
        assign[i] = centers.size() - 1;
      }
    }
    double total = 0.0;
    for (std::size_t i = 0; i < np; ++i) {
      mass[i] = merged[i].weight * dmin[i];
      total += mass[i];
    }
    if (total <= 0.0) break;
  }

  std::vector<double> cluster_weight(centers.size(), 0.0);
  double cost = 0.0;
  for (std::size_t i = 0; i < np; ++i) {
    cluster_weight[assign[i]] += merged[i].weight;
    cost += merged[i].weight * dmin[i];
  }
  std::vector<double> sensitivity(np);
  for (std::size_t i = 0; i < np; ++i) {
    sensitivity[i] = merged[i].weight / cluster_weight[assign[i]];
    if (cost > 0.0) sensitivity[i] += merged[i].weight * dmin[i] / cost;
  }
  const double total_s = std::accumulate(sensitivity.begin(), sensitivity.end(), 0.0);

  std::vector<double> fresh(np, 0.0);
  std::vector<bool> chosen(np, false);
  for (auto c : centers) chosen[c] = true;
  const std::size_t draws = cap - centers.size();
  for (std::size_t t = 0; t < draws; ++t) {
    const std::size_t i = draw(sensitivity);
    const double prob = sensitivity[i] / total_s;
    fresh[i] += merged[i].weight / (static_cast<double>(draws) * prob);
    chosen[i] = true;
  }

  // Rescale so every cluster keeps its exact total weight.
  std::vector<double> kept(centers.size(), 0.0);
  for (std::size_t i = 0; i < np; ++i) {
    if (chosen[i]) kept[assign[i]] += fresh[i];
  }
  std::vector<WeightedClustering> out;
  for (std::size_t i = 0; i < np; ++i) {
    if (!chosen[i]) continue;
    const std::size_t j = assign[i];
    double w = 0.0;
    if (kept[j] > 0.0) {
      w = fresh[i] * cluster_weight[j] / kept[j];
    } else if (i == centers[j]) {
      w = cluster_weight[j];
    }
    if (w > 0.0) out.push_back(WeightedClustering{std::move(merged[i].clustering), w});
  }
  return out;
}

std::vector<WeightedClustering> MergeReduceCoreset::query() const {
  std::vector<WeightedClustering> all(buffer_.begin(), buffer_.end());
  for (const auto& bucket : buckets_) {
    if (bucket) all.insert(all.end(), bucket->begin(), bucket->end());
  }
  return merge_duplicates(all);
}

std::size_t MergeReduceCoreset::entries() const noexcept {
  std::size_t total = buffer_.size();
  for (const auto& bucket : buckets_) {
    if (bucket) total += bucket->size();
  }
  return total;
}

StreamKMedianParams uncapped_kmedian_params(std::size_t k) {
  StreamKMedianParams params;
  params.k = k;
  params.grid.reset_enabled = false;
  params.coreset.uncapped = true;
  return params;
}

namespace {

const StreamHeader& checked(const StreamHeader& header, const StreamKMedianParams& params) {
  if (header.mode != StreamMode::Contiguous) {
    throw Error(ErrorKind::Capability, "streaming k-median requires a contiguous stream");
  }
  if (params.k == 0) throw Error(ErrorKind::Argument, "k must be at least 1");
  if (header.m == 0) throw Error(ErrorKind::Argument, "stream declares m = 0");
  if (header.colors.size() != header.n) {
    throw Error(ErrorKind::Dimension, "color table size does not match n");
  }
  header.constraint.check_feasible(header.colors);
  return header;
}

}  // namespace

StreamKMedian::StreamKMedian(StreamHeader header, const StreamKMedianParams& params,
                             const RunOptions& options)
    : header_(checked(header, params)), params_(params), options_(options),
      contiguity_(header_.m),
      grid_(header_.n, header_.m, params.k, params.grid, derive_seed(options.seed, "grid")),
      faraway_(header_.n, header_.m, params.k, params.faraway, derive_seed(options.seed, "faraway")),
      coreset_(header_.m, params.k, params.coreset, derive_seed(options.seed, "coreset")) {
  report_.grid_cells = grid_.num_cells();
  report_.grid_reset_cap = grid_.reset_cap();
  report_.faraway_capacity = faraway_.capacity();
  report_.coreset_cap = coreset_.cap().value_or(0);
  report_.coreset_bound = coreset_.bound();
  report_.space_budget =
      grid_.reset_cap() * grid_.num_cells() + faraway_.capacity() + coreset_.bound();
}

void StreamKMedian::consume(const StreamTriple& t) {
  validate_triple(header_, t);
  if (contiguity_.observe(t.j)) {
    if (current_) close_block();
    current_ = t.j;
  }
  ++report_.triples_seen;
  block_.push_back(StoredPair{t.u, t.v, t.b});
}

void StreamKMedian::close_block() {
  Reconstruction r = reconstruct(header_.n, block_, ReconstructMode::Strict);
  block_.clear();
  consume_clustering(r.clustering, *current_);
}

void StreamKMedian::consume_clustering(const Clustering& c, std::uint32_t index) {
  if (c.size() != header_.n) throw Error(ErrorKind::Dimension, "clustering size does not match n");
  grid_.update(c, index);
  faraway_.update(c, index);
  coreset_.update(c);
  ++report_.clusterings_seen;
  report_.peak_grid = std::max(report_.peak_grid, grid_.entries());
  report_.peak_faraway = std::max(report_.peak_faraway, faraway_.entries());
  report_.peak_coreset = std::max(report_.peak_coreset, coreset_.entries());
  report_.peak_stored =
      std::max(report_.peak_stored, grid_.entries() + faraway_.entries() + coreset_.entries());
}

StreamKMedianResult StreamKMedian::finish() {
  if (current_) {
    close_block();
    current_.reset();
  }
  if (report_.clusterings_seen == 0) throw Error(ErrorKind::Argument, "stream carried no clusterings");

  const std::vector<std::uint32_t> sample = grid_.sample();
  std::vector<Clustering> sample_clusterings;
  for (auto i : sample) sample_clusterings.push_back(grid_.stored(i));
  auto far = faraway_.output();

  struct Entry {
    std::uint32_t index;
    const Clustering* clustering;
    ProvenanceKind kind;
  };
  std::vector<Entry> singles;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    singles.push_back(Entry{sample[i], &sample_clusterings[i], ProvenanceKind::FromInput});
  }
  for (const auto& [idx, c] : far) {
    if (!std::binary_search(sample.begin(), sample.end(), idx)) {
      singles.push_back(Entry{idx, &c, ProvenanceKind::FromFaraway});
    }
  }
  std::stable_sort(singles.begin(), singles.end(),
                   [](const Entry& a, const Entry& b) { return a.index < b.index; });

  CandidateBuilder builder(header_.colors, header_.constraint, options_);
  CandidateSet candidates;
  for (const auto& e : singles) {
    builder.add_inputs(candidates, std::span<const Clustering>(e.clustering, 1),
                       std::span<const std::uint32_t>(&e.index, 1), e.kind);
  }
  builder.add_triples(candidates, sample_clusterings, sample);

  const std::size_t k = params_.k;
  if (k > candidates.size()) {
    throw Error(ErrorKind::Argument, "k=" + std::to_string(k) + " exceeds the " +
                                         std::to_string(candidates.size()) + " candidates");
  }
  const std::vector<WeightedClustering> q = coreset_.query();
  SubsetChoice choice = best_k_subset(candidates.pool(), q, k);

  StreamKMedianResult result;
  for (auto i : choice.indices) {
    result.centers.push_back(candidates.pool()[i]);
    result.provenance.push_back(candidates.first_provenance(i));
  }
  while (result.centers.size() < k) {
    result.centers.push_back(result.centers.back());
    result.provenance.push_back(result.provenance.back());
  }
  report_.sample_size = sample.size();
  report_.faraway_size = far.size();
  report_.coreset_size = q.size();
  report_.candidates = candidates.size();
  report_.distinct_candidates = candidates.pool().size();
  report_.subsets_evaluated = choice.subsets_evaluated;
  report_.grid_live_cells = grid_.live_cells();
  report_.grid_resets = grid_.resets();
  report_.coreset_objective = choice.objective;
  result.report = report_;
  return result;
}

StreamKMedianResult stream_kmedian(const StreamHeader& header,
                                   std::span<const StreamTriple> stream,
                                   const StreamKMedianParams& params, const RunOptions& options) {
  StreamKMedian algo(header, params, options);
  for (const auto& t : stream) algo.consume(t);
  return algo.finish();
}

}  // namespace fcc
