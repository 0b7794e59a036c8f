#include "fcc/stream.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace fcc {

std::string_view to_string(StreamMode mode) {
  return mode == StreamMode::Contiguous ? "contiguous" : "general";
}

StreamMode parse_stream_mode(std::string_view text) {
  if (text == "contiguous") return StreamMode::Contiguous;
  if (text == "general") return StreamMode::General;
  throw Error(ErrorKind::MalformedInput, "unknown stream mode '" + std::string(text) + "'");
}

void validate_triple(const StreamHeader& header, const StreamTriple& t) {
  if (t.u >= header.n || t.v >= header.n) {
    throw Error(ErrorKind::MalformedInput, "triple point id out of range");
  }
  if (t.u == t.v) throw Error(ErrorKind::MalformedInput, "triple with u == v");
  if (t.j >= header.m) throw Error(ErrorKind::MalformedInput, "triple clustering index out of range");
  if (t.b > 1) throw Error(ErrorKind::MalformedInput, "triple bit must be 0 or 1");
}

bool ContiguityChecker::observe(std::uint32_t j) {
  if (current_ && *current_ == j) return false;
  if (closed_[j]) {
    throw Error(ErrorKind::MalformedInput,
                "contiguity violated: clustering " + std::to_string(j) + " reappears");
  }
  if (current_) closed_[*current_] = true;
  current_ = j;
  return true;
}

std::vector<StreamTriple> encode_triples(const Clustering& c, std::uint32_t j) {
  std::vector<StreamTriple> out;
  out.reserve(pair_count(c.size()));
  for (PointId u = 0; u < c.size(); ++u) {
    for (PointId v = u + 1; v < c.size(); ++v) {
      out.push_back(StreamTriple{u, v, j, static_cast<std::uint8_t>(c.together(u, v) ? 0 : 1)});
    }
  }
  return out;
}

namespace {

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n), rank_(n, 0) {
    std::iota(parent_.begin(), parent_.end(), 0);
  }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (rank_[a] < rank_[b]) std::swap(a, b);
    parent_[b] = a;
    if (rank_[a] == rank_[b]) ++rank_[a];
  }

 private:
  std::vector<std::size_t> parent_;
  std::vector<std::uint8_t> rank_;
};

}  // namespace

Reconstruction reconstruct(std::size_t n, std::span<const StoredPair> pairs, ReconstructMode mode) {
  DisjointSets sets(n);
  for (const auto& pr : pairs) {
    if (pr.u >= n || pr.v >= n || pr.u == pr.v) {
      throw Error(ErrorKind::MalformedInput, "stored pair out of range");
    }
    if (pr.b == 0) sets.unite(pr.u, pr.v);
  }
  Reconstruction out;
  for (const auto& pr : pairs) {
    if (pr.b == 1 && sets.find(pr.u) == sets.find(pr.v)) ++out.contradictions;
  }
  if (mode == ReconstructMode::Validate && out.contradictions > 0) {
    throw Error(ErrorKind::Inconsistent, std::to_string(out.contradictions) +
                                             " separated pairs were joined by union closure");
  }
  std::vector<std::int64_t> raw(n);
  for (std::size_t v = 0; v < n; ++v) raw[v] = static_cast<std::int64_t>(sets.find(v));
  out.clustering = Clustering::from_labels(raw);
  return out;
}

std::vector<std::uint32_t> sample_indices(std::size_t m, std::size_t count, Rng& rng,
                                          bool* clamped) {
  if (clamped) *clamped = count > m;
  count = std::min(count, m);
  std::vector<std::uint32_t> all(m);
  std::iota(all.begin(), all.end(), 0);
  std::vector<std::uint32_t> out;
  out.reserve(count);
  std::sample(all.begin(), all.end(), std::back_inserter(out), count, rng);
  std::sort(out.begin(), out.end());
  return out;
}

SampledStore::SampledStore(std::vector<std::uint32_t> watched) : watched_(std::move(watched)) {
  lists_.resize(watched_.size());
  for (std::size_t i = 0; i < watched_.size(); ++i) slot_.emplace(watched_[i], i);
}

void SampledStore::offer(const StreamTriple& t) {
  auto it = slot_.find(t.j);
  if (it == slot_.end()) return;
  auto& list = lists_[it->second];
  if (list.empty()) ++nonempty_;
  list.push_back(StoredPair{t.u, t.v, t.b});
  ++pairs_stored_;
}

std::span<const StoredPair> SampledStore::pairs(std::uint32_t j) const {
  auto it = slot_.find(j);
  if (it == slot_.end()) return {};
  return lists_[it->second];
}

namespace {

double log2_at_least_one(std::size_t m) { return m > 1 ? std::log2(static_cast<double>(m)) : 0.0; }

std::size_t clamp_count(double value, std::size_t m) {
  const double c = std::ceil(value);
  if (c >= static_cast<double>(m)) return m;
  return static_cast<std::size_t>(std::max(1.0, c));
}

std::vector<std::uint32_t> pick(std::size_t m, std::size_t count, std::uint64_t seed,
                                bool* clamped) {
  Rng rng(seed);
  return sample_indices(m, count, rng, clamped);
}

}  // namespace

std::size_t default_sample1_count(std::size_t m, double g) {
  return clamp_count(4.0 * g * log2_at_least_one(m), m);
}

std::size_t default_sample2_count(std::size_t m, double epsilon) {
  return clamp_count(64.0 / (epsilon * epsilon) * log2_at_least_one(m), m);
}

St1Med::St1Med(StreamHeader header, const St1MedParams& params, const RunOptions& options)
    : header_(std::move(header)), params_(params), options_(options),
      store1_(pick(header_.m,
                   params.sample1_count.value_or(default_sample1_count(header_.m, params.g)),
                   derive_seed(options.seed, "st1med-store1"), nullptr)),
      store2_(pick(header_.m, default_sample2_count(header_.m, params.epsilon),
                   derive_seed(options.seed, "st1med-store2"), nullptr)) {
  if (header_.m == 0) throw Error(ErrorKind::Argument, "stream declares m = 0");
  if (!(params.epsilon > 0.0 && params.epsilon < 1.0)) {
    throw Error(ErrorKind::Argument, "epsilon must lie in (0,1)");
  }
  if (header_.colors.size() != header_.n) {
    throw Error(ErrorKind::Dimension, "color table size does not match n");
  }
  header_.constraint.check_feasible(header_.colors);
  if (header_.mode == StreamMode::Contiguous) contiguity_.emplace(header_.m);
  const double log_m = log2_at_least_one(header_.m);
  report_.sample1_clamped = params.sample1_count
                                ? *params.sample1_count > header_.m
                                : 4.0 * params.g * log_m > static_cast<double>(header_.m);
  report_.sample2_clamped =
      64.0 / (params.epsilon * params.epsilon) * log_m > static_cast<double>(header_.m);
  report_.sample1_count = store1_.watched().size();
  report_.sample2_count = store2_.watched().size();
  report_.store1_indices = store1_.watched();
}

void St1Med::consume(const StreamTriple& t) {
  validate_triple(header_, t);
  if (contiguity_) contiguity_->observe(t.j);
  ++report_.triples_seen;
  store1_.offer(t);
  store2_.offer(t);
}

St1MedResult St1Med::finish() const {
  St1MedResult result;
  result.report = report_;
  auto& rep = result.report;
  rep.peak_store1 = store1_.stored_clusterings();
  rep.peak_store2 = store2_.stored_clusterings();
  rep.pairs_stored = store1_.stored_pairs() + store2_.stored_pairs();

  std::vector<Clustering> sampled;
  for (auto j : store1_.watched()) {
    Reconstruction r = reconstruct(header_.n, store1_.pairs(j), params_.reconstruct);
    rep.contradictions += r.contradictions;
    sampled.push_back(std::move(r.clustering));
  }
  std::vector<Clustering> evaluation;
  for (auto j : store2_.watched()) {
    Reconstruction r = reconstruct(header_.n, store2_.pairs(j), params_.reconstruct);
    rep.contradictions += r.contradictions;
    evaluation.push_back(std::move(r.clustering));
  }

  CandidateSet candidates = find_candidates(sampled, header_.colors, header_.constraint, options_);
  const auto& pool = candidates.pool();
  std::size_t best = 0;
  std::uint64_t best_obj = std::numeric_limits<std::uint64_t>::max();
  for (std::size_t i = 0; i < pool.size(); ++i) {
    std::uint64_t obj = 0;
    for (const auto& w : evaluation) obj += dist(w, pool[i]);
    if (obj < best_obj) {
      best_obj = obj;
      best = i;
    }
  }
  result.clustering = pool[best];
  result.provenance = candidates.first_provenance(best);
  // Store-local indices back to stream indices.
  auto& prov = result.provenance;
  const std::size_t used = prov.kind == ProvenanceKind::FromTriple ? 3 : 1;
  for (std::size_t i = 0; i < used; ++i) prov.index[i] = store1_.watched()[prov.index[i]];
  rep.sample_objective = best_obj;
  rep.candidates = candidates.size();
  rep.distinct_candidates = pool.size();
  result.candidate_pool = pool;
  return result;
}

St1MedResult st_1med(const StreamHeader& header, std::span<const StreamTriple> stream,
                     const St1MedParams& params, const RunOptions& options) {
  St1Med algo(header, params, options);
  for (const auto& t : stream) algo.consume(t);
  return algo.finish();
}

}  // namespace fcc
