#include "fcc/corrclust.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <numeric>

namespace fcc {

namespace {

inline std::size_t pair_index(std::size_t n, std::size_t u, std::size_t v) {
  if (u > v) std::swap(u, v);
  return u * (2 * n - u - 1) / 2 + (v - u - 1);
}

inline std::size_t word_count(std::size_t n) { return (pair_count(n) + 63) / 64; }

Clustering from_label_vector(const std::vector<Label>& labels) {
  std::vector<std::int64_t> raw(labels.begin(), labels.end());
  return Clustering::from_labels(raw);
}

}  // namespace

SignedGraph::SignedGraph(std::size_t n) : n_(n), words_(word_count(n), 0) {}

SignedGraph SignedGraph::consistent_with(const Clustering& c) {
  SignedGraph g(c.size());
  g.words_ = pair_bits(c);
  return g;
}

SignedGraph SignedGraph::from_words(std::size_t n, std::vector<std::uint64_t> words) {
  if (words.size() != word_count(n)) {
    throw Error(ErrorKind::Dimension, "pair bitset has the wrong word count");
  }
  SignedGraph g;
  g.n_ = n;
  g.words_ = std::move(words);
  return g;
}

std::size_t SignedGraph::index(PointId u, PointId v) const { return pair_index(n_, u, v); }

bool SignedGraph::plus(PointId u, PointId v) const {
  const std::size_t i = index(u, v);
  return (words_[i / 64] >> (i % 64)) & 1U;
}

void SignedGraph::set(PointId u, PointId v, bool plus) {
  if (u == v || u >= n_ || v >= n_) throw Error(ErrorKind::Argument, "bad signed-graph edge");
  const std::size_t i = index(u, v);
  const std::uint64_t mask = std::uint64_t{1} << (i % 64);
  if (plus) {
    words_[i / 64] |= mask;
  } else {
    words_[i / 64] &= ~mask;
  }
}

std::uint64_t SignedGraph::plus_count() const {
  std::uint64_t total = 0;
  for (auto w : words_) total += static_cast<std::uint64_t>(std::popcount(w));
  return total;
}

std::size_t SignedGraph::hash() const noexcept {
  std::uint64_t h = mix64(n_);
  for (auto w : words_) h = mix64(h ^ w);
  return static_cast<std::size_t>(h);
}

std::vector<std::uint64_t> pair_bits(const Clustering& c) {
  const std::size_t n = c.size();
  std::vector<std::uint64_t> words(word_count(n), 0);
  std::size_t i = 0;
  for (std::size_t u = 0; u < n; ++u) {
    for (std::size_t v = u + 1; v < n; ++v, ++i) {
      if (c.label(u) == c.label(v)) words[i / 64] |= std::uint64_t{1} << (i % 64);
    }
  }
  return words;
}

SignedGraph majority_graph_from_bits(std::size_t n, std::span<const std::uint64_t> a,
                                     std::span<const std::uint64_t> b,
                                     std::span<const std::uint64_t> c) {
  std::vector<std::uint64_t> words(word_count(n));
  for (std::size_t w = 0; w < words.size(); ++w) {
    words[w] = (a[w] & b[w]) | (a[w] & c[w]) | (b[w] & c[w]);
  }
  return SignedGraph::from_words(n, std::move(words));
}

SignedGraph majority_graph(std::span<const Clustering> triple) {
  if (triple.size() != 3) {
    throw Error(ErrorKind::Argument, "majority graph needs exactly 3 clusterings");
  }
  const std::size_t n = triple[0].size();
  for (const auto& c : triple) {
    if (c.size() != n) throw Error(ErrorKind::Dimension, "triple has mismatched point counts");
  }
  return majority_graph_from_bits(n, pair_bits(triple[0]), pair_bits(triple[1]),
                                  pair_bits(triple[2]));
}

std::uint64_t correlation_cost(const SignedGraph& g, const Clustering& c) {
  if (g.size() != c.size()) throw Error(ErrorKind::Dimension, "graph/clustering size mismatch");
  std::uint64_t cost = 0;
  for (PointId u = 0; u < c.size(); ++u) {
    for (PointId v = u + 1; v < c.size(); ++v) {
      if (g.plus(u, v) != c.together(u, v)) ++cost;
    }
  }
  return cost;
}

Clustering pivot_correlation(const SignedGraph& g, Rng& rng) {
  const std::size_t n = g.size();
  std::vector<PointId> free(n);
  std::iota(free.begin(), free.end(), 0);
  std::vector<std::int64_t> raw(n, -1);
  std::int64_t next = 0;
  while (!free.empty()) {
    const PointId pivot = free[rng.below(free.size())];
    raw[pivot] = next;
    for (PointId w : free) {
      if (w != pivot && g.plus(pivot, w)) raw[w] = next;
    }
    std::erase_if(free, [&](PointId w) { return raw[w] != -1; });
    ++next;
  }
  return Clustering::from_labels(raw);
}

namespace {

Clustering plus_components(const SignedGraph& g) {
  const std::size_t n = g.size();
  std::vector<std::int64_t> raw(n, -1);
  std::int64_t next = 0;
  std::vector<PointId> stack;
  for (PointId s = 0; s < n; ++s) {
    if (raw[s] != -1) continue;
    raw[s] = next;
    stack.push_back(s);
    while (!stack.empty()) {
      PointId u = stack.back();
      stack.pop_back();
      for (PointId w = 0; w < n; ++w) {
        if (raw[w] == -1 && w != u && g.plus(u, w)) {
          raw[w] = next;
          stack.push_back(w);
        }
      }
    }
    ++next;
  }
  return Clustering::from_labels(raw);
}

class ExactCorrelationSearch {
 public:
  explicit ExactCorrelationSearch(const SignedGraph& g)
      : g_(g), n_(g.size()), assign_(n_, 0), sizes_(n_, 0) {}

  void run(std::uint64_t bound, const Clustering& incumbent) {
    best_ = bound;
    best_assign_.assign(incumbent.labels().begin(), incumbent.labels().end());
    dfs(0, 0);
  }

  const std::vector<Label>& best_assign() const { return best_assign_; }

 private:
  void dfs(PointId v, std::uint64_t partial) {
    if (v == n_) {
      if (partial < best_) {
        best_ = partial;
        best_assign_ = assign_;
      }
      return;
    }
    // '+' edges from v into each open cluster, computed once per node.
    std::vector<std::size_t> plus_to(open_ + 1, 0);
    std::size_t plus_before = 0;
    for (PointId u = 0; u < v; ++u) {
      if (g_.plus(u, v)) {
        ++plus_to[assign_[u]];
        ++plus_before;
      }
    }
    const std::size_t open = open_;
    for (std::size_t j = 0; j <= open; ++j) {
      const std::uint64_t added = (sizes_[j] - plus_to[j]) + (plus_before - plus_to[j]);
      if (partial + added >= best_) continue;
      assign_[v] = static_cast<Label>(j);
      ++sizes_[j];
      if (j == open) ++open_;
      dfs(v + 1, partial + added);
      if (j == open) --open_;
      --sizes_[j];
    }
  }

  const SignedGraph& g_;
  std::size_t n_;
  std::vector<Label> assign_;
  std::vector<std::size_t> sizes_;
  std::size_t open_ = 0;
  std::uint64_t best_ = 0;
  std::vector<Label> best_assign_;
};

}  // namespace

Clustering exact_correlation(const SignedGraph& g, std::size_t guard) {
  if (g.size() > guard) {
    throw Error(ErrorKind::Capability, "exact correlation clustering is limited to n <= " +
                                           std::to_string(guard));
  }
  // Deterministic starting incumbents: singletons, one cluster, '+' components.
  Clustering incumbent = Clustering::singletons(g.size());
  std::uint64_t bound = correlation_cost(g, incumbent);
  for (Clustering alt : {Clustering::single_cluster(g.size()), plus_components(g)}) {
    const std::uint64_t cost = correlation_cost(g, alt);
    if (cost < bound) {
      bound = cost;
      incumbent = std::move(alt);
    }
  }
  ExactCorrelationSearch search(g);
  search.run(bound, incumbent);
  return from_label_vector(search.best_assign());
}

namespace {

constexpr std::size_t kMaskLimit = 64;
using Rows = std::array<std::uint64_t, kMaskLimit>;

/// '+' neighbourhoods as bitmasks; only for n <= 64.
Rows plus_rows(const SignedGraph& g) {
  const std::size_t n = g.size();
  Rows rows{};
  std::size_t i = 0;
  for (std::size_t u = 0; u < n; ++u) {
    for (std::size_t v = u + 1; v < n; ++v, ++i) {
      if ((g.words()[i / 64] >> (i % 64)) & 1U) {
        rows[u] |= std::uint64_t{1} << v;
        rows[v] |= std::uint64_t{1} << u;
      }
    }
  }
  return rows;
}

/// Greedy packing of edge-disjoint bad triangles (two '+' edges, one '-').
/// Each one forces a disagreement, so the count bounds every clustering's
/// cost from below.
std::uint64_t bad_triangle_bound(const Rows& rows, std::size_t n) {
  Rows used{};
  std::uint64_t count = 0;
  for (std::size_t u = 0; u < n; ++u) {
    for (std::size_t v = u + 1; v < n; ++v) {
      const std::uint64_t bu = std::uint64_t{1} << u;
      const std::uint64_t bv = std::uint64_t{1} << v;
      if (!(rows[u] & bv) || (used[u] & bv)) continue;
      // u-v is '+'; w closes a bad triangle iff exactly one of u-w, v-w is '+'
      std::uint64_t open = ~(bu | bv) & ~used[u] & ~used[v];
      open &= rows[u] ^ rows[v];
      if (n < 64) open &= (std::uint64_t{1} << n) - 1;
      if (!open) continue;
      const int w = std::countr_zero(open);
      const std::uint64_t bw = std::uint64_t{1} << w;
      used[u] |= bv | bw;
      used[v] |= bu | bw;
      used[w] |= bu | bv;
      ++count;
    }
  }
  return count;
}

/// pivot_correlation on bitmask rows with the same draws. Writes raw labels
/// and returns plus_edges + together_pairs - 2 * plus_inside.
std::uint64_t pivot_rows(const Rows& rows, std::size_t n, std::uint64_t plus_edges, Rng& rng,
                         std::array<std::int64_t, kMaskLimit>& raw) {
  std::uint64_t free = n == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1;
  std::uint64_t together = 0;
  std::uint64_t plus_inside_twice = 0;
  std::int64_t next = 0;
  while (free) {
    std::uint64_t pick = free;
    for (auto r = rng.below(static_cast<std::uint64_t>(std::popcount(free))); r > 0; --r) {
      pick &= pick - 1;
    }
    const int pivot = std::countr_zero(pick);
    const std::uint64_t cluster = (rows[pivot] & free) | (std::uint64_t{1} << pivot);
    free &= ~cluster;
    const auto size = static_cast<std::uint64_t>(std::popcount(cluster));
    together += size * (size - 1) / 2;
    for (std::uint64_t rest = cluster; rest; rest &= rest - 1) {
      const int u = std::countr_zero(rest);
      raw[u] = next;
      plus_inside_twice += static_cast<std::uint64_t>(std::popcount(rows[u] & cluster));
    }
    ++next;
  }
  return plus_edges + together - plus_inside_twice;
}

}  // namespace

Clustering correlation_clustering(const SignedGraph& g, Rng& rng,
                                  const CorrelationOptions& options) {
  if (g.size() <= options.exact_guard) return exact_correlation(g, options.exact_guard);
  std::uint64_t best = 0;
  const std::size_t restarts = std::max<std::size_t>(1, options.pivot_restarts);
  if (g.size() <= kMaskLimit) {
    const auto rows = plus_rows(g);
    const std::uint64_t plus_edges = g.plus_count();
    const std::uint64_t floor = bad_triangle_bound(rows, g.size());
    std::array<std::int64_t, kMaskLimit> raw{}, best_raw{};
    for (std::size_t r = 0; r < restarts; ++r) {
      const std::uint64_t cost = pivot_rows(rows, g.size(), plus_edges, rng, raw);
      if (r == 0 || cost < best) {
        best = cost;
        best_raw = raw;
      }
      if (best <= floor) break;
    }
    return Clustering::from_labels(std::span<const std::int64_t>(best_raw.data(), g.size()));
  }
  Clustering out;
  for (std::size_t r = 0; r < restarts; ++r) {
    Clustering candidate = pivot_correlation(g, rng);
    const std::uint64_t cost = correlation_cost(g, candidate);
    if (r == 0 || cost < best) {
      best = cost;
      out = std::move(candidate);
    }
    if (best == 0) break;
  }
  return out;
}

FairCorrelationResult fair_correlation(const SignedGraph& g, const ColorTable& colors,
                                       const FairnessConstraint& p,
                                       const ClosestFairBackend& backend, Rng& rng,
                                       const CorrelationOptions& options) {
  if (g.size() != colors.size()) throw Error(ErrorKind::Dimension, "color table size mismatch");
  p.check_feasible(colors);
  FairCorrelationResult result;
  result.exact_correlation = g.size() <= options.exact_guard;
  result.unconstrained = correlation_clustering(g, rng, options);
  result.clustering = closest_fair(result.unconstrained, colors, p, backend).clustering;
  result.cost = correlation_cost(g, result.clustering);
  return result;
}

std::uint64_t fitting_seed(std::uint64_t seed, const SignedGraph& g) {
  return derive_seed(seed, "cluster-fitting", g.hash());
}

Clustering cluster_fitting_graph(const SignedGraph& g, const ColorTable& colors,
                                 const FairnessConstraint& p, const ClosestFairBackend& backend,
                                 std::uint64_t seed, const CorrelationOptions& options) {
  Rng rng(fitting_seed(seed, g));
  return fair_correlation(g, colors, p, backend, rng, options).clustering;
}

Clustering cluster_fitting(std::span<const Clustering> triple, const ColorTable& colors,
                           const FairnessConstraint& p, const ClosestFairBackend& backend,
                           std::uint64_t seed, const CorrelationOptions& options) {
  return cluster_fitting_graph(majority_graph(triple), colors, p, backend, seed, options);
}

}  // namespace fcc
