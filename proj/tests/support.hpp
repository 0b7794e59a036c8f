#pragma once

// Test-side reference helpers, written independently of the library's own
// oracle module.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <vector>

#include "fcc/clustering.hpp"
#include "fcc/corrclust.hpp"
#include "fcc/fairness.hpp"

namespace ref {

using Labels = std::vector<int>;

inline bool same(const Labels& a, int u, int v) { return a[u] == a[v]; }

inline std::uint64_t pair_dist(const fcc::Clustering& a, const fcc::Clustering& b) {
  std::uint64_t d = 0;
  const int n = static_cast<int>(a.size());
  for (int u = 0; u < n; ++u) {
    for (int v = u + 1; v < n; ++v) d += (a.label(u) == a.label(v)) != (b.label(u) == b.label(v));
  }
  return d;
}

/// All set partitions of n points by recursive placement of each point into
/// an existing block or a new one.
inline std::vector<fcc::Clustering> partitions(int n) {
  std::vector<fcc::Clustering> out;
  std::vector<std::int64_t> labels(n);
  std::function<void(int, int)> place = [&](int v, int blocks) {
    if (v == n) {
      out.push_back(fcc::Clustering::from_labels(labels));
      return;
    }
    for (int b = 0; b <= blocks; ++b) {
      labels[v] = b;
      place(v + 1, std::max(blocks, b + 1));
    }
  };
  place(0, 0);
  return out;
}

inline bool fair(const fcc::Clustering& c, const std::vector<int>& color,
                 const std::vector<int>& ratio) {
  const int k = static_cast<int>(c.num_clusters());
  std::vector<std::vector<int>> count(k, std::vector<int>(ratio.size(), 0));
  for (std::size_t v = 0; v < c.size(); ++v) ++count[c.label(v)][color[v]];
  for (const auto& row : count) {
    // counts must be a * ratio for one a >= 1
    if (row[0] % ratio[0] != 0) return false;
    const int a = row[0] / ratio[0];
    if (a < 1) return false;
    for (std::size_t i = 0; i < ratio.size(); ++i) {
      if (row[i] != a * ratio[i]) return false;
    }
  }
  return true;
}

inline std::vector<fcc::Clustering> fair_partitions(int n, const std::vector<int>& color,
                                                    const std::vector<int>& ratio) {
  std::vector<fcc::Clustering> out;
  for (auto& c : partitions(n)) {
    if (fair(c, color, ratio)) out.push_back(c);
  }
  return out;
}

inline std::uint64_t corr_cost(const fcc::SignedGraph& g, const fcc::Clustering& c) {
  std::uint64_t cost = 0;
  for (fcc::PointId u = 0; u < c.size(); ++u) {
    for (fcc::PointId v = u + 1; v < c.size(); ++v) cost += g.plus(u, v) != c.together(u, v);
  }
  return cost;
}

inline fcc::Clustering random_clustering(std::mt19937_64& rng, int n, int max_labels) {
  std::uniform_int_distribution<int> pick(0, std::max(0, max_labels - 1));
  std::vector<std::int64_t> raw(n);
  for (auto& x : raw) x = pick(rng);
  return fcc::Clustering::from_labels(raw);
}

inline fcc::SignedGraph random_graph(std::mt19937_64& rng, int n, double plus = 0.5) {
  fcc::SignedGraph g(n);
  std::bernoulli_distribution coin(plus);
  for (int u = 0; u < n; ++u) {
    for (int v = u + 1; v < n; ++v) g.set(u, v, coin(rng));
  }
  return g;
}

/// Alternating colors 0,1,0,1,...
inline std::vector<fcc::Color> alternating(int n) {
  std::vector<fcc::Color> c(n);
  for (int v = 0; v < n; ++v) c[v] = static_cast<fcc::Color>(v % 2);
  return c;
}

inline std::vector<int> as_int(const std::vector<fcc::Color>& c) { return {c.begin(), c.end()}; }

/// Exhaustive fair k-median optimum over the given fair partitions.
inline std::uint64_t kmedian_opt(const std::vector<fcc::Clustering>& inputs,
                                 const std::vector<fcc::Clustering>& fair, int k) {
  const std::size_t m = inputs.size();
  std::vector<std::vector<std::uint64_t>> d(fair.size(), std::vector<std::uint64_t>(m));
  for (std::size_t f = 0; f < fair.size(); ++f) {
    for (std::size_t i = 0; i < m; ++i) d[f][i] = pair_dist(fair[f], inputs[i]);
  }
  std::uint64_t best = std::numeric_limits<std::uint64_t>::max();
  if (k == 1) {
    for (const auto& row : d) {
      std::uint64_t s = 0;
      for (auto x : row) s += x;
      best = std::min(best, s);
    }
    return best;
  }
  for (std::size_t a = 0; a < fair.size(); ++a) {
    for (std::size_t b = a + 1; b < fair.size(); ++b) {
      std::uint64_t s = 0;
      for (std::size_t i = 0; i < m; ++i) s += std::min(d[a][i], d[b][i]);
      best = std::min(best, s);
    }
  }
  return best;
}

/// Optimal fair centers (k = 1 or 2) by exhaustive search, ties to the
/// lexicographically first choice.
inline std::vector<std::size_t> kmedian_argopt(const std::vector<fcc::Clustering>& inputs,
                                               const std::vector<fcc::Clustering>& fair, int k) {
  std::uint64_t best = std::numeric_limits<std::uint64_t>::max();
  std::vector<std::size_t> arg;
  for (std::size_t a = 0; a < fair.size(); ++a) {
    if (k == 1) {
      std::uint64_t s = 0;
      for (const auto& c : inputs) s += pair_dist(c, fair[a]);
      if (s < best) {
        best = s;
        arg = {a};
      }
      continue;
    }
    for (std::size_t b = a + 1; b < fair.size(); ++b) {
      std::uint64_t s = 0;
      for (const auto& c : inputs) s += std::min(pair_dist(c, fair[a]), pair_dist(c, fair[b]));
      if (s < best) {
        best = s;
        arg = {a, b};
      }
    }
  }
  return arg;
}

struct FarawayCheck {
  int super_clusters = 0;
  int violations = 0;
};

/// For each super-cluster of the optimal fair k-median, look for a member
/// of F whose cost on that super-cluster is within
/// 2(1 + 1/(1-kappa)) times the optimal cost plus rho * OPT / k.
inline FarawayCheck check_faraway(const std::vector<fcc::Clustering>& inputs,
                                  const std::vector<fcc::Clustering>& fair, int k,
                                  const std::vector<fcc::Clustering>& sampled, double kappa,
                                  double rho) {
  const auto centers = kmedian_argopt(inputs, fair, k);
  std::vector<std::vector<const fcc::Clustering*>> groups(centers.size());
  std::uint64_t opt = 0;
  for (const auto& c : inputs) {
    std::size_t best = 0;
    for (std::size_t j = 1; j < centers.size(); ++j) {
      if (pair_dist(c, fair[centers[j]]) < pair_dist(c, fair[centers[best]])) best = j;
    }
    groups[best].push_back(&c);
    opt += pair_dist(c, fair[centers[best]]);
  }
  FarawayCheck out;
  const double factor = 2.0 * (1.0 + 1.0 / (1.0 - kappa));
  for (std::size_t j = 0; j < centers.size(); ++j) {
    if (groups[j].empty()) continue;
    ++out.super_clusters;
    std::uint64_t own = 0;
    for (auto* c : groups[j]) own += pair_dist(*c, fair[centers[j]]);
    const double limit = factor * static_cast<double>(own) + rho * static_cast<double>(opt) / k;
    bool met = false;
    for (const auto& f : sampled) {
      std::uint64_t cost = 0;
      for (auto* c : groups[j]) cost += pair_dist(*c, f);
      met = met || static_cast<double>(cost) <= limit;
    }
    out.violations += !met;
  }
  return out;
}

}  // namespace ref
