#include "fcc/oracle.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace fcc::oracle {

namespace {

void require(std::size_t n, std::size_t guard, const char* what) {
  if (n > guard) {
    throw Error(ErrorKind::Capability, std::string(what) + ": n=" + std::to_string(n) +
                                           " exceeds the oracle guard " + std::to_string(guard));
  }
}

}  // namespace

PartitionEnumerator::PartitionEnumerator(std::size_t n) : n_(n) {
  require(n, kEnumerationGuard, "partition enumeration");
}

void PartitionEnumerator::for_each(const std::function<void(const Clustering&)>& visit) const {
  if (n_ == 0) {
    visit(Clustering::from_labels(std::span<const std::int64_t>{}));
    return;
  }
  std::vector<std::int64_t> rgs(n_, 0);
  std::vector<std::int64_t> prefix_max(n_, 0);
  while (true) {
    visit(Clustering::from_labels(rgs));
    // Next restricted-growth string: bump the rightmost position that can grow.
    std::size_t i = n_ - 1;
    while (i > 0 && rgs[i] > prefix_max[i - 1]) --i;
    if (i == 0) return;
    ++rgs[i];
    prefix_max[i] = std::max(prefix_max[i - 1], rgs[i]);
    for (std::size_t j = i + 1; j < n_; ++j) {
      rgs[j] = 0;
      prefix_max[j] = prefix_max[i];
    }
  }
}

std::vector<Clustering> PartitionEnumerator::all() const {
  std::vector<Clustering> out;
  for_each([&](const Clustering& c) { out.push_back(c); });
  return out;
}

std::vector<Clustering> enum_fair_partitions(std::size_t n, const ColorTable& colors,
                                             const FairnessConstraint& p) {
  if (colors.size() != n) throw Error(ErrorKind::Dimension, "color table size does not match n");
  p.check_feasible(colors);
  std::vector<Clustering> out;
  PartitionEnumerator(n).for_each([&](const Clustering& c) {
    if (is_fair(c, colors, p)) out.push_back(c);
  });
  return out;
}

std::vector<std::uint64_t> bell_numbers(std::size_t n) {
  std::vector<std::uint64_t> bell{1};
  std::vector<std::uint64_t> row{1};
  for (std::size_t i = 1; i <= n; ++i) {
    std::vector<std::uint64_t> next{row.back()};
    for (auto v : row) next.push_back(next.back() + v);
    row = std::move(next);
    bell.push_back(row.front());
  }
  return bell;
}

std::uint64_t naive_dist(const Clustering& a, const Clustering& b) {
  if (a.size() != b.size()) throw Error(ErrorKind::Dimension, "clusterings differ in n");
  std::uint64_t d = 0;
  for (PointId u = 0; u < a.size(); ++u) {
    for (PointId v = u + 1; v < a.size(); ++v) {
      if ((a.label(u) == a.label(v)) != (b.label(u) == b.label(v))) ++d;
    }
  }
  return d;
}

std::uint64_t closest_fair_distance(const Clustering& c, const ColorTable& colors,
                                    const FairnessConstraint& p) {
  std::uint64_t best = std::numeric_limits<std::uint64_t>::max();
  for (const auto& f : enum_fair_partitions(c.size(), colors, p)) best = std::min(best, naive_dist(c, f));
  return best;
}

ConsensusOptimum opt_fair_consensus(const InputSet& inputs, std::size_t k,
                                    const ColorTable& colors, const FairnessConstraint& p) {
  const std::size_t n = inputs.num_points();
  require(n, kConsensusGuard, "fair consensus oracle");
  if (k == 0) throw Error(ErrorKind::Argument, "k must be at least 1");
  const std::vector<Clustering> fair = enum_fair_partitions(n, colors, p);
  if (k > fair.size()) {
    throw Error(ErrorKind::Argument, "k=" + std::to_string(k) + " exceeds the " +
                                         std::to_string(fair.size()) + " fair partitions");
  }
  if (std::pow(static_cast<double>(fair.size()), static_cast<double>(k)) >
      static_cast<double>(kTupleGuard)) {
    throw Error(ErrorKind::Capability, "fair partitions ^ k exceeds the oracle tuple guard");
  }
  const std::size_t m = inputs.size();
  std::vector<std::uint64_t> cost(fair.size() * m);
  for (std::size_t f = 0; f < fair.size(); ++f) {
    for (std::size_t i = 0; i < m; ++i) cost[f * m + i] = naive_dist(fair[f], inputs[i]);
  }

  ConsensusOptimum best;
  best.fair_partitions = fair.size();
  best.objective = std::numeric_limits<std::uint64_t>::max();
  std::vector<std::size_t> pick(k);
  auto walk = [&](auto&& self, std::size_t depth, std::size_t start) -> void {
    if (depth == k) {
      std::uint64_t total = 0;
      for (std::size_t i = 0; i < m; ++i) {
        std::uint64_t lo = std::numeric_limits<std::uint64_t>::max();
        for (auto f : pick) lo = std::min(lo, cost[f * m + i]);
        total += lo;
      }
      if (total < best.objective) {
        best.objective = total;
        best.centers.clear();
        for (auto f : pick) best.centers.push_back(fair[f]);
      }
      return;
    }
    for (std::size_t f = start; f < fair.size(); ++f) {
      pick[depth] = f;
      self(self, depth + 1, f + 1);
    }
  };
  walk(walk, 0, 0);
  return best;
}

namespace {

std::uint64_t naive_correlation_cost(const SignedGraph& g, const Clustering& c) {
  std::uint64_t cost = 0;
  for (PointId u = 0; u < c.size(); ++u) {
    for (PointId v = u + 1; v < c.size(); ++v) {
      const bool together = c.label(u) == c.label(v);
      if (g.plus(u, v) != together) ++cost;
    }
  }
  return cost;
}

CorrelationOptimum search(const SignedGraph& g, const std::function<bool(const Clustering&)>& keep) {
  require(g.size(), kCorrelationGuard, "correlation oracle");
  CorrelationOptimum best;
  best.cost = std::numeric_limits<std::uint64_t>::max();
  PartitionEnumerator(g.size()).for_each([&](const Clustering& c) {
    if (!keep(c)) return;
    const std::uint64_t cost = naive_correlation_cost(g, c);
    if (cost < best.cost) {
      best.cost = cost;
      best.clustering = c;
    }
  });
  return best;
}

}  // namespace

CorrelationOptimum opt_fair_correlation(const SignedGraph& g, const ColorTable& colors,
                                        const FairnessConstraint& p) {
  if (colors.size() != g.size()) throw Error(ErrorKind::Dimension, "color table size does not match n");
  p.check_feasible(colors);
  return search(g, [&](const Clustering& c) { return is_fair(c, colors, p); });
}

CorrelationOptimum opt_correlation(const SignedGraph& g) {
  return search(g, [](const Clustering&) { return true; });
}

}  // namespace fcc::oracle
