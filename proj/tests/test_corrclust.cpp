#include <doctest.h>

#include <random>

#include "fcc/corrclust.hpp"
#include "support.hpp"

using fcc::Clustering;
using fcc::SignedGraph;

namespace {

const fcc::FairnessConstraint kEven({1, 1});

SignedGraph all_sign(int n, bool plus) {
  SignedGraph g(n);
  for (int u = 0; u < n; ++u) {
    for (int v = u + 1; v < n; ++v) g.set(u, v, plus);
  }
  return g;
}

std::uint64_t brute_fair_opt(const SignedGraph& g, const std::vector<int>& colors) {
  std::uint64_t best = UINT64_MAX;
  for (const auto& c : ref::fair_partitions(static_cast<int>(g.size()), colors, {1, 1})) {
    best = std::min(best, ref::corr_cost(g, c));
  }
  return best;
}

std::uint64_t brute_opt(const SignedGraph& g) {
  std::uint64_t best = UINT64_MAX;
  for (const auto& c : ref::partitions(static_cast<int>(g.size()))) best = std::min(best, ref::corr_cost(g, c));
  return best;
}

}  // namespace

TEST_CASE("majority graph examples") {
  const auto c = Clustering::from_labels({0, 0, 1, 1, 0});
  const std::vector<Clustering> same{c, c, c};
  CHECK(fcc::majority_graph(same) == SignedGraph::consistent_with(c));

  const std::vector<Clustering> t{Clustering::from_labels({0, 0, 1}), Clustering::from_labels({0, 0, 1}),
                                  Clustering::from_labels({0, 1, 1})};
  const auto g = fcc::majority_graph(t);
  CHECK(g.plus(0, 1));
  CHECK_FALSE(g.plus(0, 2));
  CHECK_FALSE(g.plus(1, 2));

  const std::vector<Clustering> rotated{Clustering::from_labels({0, 0, 1}), Clustering::from_labels({0, 1, 0}),
                                        Clustering::from_labels({0, 1, 1})};
  CHECK(fcc::majority_graph(rotated).plus_count() == 0);

  const std::vector<Clustering> two{c, c};
  CHECK_THROWS_AS(fcc::majority_graph(two), fcc::Error);
}

TEST_CASE("majority graph agrees with per-pair voting") {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 40);
    std::vector<Clustering> t;
    for (int i = 0; i < 3; ++i) t.push_back(ref::random_clustering(rng, n, 1 + static_cast<int>(rng() % n)));
    const auto g = fcc::majority_graph(t);
    for (int u = 0; u < n; ++u) {
      for (int v = u + 1; v < n; ++v) {
        const int votes = t[0].together(u, v) + t[1].together(u, v) + t[2].together(u, v);
        REQUIRE(g.plus(u, v) == (votes >= 2));
      }
    }
  }
}

TEST_CASE("correlation cost examples") {
  const auto c = Clustering::from_labels({0, 1, 0, 2});
  CHECK(fcc::correlation_cost(SignedGraph::consistent_with(c), c) == 0);
  CHECK(fcc::correlation_cost(all_sign(3, false), Clustering::single_cluster(3)) == 3);
  CHECK(fcc::correlation_cost(all_sign(3, true), Clustering::singletons(3)) == 3);
  CHECK_THROWS_AS(fcc::correlation_cost(all_sign(3, true), Clustering::singletons(4)), fcc::Error);
}

TEST_CASE("pivot examples") {
  const auto c = Clustering::from_labels({0, 1, 0, 2, 1, 1});
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    fcc::Rng rng(seed);
    CHECK(fcc::pivot_correlation(SignedGraph::consistent_with(c), rng) == c);
  }
  fcc::Rng rng(1);
  CHECK(fcc::pivot_correlation(all_sign(5, false), rng) == Clustering::singletons(5));

  std::mt19937_64 gen(7);
  const auto g = ref::random_graph(gen, 4);
  fcc::Rng seven(7);
  CHECK(fcc::correlation_cost(g, fcc::pivot_correlation(g, seven)) <= 3 * brute_opt(g));
}

TEST_CASE("exact correlation matches enumeration") {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 8);
    const auto g = ref::random_graph(rng, n, 0.2 + 0.1 * (trial % 6));
    const auto c = fcc::exact_correlation(g);
    CHECK(ref::corr_cost(g, c) == brute_opt(g));
  }
  CHECK_THROWS_AS(fcc::exact_correlation(SignedGraph(13)), fcc::Error);
}

TEST_CASE("pivot quality over many seeds") {
  std::mt19937_64 gen(99);
  for (int graph = 0; graph < 5; ++graph) {
    const auto g = ref::random_graph(gen, 6);
    const auto opt = brute_opt(g);
    double total = 0;
    const int seeds = 200;
    std::uint64_t restarts_best = UINT64_MAX;
    for (int s = 0; s < seeds; ++s) {
      fcc::Rng rng(s);
      const auto cost = fcc::correlation_cost(g, fcc::pivot_correlation(g, rng));
      total += static_cast<double>(cost);
      if (s < 32) restarts_best = std::min(restarts_best, cost);
    }
    MESSAGE("graph " << graph << ": mean pivot cost " << total / seeds << ", optimum " << opt);
    CHECK(restarts_best <= 5 * opt);
  }
}

TEST_CASE("fair correlation examples") {
  const fcc::ColorTable colors(std::vector<fcc::Color>{0, 1, 0, 1}, 2);
  fcc::Rng rng(0);
  const auto fair = Clustering::from_labels({0, 0, 1, 1});
  auto r = fcc::fair_correlation(SignedGraph::consistent_with(fair), colors, kEven, {}, rng);
  CHECK(r.clustering == fair);
  CHECK(r.cost == 0);

  const auto unfair = Clustering::from_labels({0, 1, 2, 2});
  r = fcc::fair_correlation(SignedGraph::consistent_with(unfair), colors, kEven, {}, rng);
  CHECK(r.clustering == fcc::closest_fair(unfair, colors, kEven, {}).clustering);
  CHECK(r.cost == 1);

  const fcc::ColorTable rb(std::vector<fcc::Color>{0, 1}, 2);
  r = fcc::fair_correlation(all_sign(2, false), rb, kEven, {}, rng);
  CHECK(r.clustering == Clustering::single_cluster(2));
  CHECK(r.cost == 1);
}

TEST_CASE("fair correlation composition bound with exact sub-solvers") {
  std::mt19937_64 gen(31);
  for (int trial = 0; trial < 120; ++trial) {
    const int n = 2 * (1 + static_cast<int>(gen() % 3));
    const auto colors_v = ref::alternating(n);
    const fcc::ColorTable colors(colors_v, 2);
    const auto g = ref::random_graph(gen, n, 0.2 + 0.15 * (trial % 5));
    fcc::Rng rng(trial);
    const auto r = fcc::fair_correlation(g, colors, kEven, {}, rng);
    REQUIRE(fcc::is_fair(r.clustering, colors, kEven));
    CHECK(r.exact_correlation);
    CHECK(r.cost <= 3 * brute_fair_opt(g, ref::as_int(colors_v)));
  }
}

TEST_CASE("pivot path above the exact guard stays fair") {
  std::mt19937_64 gen(2);
  const int n = 16;
  const fcc::ColorTable colors(ref::alternating(n), 2);
  const auto g = ref::random_graph(gen, n, 0.3);
  fcc::Rng rng(5);
  const auto r = fcc::fair_correlation(g, colors, kEven, {fcc::FairMode::TwoColorRepair}, rng);
  CHECK_FALSE(r.exact_correlation);
  CHECK(fcc::is_fair(r.clustering, colors, kEven));
}

TEST_CASE("pivot restarts keep the first minimum-cost run") {
  std::mt19937_64 gen(12);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 14 + 2 * (trial % 26);
    const fcc::ColorTable colors(ref::alternating(n), 2);
    const auto g = ref::random_graph(gen, n, 0.1 + 0.03 * (trial % 10));
    fcc::Rng a(trial), b(trial);
    const auto r = fcc::fair_correlation(g, colors, kEven, {fcc::FairMode::TwoColorRepair}, a);
    Clustering best;
    std::uint64_t best_cost = UINT64_MAX;
    for (int i = 0; i < 32; ++i) {
      auto c = fcc::pivot_correlation(g, b);
      const auto cost = ref::corr_cost(g, c);
      if (cost < best_cost) {
        best_cost = cost;
        best = std::move(c);
      }
    }
    CHECK(r.unconstrained == best);
  }
}

TEST_CASE("cost shift inequality") {
  std::mt19937_64 gen(17);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + static_cast<int>(gen() % 20);
    const auto g = ref::random_graph(gen, n);
    const auto c = ref::random_clustering(gen, n, 1 + static_cast<int>(gen() % n));
    const auto d = ref::random_clustering(gen, n, 1 + static_cast<int>(gen() % n));
    CHECK(fcc::correlation_cost(g, c) <= fcc::correlation_cost(g, d) + fcc::dist(c, d));
    CHECK(fcc::correlation_cost(g, c) == ref::corr_cost(g, c));
  }
}

TEST_CASE("cluster fitting") {
  const fcc::ColorTable colors(ref::alternating(6), 2);
  const auto fair = Clustering::from_labels({0, 0, 1, 1, 2, 2});
  const std::vector<Clustering> same{fair, fair, fair};
  CHECK(fcc::cluster_fitting(same, colors, kEven, {}, 1) == fair);

  const auto unfair = Clustering::from_labels({0, 1, 0, 1, 2, 2});
  const std::vector<Clustering> bad{unfair, unfair, unfair};
  CHECK(fcc::cluster_fitting(bad, colors, kEven, {}, 1) ==
        fcc::closest_fair(unfair, colors, kEven, {}).clustering);

  std::mt19937_64 gen(23);
  for (int trial = 0; trial < 60; ++trial) {
    std::vector<Clustering> t;
    for (int i = 0; i < 3; ++i) t.push_back(ref::random_clustering(gen, 6, 1 + static_cast<int>(gen() % 6)));
    const auto out = fcc::cluster_fitting(t, colors, kEven, {}, trial);
    REQUIRE(fcc::is_fair(out, colors, kEven));
    const auto g = fcc::majority_graph(t);
    CHECK(fcc::correlation_cost(g, out) <= 3 * brute_fair_opt(g, ref::as_int(ref::alternating(6))));
  }
}

TEST_CASE("cluster fitting is a pure function of graph and seed") {
  std::mt19937_64 gen(41);
  const int n = 14;
  const fcc::ColorTable colors(ref::alternating(n), 2);
  std::vector<Clustering> t;
  for (int i = 0; i < 3; ++i) t.push_back(ref::random_clustering(gen, n, 4));
  const fcc::ClosestFairBackend repair{fcc::FairMode::TwoColorRepair};
  const auto a = fcc::cluster_fitting(t, colors, kEven, repair, 9);
  const auto b = fcc::cluster_fitting(t, colors, kEven, repair, 9);
  CHECK(a == b);
  std::vector<Clustering> permuted{t[2], t[0], t[1]};
  CHECK(fcc::cluster_fitting(permuted, colors, kEven, repair, 9) == a);
}
