#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "fcc/io.hpp"
#include "fcc/stream_kmedian.hpp"
#include "support.hpp"

using fcc::Clustering;

namespace {

const fcc::FairnessConstraint kEven({1, 1});

fcc::StreamHeader header_for(int n, std::size_t m, fcc::StreamMode mode = fcc::StreamMode::Contiguous) {
  return {static_cast<std::size_t>(n), m, fcc::ColorTable(ref::alternating(n), 2), kEven, mode};
}

std::vector<fcc::StreamTriple> encode_all(const std::vector<Clustering>& cs) {
  std::vector<fcc::StreamTriple> out;
  for (std::size_t j = 0; j < cs.size(); ++j) {
    auto block = fcc::encode_triples(cs[j], static_cast<std::uint32_t>(j));
    out.insert(out.end(), block.begin(), block.end());
  }
  return out;
}

std::vector<Clustering> planted(std::uint64_t seed, int n, int m, int centers, double noise) {
  fcc::GenParams gen;
  gen.n = n;
  gen.m = m;
  gen.centers = centers;
  gen.noise = noise;
  gen.seed = seed;
  return fcc::generate(gen).clusterings;
}

/// Greedy net over arrival order: keep a clustering iff it is at least
/// `threshold` from every kept one.
std::vector<std::uint32_t> greedy_net(const std::vector<Clustering>& cs, double threshold) {
  std::vector<std::uint32_t> kept;
  for (std::uint32_t i = 0; i < cs.size(); ++i) {
    bool ok = true;
    for (auto j : kept) ok = ok && static_cast<double>(ref::pair_dist(cs[i], cs[j])) >= threshold;
    if (ok) kept.push_back(i);
  }
  return kept;
}

}  // namespace

TEST_CASE("grid sampler basics") {
  const auto a = Clustering::from_labels({0, 0, 1, 1});
  fcc::GridSampler grid(4, 10, 1, {}, 1);
  grid.update(a, 0);
  for (const auto& cell : grid.cells()) {
    if (cell.p == 1.0) CHECK(cell.members == std::vector<std::uint32_t>{0});
  }
  grid.update(a, 1);
  for (const auto& cell : grid.cells()) {
    // a duplicate only enters cells that were still empty
    if (!cell.members.empty() && cell.members.front() == 0) CHECK(cell.members.size() == 1);
  }
  CHECK(grid.cells().front().D == 0.5);
  CHECK(grid.cells().back().D >= 6.0);
  CHECK(grid.cells().back().p == doctest::Approx(0.1));
}

TEST_CASE("grid p=1 cells replay the greedy net") {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 6;
    std::vector<Clustering> cs;
    const int m = trial == 0 ? 3 : 12;
    for (int i = 0; i < m; ++i) cs.push_back(ref::random_clustering(rng, n, 3));
    fcc::GridParams params;
    params.delta = 0.1;
    params.reset_enabled = false;
    fcc::GridSampler grid(n, m, 2, params, trial);
    for (int i = 0; i < m; ++i) grid.update(cs[i], i);
    for (const auto& cell : grid.cells()) {
      if (cell.p != 1.0) continue;
      CHECK(cell.members == greedy_net(cs, 0.1 * cell.D));
    }
  }
}

TEST_CASE("grid separation and reset invariants") {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 8; ++trial) {
    const int n = 8;
    const int m = 30 + trial * 10;
    const std::size_t k = 1 + trial % 2;
    fcc::GridSampler grid(n, m, k, {}, trial);
    const auto cap = grid.reset_cap();
    CHECK(cap == static_cast<std::size_t>(std::ceil(k * std::pow(std::log2(double(m)), 3))));
    for (int i = 0; i < m; ++i) {
      grid.update(ref::random_clustering(rng, n, 1 + static_cast<int>(rng() % n)), i);
      for (const auto& cell : grid.cells()) {
        REQUIRE(cell.members.size() < cap);
        if (cell.dead) REQUIRE(cell.members.empty());
      }
    }
    for (const auto& cell : grid.cells()) {
      for (std::size_t x = 0; x < cell.members.size(); ++x) {
        for (std::size_t y = x + 1; y < cell.members.size(); ++y) {
          const auto d = fcc::dist(grid.stored(cell.members[x]), grid.stored(cell.members[y]));
          CHECK(static_cast<double>(d) >= 0.05 * cell.D);
        }
      }
    }
  }
}

TEST_CASE("grid reset fires with a tiny cap") {
  // m = 2 gives a cap of k = 1: every accepting cell is emptied at once.
  fcc::GridSampler grid(4, 2, 1, {}, 0);
  grid.update(Clustering::singletons(4), 0);
  CHECK(grid.entries() == 0);
  CHECK(grid.live_cells() < grid.num_cells());
}

TEST_CASE("faraway sampler examples") {
  std::mt19937_64 rng(3);
  std::vector<Clustering> cs;
  for (int i = 0; i < 6; ++i) cs.push_back(ref::random_clustering(rng, 6, 3));
  fcc::FarawaySampler far(6, 6, 2, {}, 1);
  CHECK(far.reservoir_size() >= 6);
  for (int i = 0; i < 6; ++i) far.update(cs[i], i);
  auto out = far.output();
  std::vector<Clustering> distinct;
  for (const auto& c : cs) {
    if (std::find(distinct.begin(), distinct.end(), c) == distinct.end()) distinct.push_back(c);
  }
  REQUIRE(out.size() == distinct.size());
  for (std::size_t i = 0; i < out.size(); ++i) CHECK(out[i].second == distinct[i]);

  fcc::FarawaySampler copies(6, 50, 2, {}, 1);
  for (int i = 0; i < 50; ++i) copies.update(cs[0], i);
  CHECK(copies.output().size() == 1);
  CHECK(copies.entries() <= copies.capacity());
}

TEST_CASE("faraway levels die on overflow") {
  fcc::FarawayParams params;
  params.reservoir_size = 1;
  params.level_cap = 1;
  fcc::FarawaySampler far(4, 10, 1, params, 0);
  far.update(Clustering::singletons(4), 0);
  far.update(Clustering::single_cluster(4), 1);
  CHECK(far.entries() <= far.capacity());
  const auto out = far.output();
  CHECK(out.size() >= 1);
}

TEST_CASE("default faraway and coreset sizes") {
  CHECK(fcc::default_reservoir_size(6, 2, 1.0 / 3.0, 0.5) ==
        static_cast<std::size_t>(std::ceil(4.0 / (0.5 / 3.0) * 1.0 * std::log2(1.0 + 2.0 / 3.0 * 6.0))));
  CHECK(fcc::default_coreset_cap(40, 2, 0.25) ==
        static_cast<std::size_t>(std::ceil(16.0 * 2.0 * std::log2(40.0 + 9880.0))));
}

TEST_CASE("coreset examples") {
  std::mt19937_64 rng(4);
  std::vector<Clustering> cs;
  for (int i = 0; i < 20; ++i) cs.push_back(ref::random_clustering(rng, 6, 3));
  fcc::CoresetParams params;
  params.cap = 50;
  fcc::MergeReduceCoreset whole(20, 2, params, 0);
  for (const auto& c : cs) whole.update(c);
  const auto q = whole.query();
  const auto merged = fcc::merge_duplicates(std::vector<fcc::WeightedClustering>(
      [&] {
        std::vector<fcc::WeightedClustering> w;
        for (const auto& c : cs) w.push_back({c, 1.0});
        return w;
      }()));
  REQUIRE(q.size() == merged.size());
  for (std::size_t i = 0; i < q.size(); ++i) {
    CHECK(q[i].clustering == merged[i].clustering);
    CHECK(q[i].weight == merged[i].weight);
  }

  params.cap = 3;
  fcc::MergeReduceCoreset copies(30, 1, params, 0);
  for (int i = 0; i < 30; ++i) copies.update(cs[0]);
  const auto one = copies.query();
  REQUIRE(one.size() == 1);
  CHECK(one[0].weight == doctest::Approx(30.0));
}

TEST_CASE("coreset reduction keeps total weight and its storage bound") {
  std::mt19937_64 rng(5);
  fcc::CoresetParams params;
  params.cap = 8;
  const std::size_t m = 200;
  fcc::MergeReduceCoreset cs(m, 2, params, 7);
  for (std::size_t i = 0; i < m; ++i) {
    cs.update(ref::random_clustering(rng, 8, 4));
    REQUIRE(cs.entries() <= cs.bound());
  }
  double total = 0;
  for (const auto& w : cs.query()) {
    CHECK(w.weight > 0.0);
    total += w.weight;
  }
  CHECK(total == doctest::Approx(double(m)).epsilon(1e-9));
  CHECK(cs.reductions() > 0);
  CHECK(cs.bound() == 8 * (5 + 2));
}

TEST_CASE("coreset sandwich with a forced small cap") {
  const int n = 8;
  const std::size_t m = 40;
  const auto inputs = planted(12, n, m, 2, 0.25);
  const fcc::ColorTable colors(ref::alternating(n), 2);
  fcc::Rng pick(3);
  fcc::CoresetParams params;
  params.epsilon = 0.25;
  params.cap = 16;
  fcc::MergeReduceCoreset cs(m, 2, params, 1);
  for (const auto& c : inputs) cs.update(c);
  const auto q = cs.query();
  const fcc::InputSet full(inputs);
  int within = 0;
  for (int t = 0; t < 50; ++t) {
    std::vector<Clustering> y;
    for (int i = 0; i < 2; ++i) y.push_back(fcc::random_fair_clustering(colors, kEven, pick));
    const double exact = static_cast<double>(fcc::objective(full, y));
    const double approx = fcc::objective(q, y);
    within += std::abs(approx - exact) <= 0.25 * exact;
  }
  MESSAGE("coreset with cap 16 (" << q.size() << " members): " << within << "/50 tuples within 25%");
  CHECK(within >= 40);
}

TEST_CASE("streaming k-median rejects general streams and bad k") {
  try {
    fcc::StreamKMedian(header_for(4, 2, fcc::StreamMode::General), {}, {});
    FAIL("expected an error");
  } catch (const fcc::Error& e) {
    CHECK(e.kind() == fcc::ErrorKind::Capability);
  }
  fcc::StreamKMedianParams params;
  params.k = 0;
  CHECK_THROWS_AS(fcc::StreamKMedian(header_for(4, 2), params, {}), fcc::Error);
}

TEST_CASE("streaming k-median degenerate configuration matches offline") {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 6;
    const std::size_t m = 3 + rng() % 4;
    std::vector<Clustering> inputs;
    for (std::size_t i = 0; i < m; ++i) inputs.push_back(ref::random_clustering(rng, n, 3));
    if (trial % 2) inputs.push_back(inputs.front());
    const fcc::InputSet set(inputs);
    const fcc::ColorTable colors(ref::alternating(n), 2);
    for (std::size_t k : {1u, 2u}) {
      fcc::RunOptions options;
      options.seed = trial;
      const auto r = fcc::stream_kmedian(header_for(n, inputs.size()), encode_all(inputs),
                                         fcc::uncapped_kmedian_params(k), options);
      const auto off = fcc::consensus_kmedian(set, k, colors, kEven, options);
      CHECK(fcc::objective(set, r.centers) == off.objective);
      CHECK(r.report.coreset_objective == doctest::Approx(double(off.objective)));
    }
  }
}

TEST_CASE("streaming k-median on two planted clusterings") {
  const fcc::ColorTable colors(ref::alternating(8), 2);
  const auto a = Clustering::from_labels({0, 0, 1, 1, 2, 2, 3, 3});
  const auto b = Clustering::single_cluster(8);
  std::vector<Clustering> inputs;
  for (int i = 0; i < 10; ++i) inputs.push_back(i % 2 ? a : b);
  fcc::StreamKMedianParams params;
  params.k = 2;
  const auto r = fcc::stream_kmedian(header_for(8, inputs.size()), encode_all(inputs), params, {});
  CHECK(fcc::objective(fcc::InputSet(inputs), r.centers) == 0);
}

TEST_CASE("streaming k-median against the exhaustive optimum") {
  const int n = 8;
  const std::size_t m = 60;
  const auto fair = ref::fair_partitions(n, ref::as_int(ref::alternating(n)), {1, 1});
  for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
    const auto inputs = planted(seed, n, m, 2, 0.25);
    fcc::StreamKMedianParams params;
    params.k = 2;
    fcc::RunOptions options;
    options.seed = seed;
    fcc::StreamKMedian algo(header_for(n, m), params, options);
    for (const auto& t : encode_all(inputs)) algo.consume(t);
    const auto r = algo.finish();
    for (const auto& c : r.centers) REQUIRE(fcc::is_fair(c, fcc::ColorTable(ref::alternating(n), 2), kEven));
    const auto value = fcc::objective(fcc::InputSet(inputs), r.centers);
    const auto opt = ref::kmedian_opt(inputs, fair, 2);
    MESSAGE("seed " << seed << ": stream " << value << " vs optimum " << opt << ", |S|="
                    << r.report.sample_size << " |F|=" << r.report.faraway_size
                    << " |Q|=" << r.report.coreset_size);
    CHECK(static_cast<double>(value) <= 3.1 * static_cast<double>(opt));
    CHECK(r.report.peak_stored <= r.report.space_budget);
    CHECK(r.report.clusterings_seen == m);
  }
}

TEST_CASE("faraway contract on exhaustive tiny instances") {
  const int n = 6;
  const auto fair = ref::fair_partitions(n, ref::as_int(ref::alternating(n)), {1, 1});
  int checked = 0;
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const int m = 3 + static_cast<int>(seed % 4);
    const int k = 1 + static_cast<int>(seed % 2);
    const auto inputs = planted(seed, n, m, k, 0.34);
    fcc::FarawaySampler far(n, m, k, {}, seed);
    for (int i = 0; i < m; ++i) far.update(inputs[i], i);
    std::vector<Clustering> sampled;
    for (const auto& [idx, c] : far.output()) sampled.push_back(c);
    const auto res = ref::check_faraway(inputs, fair, k, sampled, 1.0 / 3.0, 0.5);
    checked += res.super_clusters;
    CHECK(res.violations == 0);
  }
  CHECK(checked > 40);
}

TEST_CASE("faraway contract when the sampler must evict") {
  const int n = 6;
  const auto fair = ref::fair_partitions(n, ref::as_int(ref::alternating(n)), {1, 1});
  int checked = 0;
  int violations = 0;
  std::size_t smallest_output = SIZE_MAX;
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const int m = 20 + static_cast<int>(seed % 11);
    const int k = 1 + static_cast<int>(seed % 2);
    const auto inputs = planted(100 + seed, n, m, k, 0.34);
    fcc::FarawayParams params;
    params.reservoir_size = 2;
    fcc::FarawaySampler far(n, m, k, params, seed);
    for (int i = 0; i < m; ++i) far.update(inputs[i], i);
    std::vector<Clustering> sampled;
    for (const auto& [idx, c] : far.output()) sampled.push_back(c);
    smallest_output = std::min(smallest_output, sampled.size());
    const auto res = ref::check_faraway(inputs, fair, k, sampled, params.kappa, params.rho);
    checked += res.super_clusters;
    violations += res.violations;
  }
  MESSAGE("reservoir 2, m in 20..30: " << violations << "/" << checked
                                       << " violations, smallest |F| " << smallest_output);
  CHECK(violations == 0);
}
