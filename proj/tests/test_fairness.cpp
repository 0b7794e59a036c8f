#include <doctest.h>

#include <random>

#include "fcc/fairness.hpp"
#include "support.hpp"

using fcc::Clustering;

namespace {

// a, c red; b, d blue
const fcc::ColorTable kAbcd(std::vector<fcc::Color>{0, 1, 0, 1}, 2);
const fcc::FairnessConstraint kEven({1, 1});

fcc::ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const fcc::Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return fcc::ErrorKind::Argument;
}

}  // namespace

TEST_CASE("constraint parsing and reduction") {
  const auto p = fcc::FairnessConstraint::parse("2:4");
  CHECK(p.to_string() == "1:2");
  CHECK(p.atom_size() == 3);
  CHECK(fcc::FairnessConstraint::parse("3").to_string() == "1");
  CHECK(kind_of([] { fcc::FairnessConstraint::parse("1:x"); }) == fcc::ErrorKind::MalformedInput);
  CHECK(kind_of([] { fcc::FairnessConstraint::parse("0:1"); }) == fcc::ErrorKind::Argument);
  CHECK(kind_of([] { fcc::FairnessConstraint::parse(""); }) != fcc::ErrorKind::Capability);
}

TEST_CASE("is_fair examples") {
  CHECK(fcc::is_fair(Clustering::from_labels({0, 0, 1, 1}), kAbcd, kEven));
  CHECK_FALSE(fcc::is_fair(Clustering::from_labels({0, 1, 0, 1}), kAbcd, kEven));
  CHECK(fcc::is_fair(Clustering::single_cluster(4), kAbcd, kEven));
}

TEST_CASE("clusters missing a color are unfair unless there is one color") {
  const fcc::ColorTable mono(std::vector<fcc::Color>{0, 0, 0}, 1);
  CHECK(fcc::is_fair(Clustering::singletons(3), mono, fcc::FairnessConstraint({1})));
  const fcc::ColorTable two(std::vector<fcc::Color>{0, 0, 1, 1}, 2);
  CHECK_FALSE(fcc::is_fair(Clustering::from_labels({0, 0, 1, 1}), two, kEven));
}

TEST_CASE("feasibility checks") {
  const fcc::ColorTable odd(std::vector<fcc::Color>{0, 0, 1}, 2);
  CHECK(kind_of([&] { kEven.check_feasible(odd); }) == fcc::ErrorKind::Infeasible);
  CHECK(kind_of([&] {
          fcc::closest_fair(Clustering::singletons(3), odd, kEven, {});
        }) == fcc::ErrorKind::Infeasible);
  const fcc::ColorTable three(std::vector<fcc::Color>{0, 1, 2}, 3);
  CHECK(kind_of([&] { kEven.check_feasible(three); }) == fcc::ErrorKind::Dimension);
}

TEST_CASE("closest_fair examples") {
  const auto fair = Clustering::from_labels({0, 0, 1, 1});
  auto fit = fcc::closest_fair(fair, kAbcd, kEven, {});
  CHECK(fit.clustering == fair);
  CHECK(fit.distance == 0);

  fit = fcc::closest_fair(Clustering::from_labels({0, 1, 2, 2}), kAbcd, kEven, {});
  CHECK(fit.distance == 1);
  CHECK(fit.clustering == fair);

  fit = fcc::closest_fair(Clustering::from_labels({0, 1, 0, 1}), kAbcd, kEven, {});
  CHECK(fit.distance == 4);
  CHECK(fcc::is_fair(fit.clustering, kAbcd, kEven));
}

TEST_CASE("exact backend guard") {
  const fcc::ColorTable big(ref::alternating(14), 2);
  CHECK(kind_of([&] {
          fcc::closest_fair(Clustering::singletons(14), big, kEven, {fcc::FairMode::Exact, 12});
        }) == fcc::ErrorKind::Capability);
  CHECK(fcc::ClosestFairBackend{}.gamma_claim() == 1.0);
  CHECK_FALSE(fcc::ClosestFairBackend{fcc::FairMode::TwoColorRepair}.gamma_claim().has_value());
}

TEST_CASE("two_color_repair examples") {
  const auto fair = Clustering::from_labels({0, 0, 1, 1});
  CHECK(fcc::two_color_repair(fair, kAbcd, kEven) == fair);
  const auto merged = fcc::two_color_repair(Clustering::from_labels({0, 1, 2, 2}), kAbcd, kEven);
  CHECK(merged == fair);
  CHECK(fcc::dist(merged, Clustering::from_labels({0, 1, 2, 2})) == 1);
  const auto paired = fcc::two_color_repair(Clustering::singletons(4), kAbcd, kEven);
  CHECK(fcc::is_fair(paired, kAbcd, kEven));
  CHECK(fcc::dist(paired, Clustering::singletons(4)) == 2);

  const fcc::ColorTable three(std::vector<fcc::Color>{0, 1, 2}, 3);
  CHECK(kind_of([&] {
          fcc::two_color_repair(Clustering::singletons(3), three, fcc::FairnessConstraint({1, 1, 1}));
        }) == fcc::ErrorKind::Capability);
}

TEST_CASE("exact backend matches exhaustive minimum, repair dominated") {
  struct Table {
    std::vector<fcc::Color> colors;
    std::vector<std::uint32_t> ratio;
  };
  const std::vector<Table> tables = {
      {{0, 1, 0, 1, 0, 1}, {1, 1}},
      {{0, 0, 1, 1, 0, 1}, {1, 1}},
      {{0, 1, 1, 0, 1, 1}, {1, 2}},
      {{1, 0, 1, 1, 0, 1}, {1, 2}},
      {{0, 1, 2, 2, 1, 0}, {1, 1, 1}},
  };
  double worst = 1.0;
  for (const auto& t : tables) {
    const int n = static_cast<int>(t.colors.size());
    const fcc::ColorTable colors(t.colors, t.ratio.size());
    const fcc::FairnessConstraint p(t.ratio);
    const auto fair = ref::fair_partitions(n, ref::as_int(t.colors), {t.ratio.begin(), t.ratio.end()});
    for (const auto& c : ref::partitions(n)) {
      std::uint64_t best = UINT64_MAX;
      for (const auto& f : fair) best = std::min(best, ref::pair_dist(c, f));
      const auto fit = fcc::closest_fair(c, colors, p, {});
      REQUIRE(fit.distance == best);
      REQUIRE(ref::pair_dist(c, fit.clustering) == fit.distance);
      REQUIRE(fcc::is_fair(fit.clustering, colors, p));
      if (t.ratio.size() == 2) {
        const auto rep = fcc::closest_fair(c, colors, p, {fcc::FairMode::TwoColorRepair});
        REQUIRE(fcc::is_fair(rep.clustering, colors, p));
        REQUIRE(rep.distance == ref::pair_dist(c, rep.clustering));
        REQUIRE(rep.distance >= best);
        if (best > 0) worst = std::max(worst, double(rep.distance) / double(best));
        if (best == 0) CHECK(rep.distance == 0);
      }
    }
  }
  MESSAGE("empirical repair gamma on n=6 tables: " << worst);
}

TEST_CASE("exact backend on random n=8 inputs") {
  std::mt19937_64 rng(3);
  const auto colors_v = ref::alternating(8);
  const fcc::ColorTable colors(colors_v, 2);
  const auto fair = ref::fair_partitions(8, ref::as_int(colors_v), {1, 1});
  for (int trial = 0; trial < 40; ++trial) {
    const auto c = ref::random_clustering(rng, 8, 1 + trial % 8);
    std::uint64_t best = UINT64_MAX;
    for (const auto& f : fair) best = std::min(best, ref::pair_dist(c, f));
    CHECK(fcc::closest_fair(c, colors, kEven, {}).distance == best);
  }
}

TEST_CASE("repair is always fair on larger inputs") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 100; ++trial) {
    const int atoms = 2 + static_cast<int>(rng() % 20);
    const bool skew = trial % 2 == 1;
    const std::vector<std::uint32_t> ratio = skew ? std::vector<std::uint32_t>{1, 3}
                                                  : std::vector<std::uint32_t>{1, 1};
    const int a = static_cast<int>(ratio[0] + ratio[1]);
    std::vector<fcc::Color> colors_v;
    for (int i = 0; i < atoms; ++i) {
      for (int r = 0; r < a; ++r) colors_v.push_back(r < static_cast<int>(ratio[0]) ? 0 : 1);
    }
    std::shuffle(colors_v.begin(), colors_v.end(), rng);
    const int n = static_cast<int>(colors_v.size());
    const fcc::ColorTable colors(colors_v, 2);
    const fcc::FairnessConstraint p(ratio);
    const auto c = ref::random_clustering(rng, n, 1 + static_cast<int>(rng() % n));
    const auto out = fcc::two_color_repair(c, colors, p);
    CHECK(fcc::is_fair(out, colors, p));
  }
}
