#include <doctest.h>

#include <map>
#include <random>

#include "fcc/clustering.hpp"
#include "support.hpp"

using fcc::Clustering;

namespace {

std::vector<fcc::Label> labels_of(const Clustering& c) { return {c.labels().begin(), c.labels().end()}; }

}  // namespace

TEST_CASE("canonicalize relabels by first occurrence") {
  CHECK(labels_of(Clustering::from_labels({5, 5, 9})) == std::vector<fcc::Label>{0, 0, 1});
  CHECK(labels_of(Clustering::from_labels({0, 1, 2})) == std::vector<fcc::Label>{0, 1, 2});
  CHECK(labels_of(Clustering::from_labels({2, 0, 2, 0})) == std::vector<fcc::Label>{0, 1, 0, 1});
  CHECK(labels_of(fcc::canonicalize(3, {{0, 7}, {1, -1}, {2, 7}})) == std::vector<fcc::Label>{0, 1, 0});
}

TEST_CASE("canonicalize rejects missing and stray ids") {
  try {
    fcc::canonicalize(3, {{0, 1}, {2, 1}});
    FAIL("expected an error");
  } catch (const fcc::Error& e) {
    CHECK(e.kind() == fcc::ErrorKind::MalformedInput);
  }
  CHECK_THROWS_AS(fcc::canonicalize(2, {{0, 1}, {1, 1}, {5, 0}}), fcc::Error);
}

TEST_CASE("dist examples") {
  const auto ab_c = Clustering::from_labels({0, 0, 1});
  const auto abc = Clustering::single_cluster(3);
  const auto sing = Clustering::singletons(3);
  CHECK(fcc::dist(ab_c, ab_c) == 0);
  CHECK(fcc::dist(ab_c, sing) == 1);
  CHECK(fcc::dist(abc, sing) == 3);
  try {
    fcc::dist(abc, Clustering::singletons(4));
    FAIL("expected an error");
  } catch (const fcc::Error& e) {
    CHECK(e.kind() == fcc::ErrorKind::Dimension);
  }
}

TEST_CASE("u_set examples") {
  const auto ref = Clustering::from_labels({0, 0, 1});
  CHECK(fcc::u_set(ref, ref).empty());
  CHECK(fcc::u_set(Clustering::single_cluster(3), ref).pairs() ==
        std::vector<fcc::PointPair>{{0, 2}, {1, 2}});
  CHECK(fcc::u_set(Clustering::singletons(3), ref).pairs() == std::vector<fcc::PointPair>{{0, 1}});
  CHECK_THROWS_AS(fcc::u_set(Clustering::singletons(65), Clustering::singletons(65)), fcc::Error);
}

TEST_CASE("objective examples") {
  const auto c = Clustering::from_labels({0, 1, 0, 1});
  const fcc::InputSet same({c, c, c});
  CHECK(fcc::objective(same, c) == 0);
  const auto abc = Clustering::single_cluster(3);
  const auto sing = Clustering::singletons(3);
  const fcc::InputSet two({abc, sing});
  CHECK(fcc::objective(two, abc) == 3);
  const std::vector<Clustering> both{abc, sing};
  CHECK(fcc::objective(two, both) == 0);
  CHECK_THROWS_AS(fcc::objective(two, std::span<const Clustering>{}), fcc::Error);
  const std::vector<fcc::WeightedClustering> weighted{{abc, 2.5}, {sing, 0.5}};
  CHECK(fcc::objective(weighted, std::vector<Clustering>{abc}) == doctest::Approx(1.5));
}

TEST_CASE("InputSet validation") {
  CHECK_THROWS_AS(fcc::InputSet(std::vector<Clustering>{}), fcc::Error);
  CHECK_THROWS_AS(fcc::InputSet({Clustering::singletons(2), Clustering::singletons(3)}), fcc::Error);
}

TEST_CASE("from_groups round trip") {
  const auto c = Clustering::from_groups(5, {{3, 1}, {0}, {4, 2}});
  CHECK(labels_of(c) == std::vector<fcc::Label>{0, 1, 2, 1, 2});
  CHECK(c.groups() == std::vector<std::vector<fcc::PointId>>{{0}, {1, 3}, {2, 4}});
  CHECK_THROWS_AS(Clustering::from_groups(3, {{0, 1}}), fcc::Error);
  CHECK_THROWS_AS(Clustering::from_groups(2, {{0, 1}, {1}}), fcc::Error);
}

TEST_CASE("metric properties against pair enumeration") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 50);
    const int labels = 1 + static_cast<int>(rng() % n);
    const auto a = ref::random_clustering(rng, n, labels);
    const auto b = ref::random_clustering(rng, n, 1 + static_cast<int>(rng() % n));
    const auto c = ref::random_clustering(rng, n, 1 + static_cast<int>(rng() % n));
    REQUIRE(fcc::dist(a, b) == ref::pair_dist(a, b));
    CHECK(fcc::dist(a, b) == fcc::dist(b, a));
    CHECK(fcc::dist(a, c) <= fcc::dist(a, b) + fcc::dist(b, c));
    CHECK((fcc::dist(a, b) == 0) == (a == b));
    CHECK(a.together_pairs() == ref::pair_dist(a, Clustering::singletons(n)));
  }
}

TEST_CASE("large label counts use the sparse table") {
  std::mt19937_64 rng(5);
  const int n = 2000;
  const auto a = ref::random_clustering(rng, n, 1500);
  const auto b = ref::random_clustering(rng, n, 1700);
  CHECK(fcc::dist(a, b) == ref::pair_dist(a, b));
}

TEST_CASE("U-set identity") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 19);
    const auto ci = ref::random_clustering(rng, n, 1 + static_cast<int>(rng() % n));
    const auto cj = ref::random_clustering(rng, n, 1 + static_cast<int>(rng() % n));
    const auto r = ref::random_clustering(rng, n, 1 + static_cast<int>(rng() % n));
    const auto ui = fcc::u_set(ci, r);
    const auto uj = fcc::u_set(cj, r);
    CHECK(ui.size() == fcc::dist(ci, r));
    CHECK(fcc::dist(ci, cj) == ui.size() + uj.size() - 2 * ui.intersect(uj).size());
  }
}
