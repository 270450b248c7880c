#include "infa/metricspace.hpp"

#include <gtest/gtest.h>

#include <set>

using namespace infa;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector x(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double d : v) x[i++] = d;
  return x;
}

Vector random_point(Rng& rng, const FeatureDomain& dom) {
  Vector x(static_cast<Eigen::Index>(dom.dimension));
  for (Eigen::Index i = 0; i < x.size(); ++i)
    x[i] = dom.kind == DomainKind::Binary ? static_cast<double>(coin(rng)) : uniform_real(rng, -1.0, 1.0);
  return x;
}

// Hand-rolled per-metric distances, independent of the library loop.
double oracle_distance(const Vector& x, const Vector& y, Metric m) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    double d = std::fabs(x[i] - y[i]);
    if (m == Metric::Hamming) acc += d > 0 ? 1.0 : 0.0;
    if (m == Metric::Manhattan) acc += d;
    if (m == Metric::Euclidean) acc += d * d;
  }
  return m == Metric::Euclidean ? std::sqrt(acc) : acc;
}

}  // namespace

TEST(Distance, SmallCases) {
  EXPECT_EQ(distance(vec({0, 0, 0}), vec({0, 0, 0}), Metric::Hamming), 0.0);
  EXPECT_EQ(distance(vec({0, 1, 0, 1}), vec({1, 1, 0, 0}), Metric::Hamming), 2.0);
  EXPECT_EQ(distance(vec({0.5, -0.5}), vec({-0.5, 0.5}), Metric::Manhattan), 2.0);
  EXPECT_DOUBLE_EQ(distance(vec({0, 0}), vec({3, 4}), Metric::Euclidean), 5.0);
}

TEST(Distance, DimensionMismatchRejected) {
  EXPECT_THROW(distance(vec({0, 1}), vec({0, 1, 1}), Metric::Hamming), std::invalid_argument);
}

TEST(Distance, HammingOnContinuousDomainRejected) {
  EXPECT_FALSE(compatible(Metric::Hamming, FeatureDomain::continuous(3)));
  EXPECT_THROW(check_compatible(Metric::Hamming, FeatureDomain::continuous(3)), std::invalid_argument);
  EXPECT_FALSE(compatible(Metric::Manhattan, FeatureDomain::binary(3)));
  EXPECT_TRUE(compatible(Metric::Euclidean, FeatureDomain::continuous(3)));
}

TEST(Distance, MetricNamesRoundTrip) {
  for (Metric m : {Metric::Hamming, Metric::Manhattan, Metric::Euclidean})
    EXPECT_EQ(parse_metric(to_string(m)), m);
  EXPECT_THROW(parse_metric("cosine"), std::invalid_argument);
}

TEST(Distance, MetricAxiomsOnRandomTriples) {
  Rng rng(1);
  const std::vector<std::pair<Metric, FeatureDomain>> cases{{Metric::Hamming, FeatureDomain::binary(12)},
                                                            {Metric::Manhattan, FeatureDomain::continuous(7)},
                                                            {Metric::Euclidean, FeatureDomain::continuous(7)}};
  for (const auto& [metric, dom] : cases) {
    for (int t = 0; t < 10000; ++t) {
      Vector x = random_point(rng, dom), y = random_point(rng, dom), z = random_point(rng, dom);
      ASSERT_EQ(distance(x, x, metric), 0.0);
      ASSERT_EQ(distance(x, y, metric), distance(y, x, metric));
      ASSERT_LE(distance(x, z, metric), distance(x, y, metric) + distance(y, z, metric) + 1e-12);
      ASSERT_NEAR(distance(x, y, metric), oracle_distance(x, y, metric), 1e-12);
    }
  }
}

TEST(Distance, ConservingSandwich) {
  Rng rng(2);
  auto dom = FeatureDomain::continuous(9);
  for (int t = 0; t < 10000; ++t) {
    Vector x = random_point(rng, dom), y = random_point(rng, dom);
    const double lo = chebyshev(x, y), hi = distance(x, y, Metric::Manhattan);
    for (Metric m : {Metric::Manhattan, Metric::Euclidean}) {
      ASSERT_LE(lo, distance(x, y, m) + 1e-15);
      ASSERT_LE(distance(x, y, m), hi + 1e-15);
    }
  }
}

TEST(DistanceToSet, MemberHasDistanceZero) {
  Matrix set(3, 4);
  set << 0, 1, 1, 0, 0, 0, 1, 1, 1, 1, 0, 0;
  for (Eigen::Index j = 0; j < set.cols(); ++j) {
    Nearest n = distance_to_set(set.col(j), set, Metric::Hamming);
    EXPECT_EQ(n.distance, 0.0);
    EXPECT_EQ(n.index, static_cast<std::size_t>(j));
  }
}

TEST(DistanceToSet, TiesGoToLowestIndex) {
  Matrix set(2, 3);
  set << 1, 0, 1, 0, 1, 1;
  Nearest n = distance_to_set(vec({0, 0}), set, Metric::Hamming);
  EXPECT_EQ(n.distance, 1.0);
  EXPECT_EQ(n.index, 0u);
}

TEST(DistanceToSet, HammingThreeAwayMatchesScan) {
  Rng rng(3);
  auto dom = FeatureDomain::binary(20);
  Matrix set(20, 5);
  for (int j = 0; j < 5; ++j) set.col(j) = random_point(rng, dom);
  Vector x = set.col(2);
  for (int i : {0, 7, 13}) x[i] = 1.0 - x[i];
  Nearest n = distance_to_set(x, set, Metric::Hamming);
  double best = 1e9;
  std::size_t arg = 0;
  for (int j = 0; j < 5; ++j) {
    double d = oracle_distance(x, set.col(j), Metric::Hamming);
    if (d < best) best = d, arg = static_cast<std::size_t>(j);
  }
  EXPECT_EQ(n.distance, best);
  EXPECT_EQ(n.index, arg);
  EXPECT_LE(n.distance, 3.0);
}

TEST(NearestNeighborIndex, MatchesDistanceToSet) {
  Rng rng(4);
  for (auto [metric, dom] : std::vector<std::pair<Metric, FeatureDomain>>{
           {Metric::Hamming, FeatureDomain::binary(70)},
           {Metric::Manhattan, FeatureDomain::continuous(6)},
           {Metric::Euclidean, FeatureDomain::continuous(6)}}) {
    Matrix set(static_cast<Eigen::Index>(dom.dimension), 60);
    for (int j = 0; j < 60; ++j) set.col(j) = random_point(rng, dom);
    set.col(41) = set.col(7);  // duplicate to exercise ties
    NearestNeighborIndex index(set, metric);
    for (int t = 0; t < 200; ++t) {
      Vector x = t % 10 == 0 ? Vector(set.col(41)) : random_point(rng, dom);
      Nearest a = index.nearest(x), b = distance_to_set(x, set, metric);
      ASSERT_EQ(a.distance, b.distance);
      ASSERT_EQ(a.index, b.index);
      const double r = a.distance + 1.0;
      std::vector<std::size_t> expect;
      for (int j = 0; j < 60; ++j)
        if (distance(x, set.col(j), metric) <= r) expect.push_back(static_cast<std::size_t>(j));
      ASSERT_EQ(index.within(x, r), expect);
    }
  }
}

TEST(Portion, MasksRequestedEntries) {
  Portion p = make_portion(vec({1, 0, 1}), {1});
  EXPECT_TRUE(p.is_masked(1));
  EXPECT_FALSE(p.is_masked(0));
  EXPECT_EQ(p.values()[0], 1.0);
  EXPECT_EQ(p.values()[2], 1.0);

  Portion q = make_portion(vec({0.2, -0.7}), {0});
  EXPECT_TRUE(q.is_masked(0));
  EXPECT_EQ(q.values()[1], -0.7);

  Portion r = make_portion(vec({1, 0, 1}), {2, 0});
  EXPECT_TRUE(r.is_masked(0));
  EXPECT_TRUE(r.is_masked(2));
  EXPECT_EQ(r.values()[1], 0.0);
  EXPECT_EQ(r.unknown(), (std::vector<std::size_t>{0, 2}));
}

TEST(Portion, InvalidUnknownSetsRejected) {
  EXPECT_THROW(make_portion(vec({1, 0, 1}), {}), std::invalid_argument);
  EXPECT_THROW(make_portion(vec({1, 0, 1}), {3}), std::invalid_argument);
  EXPECT_THROW(make_portion(vec({1, 0, 1}), {1, 1}), std::invalid_argument);
  EXPECT_THROW(make_portion(vec({1, 0, 1}), {0, 1, 2}), std::invalid_argument);
}

TEST(Siblings, BinaryTwoUnknownsGiveFourCompletions) {
  Portion p = make_portion(vec({1, 0, 1, 1}), {1, 3});
  SiblingSet s = enumerate_siblings(p, DomainKind::Binary, 2);
  ASSERT_EQ(s.size(), 4u);
  std::set<std::pair<double, double>> seen;
  for (std::size_t c = 0; c < s.size(); ++c) {
    Vector x = s.materialize(c);
    EXPECT_EQ(x[0], 1.0);
    EXPECT_EQ(x[2], 1.0);
    seen.insert({x[1], x[3]});
    EXPECT_EQ(s.index_of(x), c);
  }
  EXPECT_EQ(seen.size(), 4u);
}

TEST(Siblings, BinaryFifteenUnknowns) {
  Rng rng(5);
  Vector x = random_point(rng, FeatureDomain::binary(40));
  std::vector<std::size_t> unknown;
  for (std::size_t i = 0; i < 15; ++i) unknown.push_back(2 * i + 1);
  SiblingSet s = enumerate_siblings(make_portion(x, unknown), DomainKind::Binary, 2);
  EXPECT_EQ(s.size(), 32768u);
  auto own = s.index_of(x);
  ASSERT_TRUE(own.has_value());
  EXPECT_EQ(s.materialize(*own), x);
}

TEST(Siblings, ContinuousFiveUnknownsTenBins) {
  Vector x = Vector::Constant(8, 0.3);
  SiblingSet s = enumerate_siblings(make_portion(x, {0, 1, 2, 3, 4}), DomainKind::Continuous, 10);
  EXPECT_EQ(s.size(), 100000u);
  auto reps = bin_representatives(10, DomainKind::Continuous);
  EXPECT_DOUBLE_EQ(reps.front(), -0.9);
  EXPECT_DOUBLE_EQ(reps.back(), 0.9);
}

TEST(Siblings, CapIsEnforced) {
  Vector x = Vector::Zero(30);
  std::vector<std::size_t> unknown(21);
  std::iota(unknown.begin(), unknown.end(), 0);
  EXPECT_THROW(enumerate_siblings(make_portion(x, unknown), DomainKind::Binary, 2), Error);
  EXPECT_NO_THROW(enumerate_siblings(make_portion(x, {0, 1, 2}), DomainKind::Binary, 2, 8));
  EXPECT_THROW(enumerate_siblings(make_portion(x, {0, 1, 2}), DomainKind::Binary, 2, 7), Error);
}

TEST(Siblings, CardinalityIsBinsToTheUnknowns) {
  Vector x = Vector::Constant(6, -0.25);
  for (std::size_t bins = 2; bins <= 5; ++bins)
    for (std::size_t s = 1; s <= 4; ++s) {
      std::vector<std::size_t> unknown(s);
      std::iota(unknown.begin(), unknown.end(), 0);
      auto set = enumerate_siblings(make_portion(x, unknown), DomainKind::Continuous, bins);
      std::size_t expect = 1;
      for (std::size_t j = 0; j < s; ++j) expect *= bins;
      EXPECT_EQ(set.size(), expect);
    }
}

TEST(Siblings, CandidateDistanceMatchesMaterialized) {
  Rng rng(6);
  auto dom = FeatureDomain::continuous(7);
  Vector x = random_point(rng, dom);
  auto set = enumerate_siblings(make_portion(x, {1, 4, 5}), DomainKind::Continuous, 4);
  for (std::size_t c = 0; c < set.size(); ++c)
    for (Metric m : {Metric::Manhattan, Metric::Euclidean})
      EXPECT_NEAR(set.distance_to(c, x, m), distance(set.materialize(c), x, m), 1e-12);
}

TEST(Radius, ValuesPerMetric) {
  EXPECT_EQ(radius_for_unknowns(Metric::Hamming, 15), 15.0);
  EXPECT_EQ(radius_for_unknowns(Metric::Manhattan, 5), 10.0);
  EXPECT_EQ(radius_for_unknowns(Metric::Euclidean, 1), 2.0);
}

TEST(Radius, SiblingsStayInsideTheBall) {
  Rng rng(7);
  for (Metric metric : {Metric::Hamming, Metric::Manhattan, Metric::Euclidean}) {
    const bool binary = metric == Metric::Hamming;
    auto dom = binary ? FeatureDomain::binary(10) : FeatureDomain::continuous(10);
    for (int t = 0; t < 100; ++t) {
      Vector x = random_point(rng, dom);
      const std::size_t s = 1 + uniform_index(rng, binary ? 9 : 4);
      auto unknown = sample_without_replacement(rng, 10, s);
      auto set = enumerate_siblings(make_portion(x, unknown), dom.kind, binary ? 2 : 5);
      const double r = radius_for_unknowns(metric, s);
      for (std::size_t c = 0; c < set.size(); ++c) ASSERT_LE(distance(set.materialize(c), x, metric), r);
    }
  }
}

TEST(RandomGuess, ExpectedDistances) {
  EXPECT_NEAR(expected_random_guess_distance(Metric::Manhattan, 5), 10.0 / 3.0, 1e-12);
  EXPECT_EQ(expected_random_guess_distance(Metric::Hamming, 15), 7.5);
  EXPECT_NEAR(expected_random_guess_distance(Metric::Manhattan, 1), 2.0 / 3.0, 1e-12);
}

TEST(RandomGuess, MonteCarloConverges) {
  Rng rng(8);
  for (std::size_t mp : {1u, 5u}) {
    double acc = 0.0;
    const int n = 1000000;
    for (int t = 0; t < n; ++t)
      for (std::size_t i = 0; i < mp; ++i) acc += std::fabs(uniform_real(rng, -1, 1) - uniform_real(rng, -1, 1));
    const double expect = expected_random_guess_distance(Metric::Manhattan, mp);
    EXPECT_NEAR(acc / n, expect, 0.01 * expect);
  }
}
