#include "fixtures.hpp"
#include "infa/synthesis.hpp"

#include <gtest/gtest.h>

using namespace infa;

namespace {

Nearest scan(const VectorRef& x, const LabeledDataset& train, Metric metric) {
  Nearest best;
  for (std::size_t j = 0; j < train.size(); ++j) {
    double d = 0.0;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      double diff = std::fabs(x[i] - train.features(i, static_cast<Eigen::Index>(j)));
      d += metric == Metric::Hamming ? (diff > 0 ? 1.0 : 0.0) : diff;
    }
    if (d < best.distance) best = {d, j};
  }
  return best;
}

}  // namespace

TEST(FlipBits, ChangesExactlyD) {
  Rng rng(41);
  Vector x = Vector::Zero(50);
  for (std::size_t d : {0u, 1u, 7u, 50u}) {
    Vector y = flip_bits(x, d, rng);
    EXPECT_EQ(distance(x, y, Metric::Hamming), static_cast<double>(d));
  }
  EXPECT_THROW(flip_bits(x, 51, rng), std::invalid_argument);
}

TEST(PerturbManhattan, MovesByAmountUnlessClipped) {
  Rng rng(42);
  Vector x = Vector::Zero(20);
  for (int t = 0; t < 200; ++t) {
    Vector y = perturb_manhattan(x, 0.05, rng);
    EXPECT_NEAR(distance(x, y, Metric::Manhattan), 0.05, 1e-12);
  }
  Vector edge = Vector::Ones(3);
  for (int t = 0; t < 200; ++t) {
    Vector y = perturb_manhattan(edge, 2.5, rng);
    EXPECT_LE(distance(edge, y, Metric::Manhattan), 2.5 + 1e-12);
    EXPECT_TRUE(FeatureDomain::continuous(3).contains(y));
  }
  EXPECT_THROW(perturb_manhattan(x, 0.0, rng), std::invalid_argument);
}

TEST(BinarySynthesis, StoredDistancesMatchExhaustiveScan) {
  auto train = fixtures::random_binary(40, 60, 3, 43);
  NonMemberFilter filter(train, Metric::Hamming);
  SynthesisOptions opts;
  opts.strict = false;
  std::vector<std::size_t> distances{1, 2, 5, 10, 20, 40};
  for (std::size_t b = 0; b < 10; ++b) {
    auto out = synthesize_nonmembers_binary(train.record(b), train.labels[b], filter, distances, opts, b);
    for (const auto& s : out) {
      Nearest n = scan(s.x, train, Metric::Hamming);
      ASSERT_EQ(s.distance, n.distance);
      ASSERT_EQ(s.nearest, n.index);
      ASSERT_GT(s.distance, 0.0);
      ASSERT_LE(s.distance, s.target);
      ASSERT_EQ(train.labels[s.nearest], s.label);
      ASSERT_EQ(distance(s.x, train.record(b), Metric::Hamming), s.target);
    }
  }
}

TEST(BinarySynthesis, DistanceOneGivesPerDistanceVectors) {
  auto train = fixtures::random_binary(30, 20, 2, 44);
  NonMemberFilter filter(train, Metric::Hamming);
  SynthesisOptions opts;
  std::size_t d1[] = {1};
  auto out = synthesize_nonmembers_binary(train.record(0), train.labels[0], filter, d1, opts, 1);
  ASSERT_EQ(out.size(), 5u);
  for (const auto& s : out) EXPECT_EQ(s.distance, 1.0);
}

TEST(BinarySynthesis, FullFlipIsTheComplement) {
  auto train = fixtures::random_binary(16, 10, 2, 45);
  NonMemberFilter filter(train, Metric::Hamming);
  SynthesisOptions opts;
  opts.per_distance = 1;
  opts.same_label_neighbor = false;
  std::size_t dm[] = {16};
  auto out = synthesize_nonmembers_binary(train.record(3), train.labels[3], filter, dm, opts, 2);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].x, (Vector::Ones(16) - Vector(train.record(3))).eval());
  EXPECT_EQ(out[0].distance, scan(out[0].x, train, Metric::Hamming).distance);
}

TEST(BinarySynthesis, InvalidRequestsRejected) {
  auto train = fixtures::random_binary(10, 10, 2, 46);
  NonMemberFilter filter(train, Metric::Hamming);
  SynthesisOptions opts;
  std::size_t zero[] = {0}, big[] = {11}, one[] = {1};
  EXPECT_THROW(synthesize_nonmembers_binary(train.record(0), 0, filter, zero, opts, 1), std::invalid_argument);
  EXPECT_THROW(synthesize_nonmembers_binary(train.record(0), 0, filter, big, opts, 1), std::invalid_argument);
  Vector outsider = Vector::Constant(10, 0.0);
  if (scan(outsider, train, Metric::Hamming).distance > 0)
    EXPECT_THROW(synthesize_nonmembers_binary(outsider, 0, filter, one, opts, 1), std::invalid_argument);
}

TEST(BinarySynthesis, StrictModeReportsShortGroups) {
  // Two-point training set with different labels at distance 1: every
  // single flip of x0 that lands nearer x1 fails the label rule.
  LabeledDataset train;
  train.domain = FeatureDomain::binary(1);
  train.features = Matrix(1, 2);
  train.features << 0, 1;
  train.labels = {0, 1};
  train.classes = 2;
  NonMemberFilter filter(train, Metric::Hamming);
  SynthesisOptions opts;
  std::size_t one[] = {1};
  EXPECT_THROW(synthesize_nonmembers_binary(train.record(0), 0, filter, one, opts, 1), Error);
  opts.strict = false;
  EXPECT_TRUE(synthesize_nonmembers_binary(train.record(0), 0, filter, one, opts, 1).empty());
}

TEST(BinarySynthesis, DeterministicGivenSeed) {
  auto train = fixtures::random_binary(30, 30, 3, 47);
  NonMemberFilter filter(train, Metric::Hamming);
  SynthesisOptions opts;
  opts.strict = false;
  std::size_t ds[] = {2, 4, 8};
  auto a = synthesize_nonmembers_binary(train.record(1), train.labels[1], filter, ds, opts, 9);
  auto b = synthesize_nonmembers_binary(train.record(1), train.labels[1], filter, ds, opts, 9);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].x, b[i].x);
}

TEST(ContinuousSynthesis, GroupCountAndDistances) {
  EXPECT_EQ(continuous_group_count(5.0, 0.05), 100u);
  EXPECT_EQ(continuous_group_count(0.05, 0.05), 1u);
  auto train = fixtures::random_continuous(6, 40, 2, 48);
  NonMemberFilter filter(train, Metric::Manhattan);
  SynthesisOptions opts;
  opts.strict = false;
  auto out = synthesize_nonmembers_continuous(train.record(0), train.labels[0], filter, 0.5, 0.05, opts, 3);
  ASSERT_FALSE(out.empty());
  for (const auto& s : out) {
    Nearest n = scan(s.x, train, Metric::Manhattan);
    EXPECT_NEAR(s.distance, n.distance, 1e-12);
    EXPECT_GT(s.distance, 0.0);
    EXPECT_LE(s.distance, s.target + 1e-12);
    EXPECT_TRUE(train.domain.contains(s.x));
  }
  auto first = synthesize_nonmembers_continuous(train.record(0), train.labels[0], filter, 0.05, 0.05, opts, 3);
  for (const auto& s : first) {
    EXPECT_GT(s.distance, 0.0);
    EXPECT_LE(s.distance, 0.05 + 1e-12);
  }
}

TEST(Samplers, SyntheticNeighborIsCloseNonMember) {
  auto train = fixtures::random_binary(30, 40, 2, 49);
  SyntheticNeighborSampler sampler(train, Metric::Hamming);
  Rng rng(1);
  for (int t = 0; t < 100; ++t) {
    const std::size_t i = static_cast<std::size_t>(t) % train.size();
    for (double r : {1.0, 3.0, 10.0}) {
      Neighbor n = sampler.sample(train.record(i), train.labels[i], r, rng);
      EXPECT_LE(distance(n.x, train.record(i), Metric::Hamming), r);
      EXPECT_GT(scan(n.x, train, Metric::Hamming).distance, 0.0);
      EXPECT_EQ(n.label, train.labels[i]);
    }
  }
  EXPECT_THROW(sampler.sample(train.record(0), train.labels[0], 0.5, rng), std::invalid_argument);
}

TEST(Samplers, InducedNeighborComesFromTheBall) {
  auto all = fixtures::random_binary(12, 400, 2, 50);
  auto train = all.slice(0, 100), population = all.slice(100, 300);
  InducedNeighborSampler sampler(population, train, Metric::Hamming);
  Rng rng(2);
  std::size_t from_population = 0;
  for (std::size_t i = 0; i < 50; ++i) {
    const double r = 3.0;
    Neighbor n = sampler.sample(train.record(i), train.labels[i], r, rng);
    EXPECT_LE(distance(n.x, train.record(i), Metric::Hamming), r);
    EXPECT_GT(scan(n.x, train, Metric::Hamming).distance, 0.0);
    if (sampler.ball_has_population(train.record(i), r)) {
      bool found = false;
      for (std::size_t j = 0; j < population.size() && !found; ++j)
        found = population.record(j) == n.x && population.labels[j] == n.label;
      EXPECT_TRUE(found);
      ++from_population;
    }
  }
  EXPECT_GT(from_population, 0u);
}
