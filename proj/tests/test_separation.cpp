#include "fixtures.hpp"
#include "infa/separation.hpp"

#include <gtest/gtest.h>

#include <set>

using namespace infa;

namespace {

std::size_t hamming(const VectorRef& a, const VectorRef& b) {
  return static_cast<std::size_t>((a - b).cwiseAbs().sum());
}

std::vector<double> key(const VectorRef& x) { return {x.data(), x.data() + x.size()}; }

}  // namespace

TEST(SpreadCode, ExhaustiveCheckOnDefaultSize) {
  auto code = sample_spread_codewords(64, 500, 1, 4, 71);
  ASSERT_EQ(code.size(), 1000u);
  auto chk = verify_spread_code(code);
  EXPECT_GT(chk.min_codeword_distance, 3u);
  EXPECT_EQ(chk.max_partner_distance, 1u);
  EXPECT_TRUE(chk.unique_neighbors);
  // Independent pairwise recount.
  for (std::size_t a = 0; a < 500; a += 7)
    for (std::size_t b = a + 1; b < 500; b += 11)
      ASSERT_GT(hamming(code.points.col(static_cast<Eigen::Index>(a)), code.points.col(static_cast<Eigen::Index>(b))), 3u);
  for (std::size_t i = 0; i < 500; ++i) {
    EXPECT_EQ(code.partner_of(i), i + 500);
    EXPECT_EQ(code.partner_of(i + 500), i);
    EXPECT_EQ(code.label_of(i), code.label_of(i + 500));
    EXPECT_GE(code.labels[i], 0);
    EXPECT_LT(code.labels[i], 4);
  }
}

TEST(SpreadCode, LargerRadius) {
  auto code = sample_spread_codewords(100, 50, 4, 3, 72);
  auto chk = verify_spread_code(code);
  EXPECT_GT(chk.min_codeword_distance, 12u);
  EXPECT_GE(chk.max_partner_distance, 1u);
  EXPECT_LE(chk.max_partner_distance, 4u);
  EXPECT_TRUE(chk.unique_neighbors);
}

TEST(SpreadCode, SingleCodewordAndInvalidParameters) {
  auto one = sample_spread_codewords(3, 1, 1, 2, 73);
  EXPECT_EQ(one.size(), 2u);
  EXPECT_EQ(verify_spread_code(one).min_codeword_distance, 3u);
  EXPECT_THROW(sample_spread_codewords(6, 2, 2, 2, 1), Error);
  EXPECT_THROW(sample_spread_codewords(64, 0, 1, 2, 1), std::invalid_argument);
  EXPECT_THROW(sample_spread_codewords(64, 10, 0, 2, 1), std::invalid_argument);
  EXPECT_THROW(sample_spread_codewords(64, 10, 1, 1, 1), std::invalid_argument);
  EXPECT_THROW(sample_spread_codewords(10, 1000, 3, 2, 1, 50), Error);
}

TEST(BallClassifier, RuleAndFallback) {
  auto code = sample_spread_codewords(64, 200, 1, 4, 74);
  BallClassifier h(code, {3, 250}, 0);
  EXPECT_EQ(h.predict(code.points.col(3)), code.label_of(3));
  EXPECT_EQ(h.predict(code.points.col(203)), code.label_of(3));
  EXPECT_EQ(h.predict(code.points.col(50)), code.label_of(50));
  EXPECT_EQ(h.predict(code.points.col(250)), code.label_of(50));
  for (std::size_t p : {1u, 77u, 199u, 301u}) EXPECT_EQ(h.predict(code.points.col(static_cast<Eigen::Index>(p))), 0);
  BallClassifier h2(code, {3}, 2);
  EXPECT_EQ(h2.predict(code.points.col(4)), 2);
  EXPECT_THROW(build_ball_classifier(code, 0, 1), std::invalid_argument);
  EXPECT_THROW(build_ball_classifier(code, 401, 1), std::invalid_argument);
}

TEST(Theorem1, SeparationForFourAndTwoLabels) {
  for (std::size_t k : {4u, 2u}) {
    auto code = sample_spread_codewords(64, 500, 1, k, 75 + k);
    const std::size_t trials = 20000;
    auto r = theorem1_experiment(code, 100, trials, 9);
    const double tol = 4.0 / std::sqrt(static_cast<double>(trials));
    EXPECT_EQ(r.smi_advantage, 0.0);
    EXPECT_NEAR(r.bound, 0.5 * (k - 1.0) / k, 1e-15);
    EXPECT_GE(r.mi_advantage, r.bound - tol) << k;
    EXPECT_NEAR(r.mi_advantage, r.expected_mi, 0.05) << k;
    // Exact value for this code and dataset: members always say 1; a
    // uniform point of S says 1 when its pair was drawn or its label is 0.
    BallClassifier h = build_ball_classifier(code, 100, 9);
    std::vector<char> hit(code.n_codewords, 0);
    for (std::size_t p : h.members()) hit[p % code.n_codewords] = 1;
    double says_member = 0.0;
    for (std::size_t p = 0; p < code.size(); ++p)
      says_member += hit[p % code.n_codewords] || code.label_of(p) == 0 ? 1.0 : 0.0;
    EXPECT_NEAR(r.mi_advantage, 1.0 - says_member / static_cast<double>(code.size()), tol) << k;
  }
}

TEST(Theorem1, Deterministic) {
  auto code = sample_spread_codewords(64, 100, 1, 4, 80);
  auto a = theorem1_experiment(code, 30, 500, 3), b = theorem1_experiment(code, 30, 500, 3);
  EXPECT_EQ(a.mi_advantage, b.mi_advantage);
  EXPECT_THROW(theorem1_experiment(code, 30, 0, 3), std::invalid_argument);
}

TEST(Reduction, NeverAnswersMemberOnMismatch) {
  auto train = fixtures::random_binary(20, 50, 2, 81);
  Rng coins(1);
  Vector last;
  // Fills the masked entry at random and remembers its guess.
  SmiFromAi smi([&](const Portion& p, int) {
    Vector v = p.values();
    for (std::size_t i : p.unknown()) v[static_cast<Eigen::Index>(i)] = coin(coins) ? 1.0 : 0.0;
    last = v;
    return v;
  });
  std::size_t ones = 0;
  for (std::size_t t = 0; t < 1000; ++t) {
    Vector x = train.record(t % train.size());
    const int d = smi.decide(x, train.labels[t % train.size()], t % 20);
    EXPECT_EQ(d == 1, last == x);
    ones += static_cast<std::size_t>(d);
  }
  EXPECT_GT(ones, 0u);
  EXPECT_LT(ones, 1000u);
  SmiFromAi wrong_size([](const Portion&, int) { return Vector::Zero(3).eval(); });
  EXPECT_EQ(wrong_size.decide(train.record(0), 0, 0), 0);
  EXPECT_THROW(SmiFromAi(AiAdversary{}), std::invalid_argument);
}

TEST(Reduction, PerfectAiAdversaryGivesFullAdvantage) {
  auto train = fixtures::random_binary(24, 80, 2, 82);
  std::set<std::vector<double>> members;
  for (std::size_t i = 0; i < train.size(); ++i) members.insert(key(train.record(i)));
  // Completes to a training vector when one is consistent, otherwise abstains.
  auto oracle = [&](const Portion& p, int) -> Vector {
    auto set = enumerate_siblings(p, DomainKind::Binary, 2);
    for (std::size_t c = 0; c < set.size(); ++c) {
      Vector v = set.materialize(c);
      if (members.count(key(v))) return v;
    }
    return Vector();
  };
  SyntheticNeighborSampler sampler(train, Metric::Hamming);
  auto smi = smi_from_ai_reduction(oracle);
  EXPECT_EQ(reduction_smi_advantage(smi, train, sampler, 3.0, 2000, 5), 1.0);
}

TEST(Reduction, ZeroCompletionHasNoAdvantage) {
  auto train = fixtures::random_binary(24, 200, 2, 83);
  SmiFromAi zeros([](const Portion& p, int) {
    Vector v = p.values();
    for (std::size_t i : p.unknown()) v[static_cast<Eigen::Index>(i)] = 0.0;
    return v;
  });
  SyntheticNeighborSampler sampler(train, Metric::Hamming);
  const std::size_t trials = 4000;
  const double adv = reduction_smi_advantage(zeros, train, sampler, 2.0, trials, 6);
  EXPECT_LE(std::fabs(adv), 4.0 / std::sqrt(static_cast<double>(trials)));
}

TEST(Reduction, ScorerAdversaryOnOverfitModel) {
  const auto& f = fixtures::overfit();
  ConfidenceScorer conf;
  auto ai = make_ai_adversary(f.model, conf, DomainKind::Binary);
  Vector guess = ai(make_portion(f.train.record(0), {5}), f.train.labels[0]);
  EXPECT_TRUE(make_portion(f.train.record(0), {5}).consistent_with(guess));
  SyntheticNeighborSampler sampler(f.train, Metric::Hamming);
  auto smi = smi_from_ai_reduction(ai);
  const double a = reduction_smi_advantage(smi, f.train, sampler, 1.0, 300, 7);
  EXPECT_EQ(a, reduction_smi_advantage(smi, f.train, sampler, 1.0, 300, 7));
  EXPECT_GE(a, -1.0);
  EXPECT_LE(a, 1.0);
}

namespace {

class LinearScore : public MembershipScorer {
 public:
  explicit LinearScore(Vector w) : w_(std::move(w)) {}
  std::string name() const override { return "linear"; }
  Vector score_columns(const TrainedModel&, const Matrix& x, std::span<const int>) const override {
    return (w_.transpose() * x).transpose();
  }

 private:
  Vector w_;
};

}  // namespace

TEST(Reduction, ExhaustiveOnThreeBits) {
  Vector w(3);
  w << 0.7, -1.2, 0.4;
  LinearScore scorer(w);
  TrainedModel unused;
  auto smi = smi_from_ai_reduction(make_ai_adversary(unused, scorer, DomainKind::Binary));
  for (int bits = 0; bits < 8; ++bits) {
    Vector x(3);
    for (int i = 0; i < 3; ++i) x[i] = (bits >> i) & 1;
    for (std::size_t i = 0; i < 3; ++i) {
      // The adversary keeps the bit that raises w.x; the guess is x iff x already has it.
      const bool keeps = w[static_cast<Eigen::Index>(i)] > 0 ? x[static_cast<Eigen::Index>(i)] == 1.0
                                                             : x[static_cast<Eigen::Index>(i)] == 0.0;
      EXPECT_EQ(smi.decide(x, 0, i), keeps ? 1 : 0) << bits << " " << i;
    }
  }
}
