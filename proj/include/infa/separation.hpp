#pragma once

#include "infa/experiments.hpp"

#include <functional>

namespace infa {

namespace detail {

inline std::size_t words_for(std::size_t m) { return (m + 63) / 64; }

inline std::size_t packed_hamming(const std::uint64_t* a, const std::uint64_t* b, std::size_t words) {
  std::size_t c = 0;
  for (std::size_t w = 0; w < words; ++w) c += static_cast<std::size_t>(std::popcount(a[w] ^ b[w]));
  return c;
}

inline void pack_bits(const VectorRef& x, std::uint64_t* out, std::size_t words) {
  std::fill(out, out + words, 0);
  for (Eigen::Index i = 0; i < x.size(); ++i)
    if (x[i] != 0.0) out[i / 64] |= std::uint64_t{1} << (i % 64);
}

}  // namespace detail

// S = S1 u S2 on {0,1}^m under Hamming distance: codewords pairwise more
// than 3r apart, each with one partner at distance in [1, r]. Columns
// 0..N-1 of `points` are S1, column N+i is the partner of codeword i; both
// carry labels[i].
struct SpreadCode {
  std::size_t m = 0;
  std::size_t r = 0;
  std::size_t k = 0;
  std::size_t n_codewords = 0;
  Matrix points;
  std::vector<int> labels;  // one per codeword

  std::size_t size() const { return 2 * n_codewords; }
  int label_of(std::size_t point) const { return labels[point % n_codewords]; }
  std::size_t partner_of(std::size_t point) const {
    return point < n_codewords ? point + n_codewords : point - n_codewords;
  }
};

// Random codewords kept when more than 3r from every codeword so far (at
// most `budget` draws, default 100 N); partners uniform over B(x, r) \ {x};
// labels uniform over [0, k).
inline SpreadCode sample_spread_codewords(std::size_t m, std::size_t n_codewords, std::size_t r, std::size_t k,
                                          std::uint64_t seed, std::size_t budget = 0) {
  if (m == 0 || n_codewords == 0) throw std::invalid_argument("sample_spread_codewords: m and N must be >= 1");
  if (r == 0) throw std::invalid_argument("sample_spread_codewords: r must be >= 1");
  if (k < 2) throw std::invalid_argument("sample_spread_codewords: need k >= 2 labels");
  if (n_codewords >= 2 && 3 * r >= m)
    throw Error("sample_spread_codewords: no two points of {0,1}^" + std::to_string(m) + " are more than " +
                std::to_string(3 * r) + " apart");
  if (budget == 0) budget = 100 * n_codewords;
  const std::size_t words = detail::words_for(m);
  Rng rng(derive_seed(seed, "codewords"));
  std::vector<std::uint64_t> packed;
  std::vector<Vector> accepted;
  Vector x(static_cast<Eigen::Index>(m));
  std::vector<std::uint64_t> q(words);
  for (std::size_t draw = 0; draw < budget && accepted.size() < n_codewords; ++draw) {
    for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = coin(rng) ? 1.0 : 0.0;
    detail::pack_bits(x, q.data(), words);
    bool ok = true;
    for (std::size_t j = 0; j < accepted.size() && ok; ++j)
      ok = detail::packed_hamming(q.data(), &packed[j * words], words) > 3 * r;
    if (!ok) continue;
    packed.insert(packed.end(), q.begin(), q.end());
    accepted.push_back(x);
  }
  if (accepted.size() < n_codewords)
    throw Error("sample_spread_codewords: found " + std::to_string(accepted.size()) + " of " +
                std::to_string(n_codewords) + " codewords within " + std::to_string(budget) + " draws");

  SpreadCode code;
  code.m = m;
  code.r = r;
  code.k = k;
  code.n_codewords = n_codewords;
  code.points.resize(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(2 * n_codewords));
  code.labels.resize(n_codewords);
  // Partner distance d has weight C(m, d) so the partner is uniform on the ball.
  const std::size_t rmax = std::min(r, m);
  std::vector<double> weights(rmax);
  double c = 1.0;
  for (std::size_t d = 1; d <= rmax; ++d) {
    c = c * static_cast<double>(m - d + 1) / static_cast<double>(d);
    weights[d - 1] = c;
  }
  std::discrete_distribution<std::size_t> pick(weights.begin(), weights.end());
  Rng prng(derive_seed(seed, "partners"));
  std::uniform_int_distribution<int> label(0, static_cast<int>(k) - 1);
  for (std::size_t i = 0; i < n_codewords; ++i) {
    code.points.col(static_cast<Eigen::Index>(i)) = accepted[i];
    code.points.col(static_cast<Eigen::Index>(n_codewords + i)) = flip_bits(accepted[i], pick(prng) + 1, prng);
    code.labels[i] = label(prng);
  }
  return code;
}

struct SpreadCodeCheck {
  std::size_t min_codeword_distance = 0;  // over distinct codeword pairs (m when N = 1)
  std::size_t max_partner_distance = 0;
  bool unique_neighbors = true;           // every point of S has exactly one r-neighbour in S
};

// Exhaustive pairwise verification of the construction.
inline SpreadCodeCheck verify_spread_code(const SpreadCode& code) {
  const std::size_t words = detail::words_for(code.m), total = code.size();
  std::vector<std::uint64_t> packed(words * total);
  for (std::size_t j = 0; j < total; ++j)
    detail::pack_bits(code.points.col(static_cast<Eigen::Index>(j)), &packed[j * words], words);
  SpreadCodeCheck chk;
  chk.min_codeword_distance = code.m;
  std::vector<std::size_t> neighbours(total, 0);
  for (std::size_t a = 0; a < total; ++a)
    for (std::size_t b = a + 1; b < total; ++b) {
      const std::size_t d = detail::packed_hamming(&packed[a * words], &packed[b * words], words);
      if (a < code.n_codewords && b < code.n_codewords) chk.min_codeword_distance = std::min(chk.min_codeword_distance, d);
      if (b == code.partner_of(a)) chk.max_partner_distance = std::max(chk.max_partner_distance, d);
      if (d <= code.r) {
        ++neighbours[a];
        ++neighbours[b];
      }
    }
  for (auto n : neighbours) chk.unique_neighbors = chk.unique_neighbors && n == 1;
  return chk;
}

// h_X: a query within r of a training point gets that point's label (the
// lowest-index one if several qualify); anything else gets `fallback`.
class BallClassifier {
 public:
  BallClassifier(const SpreadCode& code, std::vector<std::size_t> members, int fallback = 0)
      : r_(code.r), fallback_(fallback), words_(detail::words_for(code.m)), members_(std::move(members)) {
    packed_.resize(words_ * members_.size());
    for (std::size_t j = 0; j < members_.size(); ++j) {
      detail::pack_bits(code.points.col(static_cast<Eigen::Index>(members_[j])), &packed_[j * words_], words_);
      labels_.push_back(code.label_of(members_[j]));
    }
  }

  const std::vector<std::size_t>& members() const { return members_; }

  int predict(const VectorRef& x) const {
    std::vector<std::uint64_t> q(words_);
    detail::pack_bits(x, q.data(), words_);
    for (std::size_t j = 0; j < members_.size(); ++j)
      if (detail::packed_hamming(q.data(), &packed_[j * words_], words_) <= r_) return labels_[j];
    return fallback_;
  }

 private:
  std::size_t r_;
  int fallback_;
  std::size_t words_;
  std::vector<std::size_t> members_;
  std::vector<int> labels_;
  std::vector<std::uint64_t> packed_;
};

// X: n points drawn i.i.d. uniformly (with replacement) from S.
inline BallClassifier build_ball_classifier(const SpreadCode& code, std::size_t n, std::uint64_t seed) {
  if (n == 0 || n > code.size()) throw std::invalid_argument("build_ball_classifier: need 1 <= n <= |S|");
  Rng rng(derive_seed(seed, "ball-dataset"));
  std::vector<std::size_t> members(n);
  for (auto& i : members) i = uniform_index(rng, code.size());
  return BallClassifier(code, std::move(members));
}

struct Theorem1Result {
  double mi_advantage = 0.0;
  double smi_advantage = 0.0;
  double sigma = 0.0;           // 0.5 / sqrt(trials), per game
  double bound = 0.0;           // (k-1) / (2k)
  double expected_mi = 0.0;     // (1 - 1/N)^n (k-1)/k
  std::size_t trials = 0;
};

// Runs both games with the label-agreement adversary (member iff
// h_X(x) = c(x)). The SMI non-member is the r-neighbour partner of x0.
inline Theorem1Result theorem1_experiment(const SpreadCode& code, std::size_t n, std::size_t trials, std::uint64_t seed) {
  if (trials == 0) throw std::invalid_argument("theorem1_experiment: trials must be >= 1");
  BallClassifier h = build_ball_classifier(code, n, seed);
  auto adversary = [&](std::size_t point) {
    return h.predict(code.points.col(static_cast<Eigen::Index>(point))) == code.label_of(point) ? 1 : 0;
  };
  auto game = [&](bool strong) {
    std::vector<int> on_members, on_nonmembers;
    const std::uint64_t base = derive_seed(seed, strong ? "smi-trials" : "mi-trials");
    for (std::size_t t = 0; t < trials; ++t) {
      Rng rng(derive_seed(base, t));
      const bool b = coin(rng);
      if (b) {
        on_members.push_back(adversary(h.members()[uniform_index(rng, n)]));
      } else if (strong) {
        on_nonmembers.push_back(adversary(code.partner_of(h.members()[uniform_index(rng, n)])));
      } else {
        on_nonmembers.push_back(adversary(uniform_index(rng, code.size())));
      }
    }
    return advantage_from_decisions(on_members, on_nonmembers);
  };
  Theorem1Result r;
  r.trials = trials;
  r.mi_advantage = game(false);
  r.smi_advantage = game(true);
  r.sigma = 0.5 / std::sqrt(static_cast<double>(trials));
  const double kk = static_cast<double>(code.k);
  r.bound = 0.5 * (kk - 1.0) / kk;
  // The b = 0 point is uniform over S, so it agrees with h_X unless its
  // pair was missed by all n draws and the fallback label is wrong.
  r.expected_mi = std::pow(1.0 - 1.0 / static_cast<double>(code.n_codewords), static_cast<double>(n)) *
                  (kk - 1.0) / kk;
  return r;
}

// ---------------------------------------------------------------------------
// SMI from AI

// An AI adversary returns a full vector for a portion and its true label.
using AiAdversary = std::function<Vector(const Portion&, int)>;

// Masks one coordinate of the challenge, asks the AI adversary for the
// completion and answers "member" iff the completion equals the challenge.
class SmiFromAi {
 public:
  explicit SmiFromAi(AiAdversary ai) : ai_(std::move(ai)) {
    if (!ai_) throw std::invalid_argument("SmiFromAi: empty adversary");
  }

  int decide(const VectorRef& x, int label, std::size_t index) const {
    Vector guess = ai_(make_portion(x, {index}), label);
    return guess.size() == x.size() && guess == x ? 1 : 0;
  }

  int operator()(const VectorRef& x, int label, Rng& rng) const {
    return decide(x, label, uniform_index(rng, static_cast<std::size_t>(x.size())));
  }

 private:
  AiAdversary ai_;
};

inline SmiFromAi smi_from_ai_reduction(AiAdversary ai) { return SmiFromAi(std::move(ai)); }

// AI adversary from a scorer: the top-scoring sibling, lowest index on ties.
inline AiAdversary make_ai_adversary(const TrainedModel& model, const MembershipScorer& scorer, DomainKind kind,
                                     std::size_t bins = 2) {
  return [&model, &scorer, kind, bins](const Portion& p, int label) -> Vector {
    SiblingSet s = enumerate_siblings(p, kind, bins);
    Vector scores = scorer.score_siblings(model, s, label);
    Eigen::Index best;
    scores.maxCoeff(&best);
    return s.materialize(static_cast<std::size_t>(best));
  };
}

// SMI game played by the reduction: member x0 from train, or a sampled
// r-neighbour of it. Returns the advantage of its decisions.
inline double reduction_smi_advantage(const SmiFromAi& smi, const LabeledDataset& train, const NeighborSampler& sampler,
                                      double r, std::size_t trials, std::uint64_t seed) {
  std::vector<int> on_members, on_nonmembers;
  for (std::size_t t = 0; t < trials; ++t) {
    Rng rng(derive_seed(seed, t));
    const bool b = coin(rng);
    const auto i = uniform_index(rng, train.size());
    if (b) {
      on_members.push_back(smi(train.record(i), train.labels[i], rng));
    } else {
      Neighbor nb = sampler.sample(train.record(i), train.labels[i], r, rng);
      on_nonmembers.push_back(smi(nb.x, nb.label, rng));
    }
  }
  return advantage_from_decisions(on_members, on_nonmembers);
}

}  // namespace infa
