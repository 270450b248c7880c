#pragma once

#include "infa/common.hpp"

#include <cmath>
#include <optional>
#include <span>

namespace infa {

// Pair counts behind the Mann-Whitney statistic: `wins` pairs where the
// positive score is higher, `ties` equal pairs, out of `pairs`.
struct AucCounts {
  std::uint64_t wins = 0;
  std::uint64_t ties = 0;
  std::uint64_t pairs = 0;
};

namespace detail {

inline void check_scores(std::span<const double> s, const char* what) {
  if (s.empty()) throw std::invalid_argument(std::string("auc: ") + what + " scores are empty");
  for (double v : s)
    if (std::isnan(v)) throw std::invalid_argument(std::string("auc: NaN in ") + what + " scores");
}

}  // namespace detail

inline AucCounts auc_counts(std::span<const double> positives, std::span<const double> negatives) {
  detail::check_scores(positives, "member");
  detail::check_scores(negatives, "non-member");
  std::vector<double> neg(negatives.begin(), negatives.end());
  std::sort(neg.begin(), neg.end());
  AucCounts c;
  c.pairs = static_cast<std::uint64_t>(positives.size()) * neg.size();
  for (double p : positives) {
    auto lo = std::lower_bound(neg.begin(), neg.end(), p);
    auto hi = std::upper_bound(lo, neg.end(), p);
    c.wins += static_cast<std::uint64_t>(lo - neg.begin());
    c.ties += static_cast<std::uint64_t>(hi - lo);
  }
  return c;
}

// (wins + ties/2) / pairs. Rounded through the smaller of the value and its
// complement, so auc(a, b) + auc(b, a) == 1 holds exactly in doubles.
inline double auc_from_counts(const AucCounts& c) {
  const std::uint64_t twice = 2 * c.wins + c.ties;
  const std::uint64_t total = 2 * c.pairs;
  if (2 * twice <= total) return static_cast<double>(twice) / static_cast<double>(total);
  return 1.0 - static_cast<double>(total - twice) / static_cast<double>(total);
}

inline double auc(std::span<const double> positives, std::span<const double> negatives) {
  return auc_from_counts(auc_counts(positives, negatives));
}

inline double auc(const Vector& positives, const Vector& negatives) {
  return auc(std::span<const double>(positives.data(), static_cast<std::size_t>(positives.size())),
             std::span<const double>(negatives.data(), static_cast<std::size_t>(negatives.size())));
}

// Empirical TPR - FPR of hard decisions (each 0 or 1).
inline double advantage_from_decisions(std::span<const int> on_members, std::span<const int> on_nonmembers) {
  if (on_members.empty() || on_nonmembers.empty())
    throw std::invalid_argument("advantage_from_decisions: empty decision list");
  auto rate = [](std::span<const int> d) {
    std::size_t ones = 0;
    for (int v : d) {
      if (v != 0 && v != 1) throw std::invalid_argument("advantage_from_decisions: decisions must be 0 or 1");
      ones += static_cast<std::size_t>(v);
    }
    return static_cast<double>(ones) / static_cast<double>(d.size());
  };
  return rate(on_members) - rate(on_nonmembers);
}

struct ThresholdAdvantage {
  double advantage = 0.0;
  double tpr = 0.0;
  double fpr = 0.0;
  double threshold = 0.0;  // decide "member" when score >= threshold
};

inline ThresholdAdvantage advantage_at_threshold(std::span<const double> members,
                                                 std::span<const double> nonmembers, double threshold) {
  if (members.empty() || nonmembers.empty())
    throw std::invalid_argument("advantage_at_threshold: empty score list");
  auto rate = [&](std::span<const double> s) {
    return static_cast<double>(std::count_if(s.begin(), s.end(), [&](double v) { return v >= threshold; })) /
           static_cast<double>(s.size());
  };
  ThresholdAdvantage r;
  r.tpr = rate(members);
  r.fpr = rate(nonmembers);
  r.advantage = r.tpr - r.fpr;
  r.threshold = threshold;
  return r;
}

// Threshold maximising TPR - FPR over every observed score (Youden's J).
// Optimistic: the threshold is fitted on the evaluation scores themselves.
inline ThresholdAdvantage best_threshold_advantage(std::span<const double> members,
                                                   std::span<const double> nonmembers) {
  if (members.empty() || nonmembers.empty())
    throw std::invalid_argument("best_threshold_advantage: empty score list");
  std::vector<std::pair<double, int>> all;
  all.reserve(members.size() + nonmembers.size());
  for (double v : members) all.emplace_back(v, 1);
  for (double v : nonmembers) all.emplace_back(v, 0);
  std::sort(all.begin(), all.end(), [](auto& a, auto& b) { return a.first > b.first; });
  const double np = static_cast<double>(members.size());
  const double nn = static_cast<double>(nonmembers.size());
  ThresholdAdvantage best;
  best.threshold = std::numeric_limits<double>::infinity();
  std::size_t tp = 0, fp = 0;
  for (std::size_t i = 0; i < all.size();) {
    const double t = all[i].first;
    for (; i < all.size() && all[i].first == t; ++i) (all[i].second ? tp : fp)++;
    const double tpr = static_cast<double>(tp) / np, fpr = static_cast<double>(fp) / nn;
    if (tpr - fpr > best.advantage) best = {tpr - fpr, tpr, fpr, t};
  }
  return best;
}

// Binomial standard error sqrt(p(1-p)/n).
inline double binomial_sigma(double p, std::size_t n) {
  if (n == 0) throw std::invalid_argument("binomial_sigma: n must be >= 1");
  return std::sqrt(p * (1.0 - p) / static_cast<double>(n));
}

// Ranks starting at 1; tied values share their average rank.
inline std::vector<double> average_ranks(std::span<const double> v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(v.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j < order.size() && v[order[j]] == v[order[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + j + 1);
    for (std::size_t t = i; t < j; ++t) ranks[order[t]] = r;
    i = j;
  }
  return ranks;
}

inline double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("pearson: need two equal-length series of length >= 2");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

inline double spearman(std::span<const double> x, std::span<const double> y) {
  auto rx = average_ranks(x);
  auto ry = average_ranks(y);
  return pearson(rx, ry);
}

}  // namespace infa
