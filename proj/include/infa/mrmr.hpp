#pragma once

#include "infa/dataset.hpp"

#include <cmath>

namespace infa {

// Per-feature bin codes: binary features keep their bit, continuous ones
// fall into `bins` equal-width bins over [-1,1]. codes[f][i] is record i.
inline std::vector<std::vector<int>> discretize_features(const LabeledDataset& data, std::size_t bins) {
  if (data.domain.kind == DomainKind::Continuous && bins < 2)
    throw std::invalid_argument("discretize_features: need at least 2 bins");
  std::vector<std::vector<int>> codes(data.dimension(), std::vector<int>(data.size()));
  for (std::size_t f = 0; f < data.dimension(); ++f)
    for (std::size_t i = 0; i < data.size(); ++i)
      codes[f][i] = static_cast<int>(
          bin_of(data.features(static_cast<Eigen::Index>(f), static_cast<Eigen::Index>(i)), bins, data.domain.kind));
  return codes;
}

// Plug-in mutual information (nats) between two discrete sequences with
// values in [0, na) and [0, nb).
inline double mutual_information(std::span<const int> a, std::size_t na, std::span<const int> b, std::size_t nb) {
  if (a.size() != b.size()) throw std::invalid_argument("mutual_information: length mismatch");
  if (a.empty()) return 0.0;
  std::vector<std::size_t> joint(na * nb, 0), pa(na, 0), pb(nb, 0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    ++joint[static_cast<std::size_t>(a[i]) * nb + static_cast<std::size_t>(b[i])];
    ++pa[static_cast<std::size_t>(a[i])];
    ++pb[static_cast<std::size_t>(b[i])];
  }
  const double n = static_cast<double>(a.size());
  double mi = 0.0;
  for (std::size_t x = 0; x < na; ++x)
    for (std::size_t y = 0; y < nb; ++y) {
      const auto c = joint[x * nb + y];
      if (c == 0) continue;
      const double pxy = static_cast<double>(c) / n;
      mi += pxy * std::log(static_cast<double>(c) * n / (static_cast<double>(pa[x]) * static_cast<double>(pb[y])));
    }
  return std::max(mi, 0.0);
}

// Greedy mRMR (difference form): start from the most label-relevant
// feature, then repeatedly add the feature maximising
// I(f; label) - mean_{c chosen} I(f; c). Ties go to the lowest index.
inline std::vector<std::size_t> mrmr_select(const LabeledDataset& data, std::size_t k_features,
                                            std::size_t bins = 10) {
  const std::size_t m = data.dimension();
  if (k_features == 0 || k_features >= m)
    throw std::invalid_argument("mrmr_select: need 1 <= k_features < m");
  if (data.empty()) throw std::invalid_argument("mrmr_select: empty dataset");
  const std::size_t levels = data.domain.kind == DomainKind::Binary ? 2 : bins;
  auto codes = discretize_features(data, bins);

  std::vector<double> relevance(m), redundancy(m, 0.0);
  for (std::size_t f = 0; f < m; ++f)
    relevance[f] = mutual_information(codes[f], levels, data.labels, data.classes);

  std::vector<std::size_t> chosen;
  std::vector<char> used(m, 0);
  while (chosen.size() < k_features) {
    std::size_t best = m;
    double best_score = -std::numeric_limits<double>::infinity();
    for (std::size_t f = 0; f < m; ++f) {
      if (used[f]) continue;
      const double score =
          chosen.empty() ? relevance[f] : relevance[f] - redundancy[f] / static_cast<double>(chosen.size());
      if (score > best_score) {
        best_score = score;
        best = f;
      }
    }
    used[best] = 1;
    chosen.push_back(best);
    if (chosen.size() == k_features) break;
    for (std::size_t f = 0; f < m; ++f)
      if (!used[f]) redundancy[f] += mutual_information(codes[f], levels, codes[best], levels);
  }
  return chosen;
}

}  // namespace infa
