#pragma once

#include "infa/common.hpp"

#include <limits>

namespace infa {

struct KMeansResult {
  std::vector<int> labels;
  Matrix centers;                  // m x k
  std::vector<double> objective;   // sum of squared distances after each assignment
  std::size_t iterations = 0;
};

namespace detail {

inline double assign_clusters(const Matrix& data, const Matrix& centers, std::vector<int>& labels,
                              std::vector<double>& dist) {
  double total = 0.0;
  for (Eigen::Index j = 0; j < data.cols(); ++j) {
    Eigen::Index best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (Eigen::Index c = 0; c < centers.cols(); ++c) {
      const double d = (data.col(j) - centers.col(c)).squaredNorm();
      if (d < best_d) {
        best_d = d;
        best = c;
      }
    }
    labels[static_cast<std::size_t>(j)] = static_cast<int>(best);
    dist[static_cast<std::size_t>(j)] = best_d;
    total += best_d;
  }
  return total;
}

}  // namespace detail

// Lloyd's algorithm on the columns of `data`, started from k distinct
// random points. An empty cluster is re-seeded at the point farthest from
// its own centre. iters = 0 returns the initial assignment.
inline KMeansResult kmeans(const Matrix& data, std::size_t k, std::size_t iters, std::uint64_t seed) {
  const auto n = static_cast<std::size_t>(data.cols());
  if (k == 0) throw std::invalid_argument("kmeans: k must be >= 1");
  if (k > n) throw std::invalid_argument("kmeans: k exceeds the number of points");
  Rng rng(derive_seed(seed, "kmeans-init"));
  KMeansResult r;
  r.centers = select_columns(data, sample_without_replacement(rng, n, k));
  r.labels.assign(n, 0);
  std::vector<double> dist(n);
  r.objective.push_back(detail::assign_clusters(data, r.centers, r.labels, dist));

  for (std::size_t it = 0; it < iters; ++it) {
    Matrix sums = Matrix::Zero(data.rows(), static_cast<Eigen::Index>(k));
    std::vector<std::size_t> counts(k, 0);
    for (std::size_t j = 0; j < n; ++j) {
      sums.col(r.labels[j]) += data.col(static_cast<Eigen::Index>(j));
      ++counts[static_cast<std::size_t>(r.labels[j])];
    }
    bool reseeded = false;
    std::vector<char> taken(n, 0);
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] > 0) {
        r.centers.col(static_cast<Eigen::Index>(c)) = sums.col(static_cast<Eigen::Index>(c)) / static_cast<double>(counts[c]);
        continue;
      }
      std::size_t far = 0;
      double far_d = -1.0;
      for (std::size_t j = 0; j < n; ++j)
        if (!taken[j] && dist[j] > far_d) {
          far_d = dist[j];
          far = j;
        }
      taken[far] = 1;
      r.centers.col(static_cast<Eigen::Index>(c)) = data.col(static_cast<Eigen::Index>(far));
      reseeded = true;
    }
    std::vector<int> previous = r.labels;
    r.objective.push_back(detail::assign_clusters(data, r.centers, r.labels, dist));
    r.iterations = it + 1;
    if (!reseeded && previous == r.labels) break;
  }
  return r;
}

inline std::vector<int> kmeans_labels(const Matrix& data, std::size_t k, std::size_t iters, std::uint64_t seed) {
  return kmeans(data, k, iters, seed).labels;
}

}  // namespace infa
