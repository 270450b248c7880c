#pragma once

#include "infa/metricspace.hpp"

#include <span>

namespace infa {

// Records are the columns of `features`; labels are class indices in [0, classes).
struct LabeledDataset {
  FeatureDomain domain;
  Matrix features;
  std::vector<int> labels;
  std::size_t classes = 0;

  std::size_t size() const { return labels.size(); }
  std::size_t dimension() const { return domain.dimension; }
  bool empty() const { return labels.empty(); }
  auto record(std::size_t i) const { return features.col(static_cast<Eigen::Index>(i)); }

  void validate() const {
    if (static_cast<std::size_t>(features.rows()) != domain.dimension)
      throw std::invalid_argument("dataset: feature rows do not match domain dimension");
    if (static_cast<std::size_t>(features.cols()) != labels.size())
      throw std::invalid_argument("dataset: label count does not match record count");
    for (std::size_t i = 0; i < size(); ++i) {
      if (labels[i] < 0 || static_cast<std::size_t>(labels[i]) >= classes)
        throw std::invalid_argument("dataset: label " + std::to_string(labels[i]) +
                                    " out of range [0," + std::to_string(classes) + ")");
      domain.validate(record(i));
    }
  }

  LabeledDataset subset(std::span<const std::size_t> idx) const {
    LabeledDataset out;
    out.domain = domain;
    out.classes = classes;
    out.features.resize(features.rows(), static_cast<Eigen::Index>(idx.size()));
    out.labels.resize(idx.size());
    for (std::size_t j = 0; j < idx.size(); ++j) {
      out.features.col(static_cast<Eigen::Index>(j)) = features.col(static_cast<Eigen::Index>(idx[j]));
      out.labels[j] = labels[idx[j]];
    }
    return out;
  }

  LabeledDataset slice(std::size_t begin, std::size_t count) const {
    std::vector<std::size_t> idx(count);
    std::iota(idx.begin(), idx.end(), begin);
    return subset(idx);
  }

  std::vector<std::size_t> class_counts() const {
    std::vector<std::size_t> counts(classes, 0);
    for (int y : labels) ++counts[static_cast<std::size_t>(y)];
    return counts;
  }
};

// train/test plus whatever is left over (used as a shadow pool).
struct SplitDataset {
  LabeledDataset train;
  LabeledDataset test;
  LabeledDataset reserve;
};

inline SplitDataset split_dataset(const LabeledDataset& data, double train_fraction,
                                  double test_fraction, std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0) ||
      !(test_fraction > 0.0 && test_fraction < 1.0) || train_fraction + test_fraction > 1.0 + 1e-12)
    throw std::invalid_argument("split fractions must lie in (0,1) and sum to at most 1");
  Rng rng(seed);
  auto order = permutation(rng, data.size());
  auto n_train = static_cast<std::size_t>(std::floor(train_fraction * static_cast<double>(data.size())));
  auto n_test = std::min(data.size() - n_train,
                         static_cast<std::size_t>(std::floor(test_fraction * static_cast<double>(data.size()))));
  std::span<const std::size_t> all(order);
  SplitDataset out;
  out.train = data.subset(all.subspan(0, n_train));
  out.test = data.subset(all.subspan(n_train, n_test));
  out.reserve = data.subset(all.subspan(n_train + n_test));
  return out;
}

}  // namespace infa
