#pragma once

#include "infa/io.hpp"
#include "infa/models.hpp"

namespace fixtures {

// Small overfit binary fixture: 5 classes, 100 features, 300 training records.
struct Overfit {
  infa::LabeledDataset all, train, test, pool;
  infa::TrainedModel model;
};

inline const Overfit& overfit() {
  static const Overfit f = [] {
    Overfit o;
    o.all = infa::synth_dataset(infa::SynthKind::BinaryClusters, 100, 2400, 5, 0.4, 7);
    o.train = o.all.slice(0, 300);
    o.test = o.all.slice(300, 300);
    o.pool = o.all.slice(600, 1800);
    infa::MlpConfig cfg;
    cfg.hidden_layers = {64};
    cfg.epochs = 60;
    cfg.seed = 5;
    o.model = infa::train_mlp(o.train, 5, cfg).model;
    return o;
  }();
  return f;
}

inline infa::LabeledDataset random_binary(std::size_t m, std::size_t n, std::size_t classes, std::uint64_t seed) {
  infa::Rng rng(seed);
  infa::LabeledDataset d;
  d.domain = infa::FeatureDomain::binary(m);
  d.features.resize(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n));
  for (Eigen::Index j = 0; j < d.features.cols(); ++j)
    for (Eigen::Index i = 0; i < d.features.rows(); ++i) d.features(i, j) = infa::coin(rng);
  d.classes = classes;
  for (std::size_t j = 0; j < n; ++j) d.labels.push_back(static_cast<int>(infa::uniform_index(rng, classes)));
  return d;
}

inline infa::LabeledDataset random_continuous(std::size_t m, std::size_t n, std::size_t classes, std::uint64_t seed) {
  infa::Rng rng(seed);
  infa::LabeledDataset d;
  d.domain = infa::FeatureDomain::continuous(m);
  d.features.resize(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n));
  for (Eigen::Index j = 0; j < d.features.cols(); ++j)
    for (Eigen::Index i = 0; i < d.features.rows(); ++i) d.features(i, j) = infa::uniform_real(rng, -1, 1);
  d.classes = classes;
  for (std::size_t j = 0; j < n; ++j) d.labels.push_back(static_cast<int>(infa::uniform_index(rng, classes)));
  return d;
}

}  // namespace fixtures
