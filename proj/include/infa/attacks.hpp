#pragma once

#include "infa/models.hpp"
#include "infa/synthesis.hpp"

#include <memory>
#include <span>

namespace infa {

// Maps (vector, true label, model) to a membership score; higher means more
// member-like. Label spans of length 1 apply to every column.
class MembershipScorer {
 public:
  virtual ~MembershipScorer() = default;
  virtual std::string name() const = 0;

  virtual Vector score_columns(const TrainedModel& model, const Matrix& x, std::span<const int> labels) const = 0;

  // Scores for every candidate of a sibling set, all carrying `label`.
  virtual Vector score_siblings(const TrainedModel& model, const SiblingSet& siblings, int label) const {
    constexpr std::size_t chunk = 4096;
    Vector out(static_cast<Eigen::Index>(siblings.size()));
    const int labels[1] = {label};
    for (std::size_t start = 0; start < siblings.size(); start += chunk) {
      const std::size_t count = std::min(chunk, siblings.size() - start);
      out.segment(static_cast<Eigen::Index>(start), static_cast<Eigen::Index>(count)) =
          score_columns(model, siblings.materialize_block(start, count), labels);
    }
    return out;
  }

  // Score at or above which the hard-decision variant answers "member".
  virtual std::optional<double> threshold(const TrainedModel&) const { return std::nullopt; }

  double score(const TrainedModel& model, const VectorRef& x, int label) const {
    Matrix col = x;
    const int labels[1] = {label};
    return score_columns(model, col, labels)[0];
  }
};

namespace detail {

inline int label_at(std::span<const int> labels, std::size_t j) { return labels.size() == 1 ? labels[0] : labels[j]; }

inline void check_labels(std::span<const int> labels, std::size_t columns, std::size_t classes) {
  if (labels.size() != 1 && labels.size() != columns)
    throw std::invalid_argument("scorer: label count does not match column count");
  for (int y : labels)
    if (y < 0 || static_cast<std::size_t>(y) >= classes) throw std::invalid_argument("scorer: label out of range");
}

}  // namespace detail

// Scorers that only look at the target's confidence vectors.
class OutputScorer : public MembershipScorer {
 public:
  virtual Vector score_confidences(const TrainedModel& model, const Matrix& probs,
                                   std::span<const int> labels) const = 0;

  Vector score_columns(const TrainedModel& model, const Matrix& x, std::span<const int> labels) const override {
    return score_confidences(model, predict_proba_columns(model, x), labels);
  }

  Vector score_siblings(const TrainedModel& model, const SiblingSet& siblings, int label) const override {
    const int labels[1] = {label};
    return score_confidences(model, predict_proba_siblings(model, siblings), labels);
  }
};

// Conf MI: the largest confidence; the label is ignored.
class ConfidenceScorer : public OutputScorer {
 public:
  std::string name() const override { return "conf"; }

  Vector score_confidences(const TrainedModel& model, const Matrix& probs,
                           std::span<const int> labels) const override {
    detail::check_labels(labels, static_cast<std::size_t>(probs.cols()), model.classes);
    return probs.colwise().maxCoeff().transpose();
  }

  // Confidence matching the mean training loss.
  std::optional<double> threshold(const TrainedModel& model) const override { return std::exp(-model.train_loss); }
};

// Loss MI scores -loss. For attribute inference the loss attack instead
// prefers the loss closest to the training loss: -|loss - train_loss|.
class LossScorer : public OutputScorer {
 public:
  enum class Mode { NegativeLoss, TrainingLossProximity };

  explicit LossScorer(Mode mode = Mode::NegativeLoss) : mode_(mode) {}
  Mode mode() const { return mode_; }

  std::string name() const override { return "loss"; }

  Vector score_confidences(const TrainedModel& model, const Matrix& probs,
                           std::span<const int> labels) const override {
    const auto n = static_cast<std::size_t>(probs.cols());
    detail::check_labels(labels, n, model.classes);
    Vector out(probs.cols());
    for (std::size_t j = 0; j < n; ++j) {
      const double p = probs(detail::label_at(labels, j), static_cast<Eigen::Index>(j));
      const double loss = -std::log(std::max(p, kConfidenceFloor));
      out[static_cast<Eigen::Index>(j)] =
          mode_ == Mode::NegativeLoss ? -loss : -std::abs(loss - model.train_loss);
    }
    return out;
  }

  std::optional<double> threshold(const TrainedModel& model) const override {
    if (mode_ == Mode::NegativeLoss) return -model.train_loss;
    return std::nullopt;
  }

 private:
  Mode mode_;
};

// ---------------------------------------------------------------------------
// Shadow attack

// Attack input: the confidence vector sorted descending, then the one-hot
// true label (2k rows per column).
inline Matrix attack_features(const Matrix& probs, std::span<const int> labels) {
  const auto k = probs.rows();
  const auto n = static_cast<std::size_t>(probs.cols());
  detail::check_labels(labels, n, static_cast<std::size_t>(k));
  Matrix f = Matrix::Zero(2 * k, probs.cols());
  std::vector<double> col(static_cast<std::size_t>(k));
  for (std::size_t j = 0; j < n; ++j) {
    const auto c = static_cast<Eigen::Index>(j);
    for (Eigen::Index i = 0; i < k; ++i) col[static_cast<std::size_t>(i)] = probs(i, c);
    std::sort(col.begin(), col.end(), std::greater<>());
    for (Eigen::Index i = 0; i < k; ++i) f(i, c) = col[static_cast<std::size_t>(i)];
    f(k + detail::label_at(labels, j), c) = 1.0;
  }
  return f;
}

struct ShadowAttackModel {
  std::size_t classes = 0;
  std::size_t shadow_count = 0;
  bool per_class = false;
  std::vector<Network> heads;  // one shared head, or one per class

  Vector membership_probabilities(const Matrix& probs, std::span<const int> labels) const {
    if (static_cast<std::size_t>(probs.rows()) != classes)
      throw std::invalid_argument("shadow attack: class count mismatch (" + std::to_string(probs.rows()) +
                                  " vs " + std::to_string(classes) + ")");
    Matrix f = attack_features(probs, labels);
    if (!per_class) return forward(heads.front(), f).row(0).transpose();
    Vector out(probs.cols());
    if (labels.size() == 1) return forward(heads[static_cast<std::size_t>(labels[0])], f).row(0).transpose();
    for (std::size_t c = 0; c < classes; ++c) {
      std::vector<std::size_t> cols;
      for (std::size_t j = 0; j < labels.size(); ++j)
        if (labels[j] == static_cast<int>(c)) cols.push_back(j);
      if (cols.empty()) continue;
      Matrix p = forward(heads[c], select_columns(f, cols));
      for (std::size_t t = 0; t < cols.size(); ++t) out[static_cast<Eigen::Index>(cols[t])] = p(0, static_cast<Eigen::Index>(t));
    }
    return out;
  }
};

class ShadowScorer : public OutputScorer {
 public:
  explicit ShadowScorer(std::shared_ptr<const ShadowAttackModel> attack) : attack_(std::move(attack)) {
    if (!attack_) throw std::invalid_argument("ShadowScorer: null attack model");
  }

  std::string name() const override { return "shadow"; }
  const ShadowAttackModel& attack() const { return *attack_; }

  Vector score_confidences(const TrainedModel& model, const Matrix& probs,
                           std::span<const int> labels) const override {
    if (model.classes != attack_->classes)
      throw std::invalid_argument("ShadowScorer: attack trained for " + std::to_string(attack_->classes) +
                                  " classes, target has " + std::to_string(model.classes));
    return attack_->membership_probabilities(probs, labels);
  }

  std::optional<double> threshold(const TrainedModel&) const override { return 0.5; }

 private:
  std::shared_ptr<const ShadowAttackModel> attack_;
};

// Records (confidence vector, true label, in/out bit) for attack training.
struct AttackRecords {
  Matrix confidences;  // k x n
  std::vector<int> labels;
  std::vector<int> membership;

  std::size_t size() const { return labels.size(); }

  void append(const Matrix& probs, std::span<const int> y, int in) {
    const auto old = confidences.cols();
    Matrix grown(probs.rows(), old + probs.cols());
    if (old > 0) grown.leftCols(old) = confidences;
    grown.rightCols(probs.cols()) = probs;
    confidences = std::move(grown);
    labels.insert(labels.end(), y.begin(), y.end());
    membership.insert(membership.end(), y.size(), in);
  }
};

struct ShadowSplit {
  TrainedModel model;
  LabeledDataset in;
  LabeledDataset out;
};

struct ShadowTraining {
  ShadowAttackModel attack;
  std::vector<ShadowSplit> shadows;
  AttackRecords records;
};

struct ShadowOptions {
  std::size_t split_size = 0;  // records per in/out half; 0 splits the pool evenly
  bool per_class_heads = false;
};

namespace detail {

// Disjoint slots of `size` records each; attempts after the first deal each
// class round-robin across slots. Empty result when a slot misses a class.
inline std::vector<std::vector<std::size_t>> deal_slots(const LabeledDataset& pool, std::size_t slots,
                                                        std::size_t size, bool stratified, Rng& rng) {
  auto order = permutation(rng, pool.size());
  std::vector<std::vector<std::size_t>> out(slots);
  if (!stratified) {
    for (std::size_t s = 0; s < slots; ++s)
      out[s].assign(order.begin() + static_cast<std::ptrdiff_t>(s * size),
                    order.begin() + static_cast<std::ptrdiff_t>((s + 1) * size));
  } else {
    order.resize(slots * size);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return pool.labels[a] < pool.labels[b]; });
    for (std::size_t j = 0; j < order.size(); ++j) out[j % slots].push_back(order[j]);
  }
  std::vector<char> present(pool.classes, 0);
  for (int y : pool.labels) present[static_cast<std::size_t>(y)] = 1;
  for (auto& s : out) {
    std::vector<char> seen(pool.classes, 0);
    for (std::size_t i : s) seen[static_cast<std::size_t>(pool.labels[i])] = 1;
    if (seen != present) return {};
  }
  return out;
}

inline ShadowAttackModel fit_attack(const AttackRecords& records, std::size_t classes, std::size_t shadows,
                                    bool per_class, const MlpConfig& cfg) {
  ShadowAttackModel attack;
  attack.classes = classes;
  attack.shadow_count = shadows;
  attack.per_class = per_class;
  Matrix features = attack_features(records.confidences, records.labels);
  Matrix targets(1, static_cast<Eigen::Index>(records.size()));
  for (std::size_t j = 0; j < records.size(); ++j)
    targets(0, static_cast<Eigen::Index>(j)) = records.membership[j];
  auto fit = [&](const Matrix& x, const Matrix& y, std::uint64_t seed) {
    Rng rng(derive_seed(seed, "weight-init"));
    MlpConfig c = cfg;
    c.seed = seed;
    Network net = init_network(static_cast<std::size_t>(x.rows()), cfg.hidden_layers, 1, cfg.activation,
                               OutputKind::Sigmoid, rng);
    fit_network(net, x, y, c);
    return net;
  };
  if (!per_class) {
    attack.heads.push_back(fit(features, targets, cfg.seed));
    return attack;
  }
  for (std::size_t c = 0; c < classes; ++c) {
    std::vector<std::size_t> cols;
    for (std::size_t j = 0; j < records.size(); ++j)
      if (records.labels[j] == static_cast<int>(c)) cols.push_back(j);
    if (cols.empty()) {
      // No records for this class: fall back to a head fitted on everything.
      attack.heads.push_back(fit(features, targets, derive_seed(cfg.seed, c)));
    } else {
      attack.heads.push_back(fit(select_columns(features, cols), select_columns(targets, cols), derive_seed(cfg.seed, c)));
    }
  }
  return attack;
}

}  // namespace detail

// Trains n_shadows shadow models on disjoint halves of the pool (shadow i
// uses seed ^ i) and fits the attack network on their in/out outputs.
inline ShadowTraining train_shadow_attack(const LabeledDataset& pool, std::size_t n_shadows,
                                          const MlpConfig& target_cfg, const MlpConfig& attack_cfg,
                                          std::uint64_t seed, const ShadowOptions& opts = {}) {
  if (n_shadows == 0) throw std::invalid_argument("train_shadow_attack: need at least one shadow model");
  target_cfg.validate();
  attack_cfg.validate();
  const std::size_t slots = 2 * n_shadows;
  const std::size_t size = opts.split_size ? opts.split_size : pool.size() / slots;
  if (size == 0 || size * slots > pool.size())
    throw std::invalid_argument("train_shadow_attack: pool of " + std::to_string(pool.size()) +
                                " records is too small for " + std::to_string(n_shadows) + " shadows");

  std::vector<std::vector<std::size_t>> dealt;
  constexpr std::size_t kAttempts = 10;
  for (std::size_t attempt = 0; attempt < kAttempts && dealt.empty(); ++attempt) {
    Rng rng(derive_seed(derive_seed(seed, "shadow-split"), attempt));
    dealt = detail::deal_slots(pool, slots, size, attempt > 0, rng);
  }
  if (dealt.empty())
    throw Error("train_shadow_attack: a class is missing from some shadow split after " +
                std::to_string(kAttempts) + " attempts");

  ShadowTraining result;
  for (std::size_t i = 0; i < n_shadows; ++i) {
    ShadowSplit split;
    split.in = pool.subset(dealt[2 * i]);
    split.out = pool.subset(dealt[2 * i + 1]);
    MlpConfig cfg = target_cfg;
    cfg.seed = seed ^ i;
    split.model = train_mlp(split.in, pool.classes, cfg).model;
    result.records.append(predict_proba_columns(split.model, split.in.features), split.in.labels, 1);
    result.records.append(predict_proba_columns(split.model, split.out.features), split.out.labels, 0);
    result.shadows.push_back(std::move(split));
  }
  result.attack = detail::fit_attack(result.records, pool.classes, n_shadows, opts.per_class_heads, attack_cfg);
  return result;
}

struct AugmentOptions {
  std::size_t per_distance = 2;
  std::size_t max_distance = 10;  // flips (binary) or multiples of 0.05 Manhattan (continuous)
  double continuous_step = 0.05;
};

// Adds synthetic "out" records near every shadow in/out record and refits
// the attack from the same seed. per_distance = 0 reproduces the untuned model.
inline ShadowAttackModel augment_attack_training(const ShadowTraining& training, const MlpConfig& attack_cfg,
                                                 const AugmentOptions& opts, std::uint64_t seed) {
  AttackRecords records = training.records;
  if (opts.per_distance > 0) {
    for (std::size_t s = 0; s < training.shadows.size(); ++s) {
      const auto& split = training.shadows[s];
      const bool binary = split.in.domain.kind == DomainKind::Binary;
      NearestNeighborIndex members(split.in.features, default_metric(split.in.domain));
      Rng rng(derive_seed(derive_seed(seed, "augment"), s));
      std::vector<Vector> vecs;
      std::vector<int> labels;
      for (const LabeledDataset* part : {&split.in, &split.out}) {
        for (std::size_t i = 0; i < part->size(); ++i) {
          for (std::size_t d = 1; d <= opts.max_distance; ++d) {
            for (std::size_t t = 0; t < opts.per_distance; ++t) {
              Vector v = binary ? flip_bits(part->record(i), std::min<std::size_t>(d, part->dimension()), rng)
                                : perturb_manhattan(part->record(i), static_cast<double>(d) * opts.continuous_step, rng);
              if (members.nearest(v).distance == 0.0) continue;
              vecs.push_back(std::move(v));
              labels.push_back(part->labels[i]);
            }
          }
        }
      }
      if (vecs.empty()) continue;
      Matrix x(static_cast<Eigen::Index>(split.in.dimension()), static_cast<Eigen::Index>(vecs.size()));
      for (std::size_t j = 0; j < vecs.size(); ++j) x.col(static_cast<Eigen::Index>(j)) = vecs[j];
      records.append(predict_proba_columns(split.model, x), labels, 0);
    }
  }
  return detail::fit_attack(records, training.attack.classes, training.attack.shadow_count,
                            training.attack.per_class, attack_cfg);
}

// Checkpoint: magic, kind 1, u32 classes, u32 shadow count, u32 per-class
// flag, u32 head count, then each head network.
inline void save_attack(std::ostream& os, const ShadowAttackModel& attack) {
  detail::write_magic(os, kCheckpointShadowAttack);
  detail::write_u32(os, static_cast<std::uint32_t>(attack.classes));
  detail::write_u32(os, static_cast<std::uint32_t>(attack.shadow_count));
  detail::write_u32(os, attack.per_class ? 1 : 0);
  detail::write_u32(os, static_cast<std::uint32_t>(attack.heads.size()));
  for (const auto& h : attack.heads) detail::write_network(os, h);
}

inline ShadowAttackModel load_attack(std::istream& is) {
  detail::read_magic(is, kCheckpointShadowAttack);
  ShadowAttackModel attack;
  attack.classes = detail::read_u32(is);
  attack.shadow_count = detail::read_u32(is);
  attack.per_class = detail::read_u32(is) != 0;
  const auto heads = detail::read_u32(is);
  if (heads != (attack.per_class ? attack.classes : 1)) throw Error("checkpoint: unexpected attack head count");
  for (std::uint32_t h = 0; h < heads; ++h) {
    attack.heads.push_back(detail::read_network(is));
    if (attack.heads.back().input_dim() != 2 * attack.classes || attack.heads.back().output_dim() != 1)
      throw Error("checkpoint: attack head has the wrong shape");
  }
  return attack;
}

inline void save_attack(const std::string& path, const ShadowAttackModel& attack) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot open " + path + " for writing");
  save_attack(os, attack);
}

inline ShadowAttackModel load_attack(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("cannot open " + path);
  return load_attack(is);
}

}  // namespace infa
