#pragma once

#include "infa/dataset.hpp"

#include <cmath>
#include <memory>
#include <optional>
#include <span>

namespace infa {

// Flips exactly d distinct, uniformly chosen coordinates of a binary vector.
inline Vector flip_bits(const VectorRef& x, std::size_t d, Rng& rng) {
  const auto m = static_cast<std::size_t>(x.size());
  if (d > m) throw std::invalid_argument("flip_bits: more flips than coordinates");
  Vector y = x;
  for (std::size_t i : sample_without_replacement(rng, m, d)) {
    auto& v = y[static_cast<Eigen::Index>(i)];
    v = v != 0.0 ? 0.0 : 1.0;
  }
  return y;
}

// Moves x by a total Manhattan amount spread over a random number of randomly
// chosen coordinates (flat Dirichlet weights, random signs), then clips to
// [-1,1]. Clipping can only shorten the move.
inline Vector perturb_manhattan(const VectorRef& x, double amount, Rng& rng) {
  if (!(amount > 0.0)) throw std::invalid_argument("perturb_manhattan: amount must be > 0");
  const auto m = static_cast<std::size_t>(x.size());
  const std::size_t count = 1 + uniform_index(rng, m);
  auto idx = sample_without_replacement(rng, m, count);
  std::exponential_distribution<double> expo(1.0);
  std::vector<double> w(count);
  for (auto& v : w) v = expo(rng);
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  Vector y = x;
  for (std::size_t j = 0; j < count; ++j) {
    const double step = amount * w[j] / total * (coin(rng) ? 1.0 : -1.0);
    auto& v = y[static_cast<Eigen::Index>(idx[j])];
    v = std::clamp(v + step, -1.0, 1.0);
  }
  return y;
}

struct SyntheticNonMember {
  Vector x;
  int label = 0;            // label of the base member
  double distance = 0.0;    // recomputed distance to the training set
  std::size_t nearest = 0;  // index of the nearest training vector
  double target = 0.0;      // requested flip count or Manhattan amount
};

struct SynthesisOptions {
  std::size_t per_distance = 5;
  std::size_t oversampling = 100;  // attempts allowed per requested vector
  bool same_label_neighbor = true;
  bool strict = true;  // throw when a group stays short instead of returning fewer
};

// Acceptance rules for generated non-members: no collision with a member,
// and (optionally) the nearest member carries the base label. Keeps a
// reference to `train`, which must outlive the filter.
class NonMemberFilter {
 public:
  NonMemberFilter(const LabeledDataset& train, Metric metric)
      : train_(&train), index_(train.features, metric) {}

  const NearestNeighborIndex& index() const { return index_; }
  const LabeledDataset& train() const { return *train_; }

  std::optional<Nearest> accept(const VectorRef& v, int label, bool same_label) const {
    Nearest n = index_.nearest(v);
    if (n.distance == 0.0) return std::nullopt;
    if (same_label && train_->labels[n.index] != label) return std::nullopt;
    return n;
  }

 private:
  const LabeledDataset* train_;
  NearestNeighborIndex index_;
};

namespace detail {

template <class Make>
void synthesize_group(const NonMemberFilter& filter, int label, double target, const SynthesisOptions& opts,
                      Rng& rng, Make make, std::vector<SyntheticNonMember>& out) {
  std::size_t found = 0;
  const std::size_t budget = opts.oversampling * opts.per_distance;
  for (std::size_t attempt = 0; attempt < budget && found < opts.per_distance; ++attempt) {
    Vector v = make(rng);
    if (auto n = filter.accept(v, label, opts.same_label_neighbor)) {
      out.push_back({std::move(v), label, n->distance, n->index, target});
      ++found;
    }
  }
  if (found < opts.per_distance && opts.strict)
    throw Error("synthesize_nonmembers: only " + std::to_string(found) + " of " +
                std::to_string(opts.per_distance) + " vectors accepted at target " + std::to_string(target) +
                " after " + std::to_string(budget) + " attempts");
}

inline void check_base(const NonMemberFilter& filter, const VectorRef& base) {
  if (filter.index().nearest(base).distance != 0.0)
    throw std::invalid_argument("synthesize_nonmembers: base vector is not a training member");
}

}  // namespace detail

// Flips exactly d random bits of a member for every requested d, keeping
// vectors that pass the filter, with their recomputed distance.
inline std::vector<SyntheticNonMember> synthesize_nonmembers_binary(const VectorRef& base, int label,
                                                                    const NonMemberFilter& filter,
                                                                    std::span<const std::size_t> distances,
                                                                    const SynthesisOptions& opts,
                                                                    std::uint64_t seed) {
  if (filter.train().domain.kind != DomainKind::Binary)
    throw std::invalid_argument("synthesize_nonmembers_binary: training set is not binary");
  detail::check_base(filter, base);
  const auto m = static_cast<std::size_t>(base.size());
  std::vector<SyntheticNonMember> out;
  for (std::size_t d : distances) {
    if (d == 0) throw std::invalid_argument("synthesize_nonmembers_binary: distance 0 would be a member");
    if (d > m) throw std::invalid_argument("synthesize_nonmembers_binary: distance exceeds dimension");
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(d)));
    detail::synthesize_group(filter, label, static_cast<double>(d), opts, rng,
                             [&](Rng& g) { return flip_bits(base, d, g); }, out);
  }
  return out;
}

inline std::size_t continuous_group_count(double max_distance, double step) {
  if (!(step > 0.0)) throw std::invalid_argument("step must be > 0");
  if (!(max_distance >= step)) throw std::invalid_argument("max_distance must be >= step");
  return static_cast<std::size_t>(std::ceil(max_distance / step - 1e-9));
}

// Manhattan groups step, 2*step, ..., up to max_distance; each perturbation
// moves the base by exactly the group amount before clipping.
inline std::vector<SyntheticNonMember> synthesize_nonmembers_continuous(const VectorRef& base, int label,
                                                                        const NonMemberFilter& filter,
                                                                        double max_distance, double step,
                                                                        const SynthesisOptions& opts,
                                                                        std::uint64_t seed) {
  if (filter.train().domain.kind != DomainKind::Continuous)
    throw std::invalid_argument("synthesize_nonmembers_continuous: training set is not continuous");
  detail::check_base(filter, base);
  const std::size_t groups = continuous_group_count(max_distance, step);
  std::vector<SyntheticNonMember> out;
  for (std::size_t g = 1; g <= groups; ++g) {
    const double amount = static_cast<double>(g) * step;
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(g)));
    detail::synthesize_group(filter, label, amount, opts, rng,
                             [&](Rng& r) { return perturb_manhattan(base, amount, r); }, out);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Neighbour samplers for the non-member branch of SMI.

struct Neighbor {
  Vector x;
  int label = 0;
};

class NeighborSampler {
 public:
  virtual ~NeighborSampler() = default;
  virtual std::string name() const = 0;
  // A non-member within distance r of the member x0 (label c(x0)).
  virtual Neighbor sample(const VectorRef& x0, int label, double r, Rng& rng) const = 0;
};

// Flip/perturb generator with the non-member filter: binary draws a flip
// count uniformly from [1, floor(r)], continuous a Manhattan amount from (0, r].
class SyntheticNeighborSampler : public NeighborSampler {
 public:
  SyntheticNeighborSampler(const LabeledDataset& train, Metric metric, std::size_t max_attempts = 1000)
      : filter_(train, metric), metric_(metric), max_attempts_(max_attempts) {
    check_compatible(metric, train.domain);
  }

  std::string name() const override { return "synthetic"; }

  Neighbor sample(const VectorRef& x0, int label, double r, Rng& rng) const override {
    if (!(r > 0.0)) throw std::invalid_argument("neighbour radius must be > 0");
    const auto m = static_cast<std::size_t>(x0.size());
    const bool binary = filter_.train().domain.kind == DomainKind::Binary;
    const std::size_t max_flips = binary ? std::min<std::size_t>(m, static_cast<std::size_t>(std::floor(r))) : 0;
    if (binary && max_flips == 0) throw std::invalid_argument("binary neighbour radius must be >= 1");
    for (std::size_t attempt = 0; attempt < max_attempts_; ++attempt) {
      Vector v;
      if (binary) {
        v = flip_bits(x0, 1 + uniform_index(rng, max_flips), rng);
      } else {
        double amount = r * (1.0 - uniform01(rng));
        v = perturb_manhattan(x0, std::min(amount, 2.0 * static_cast<double>(m)), rng);
      }
      if (distance(v, x0, metric_) > r) continue;
      if (filter_.accept(v, label, true)) return {std::move(v), label};
    }
    throw Error("neighbour sampling failed after " + std::to_string(max_attempts_) + " attempts");
  }

 private:
  NonMemberFilter filter_;
  Metric metric_;
  std::size_t max_attempts_;
};

// Empirical induced distribution: a uniform draw from the population points
// inside B(x0, r) that are not training members; when the ball holds none,
// the synthetic generator is used instead.
class InducedNeighborSampler : public NeighborSampler {
 public:
  InducedNeighborSampler(const LabeledDataset& population, const LabeledDataset& train, Metric metric,
                         std::size_t max_attempts = 1000)
      : population_(&population), index_(population.features, metric), fallback_(train, metric, max_attempts) {
    NearestNeighborIndex train_index(train.features, metric);
    is_member_.resize(population.size());
    for (std::size_t i = 0; i < population.size(); ++i)
      is_member_[i] = train_index.nearest(population.record(i)).distance == 0.0;
  }

  std::string name() const override { return "induced"; }

  Neighbor sample(const VectorRef& x0, int label, double r, Rng& rng) const override {
    if (!(r > 0.0)) throw std::invalid_argument("neighbour radius must be > 0");
    auto inside = index_.within(x0, r);
    std::erase_if(inside, [&](std::size_t i) { return is_member_[i]; });
    if (inside.empty()) return fallback_.sample(x0, label, r, rng);
    const std::size_t pick = inside[uniform_index(rng, inside.size())];
    return {population_->record(pick), population_->labels[pick]};
  }

  // True when B(x0, r) holds a population point that is not a member.
  bool ball_has_population(const VectorRef& x0, double r) const {
    for (std::size_t i : index_.within(x0, r))
      if (!is_member_[i]) return true;
    return false;
  }

 private:
  const LabeledDataset* population_;
  NearestNeighborIndex index_;
  SyntheticNeighborSampler fallback_;
  std::vector<bool> is_member_;
};

}  // namespace infa
