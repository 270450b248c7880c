#pragma once

#include "infa/common.hpp"

#include <cmath>
#include <limits>
#include <optional>

namespace infa {

enum class DomainKind { Binary, Continuous };

// D^m: {0,1}^m or [-1,1]^m.
struct FeatureDomain {
  DomainKind kind = DomainKind::Binary;
  std::size_t dimension = 1;

  static FeatureDomain binary(std::size_t m) { return make(DomainKind::Binary, m); }
  static FeatureDomain continuous(std::size_t m) { return make(DomainKind::Continuous, m); }

  static FeatureDomain make(DomainKind kind, std::size_t m) {
    if (m == 0) throw std::invalid_argument("FeatureDomain: dimension must be >= 1");
    return FeatureDomain{kind, m};
  }

  double lower() const { return kind == DomainKind::Binary ? 0.0 : -1.0; }
  double upper() const { return 1.0; }
  // diam_{d_1}(D): the largest per-coordinate gap.
  double coordinate_diameter() const { return upper() - lower(); }

  bool contains(const VectorRef& x) const {
    if (static_cast<std::size_t>(x.size()) != dimension) return false;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      double v = x[i];
      if (kind == DomainKind::Binary) {
        if (v != 0.0 && v != 1.0) return false;
      } else if (!(v >= -1.0 && v <= 1.0)) {
        return false;
      }
    }
    return true;
  }

  void validate(const VectorRef& x) const {
    if (static_cast<std::size_t>(x.size()) != dimension)
      throw std::invalid_argument("feature vector length " + std::to_string(x.size()) +
                                  " does not match domain dimension " +
                                  std::to_string(dimension));
    if (!contains(x)) throw std::invalid_argument("feature vector outside domain bounds");
  }

  bool operator==(const FeatureDomain&) const = default;
};

inline std::string_view to_string(DomainKind k) {
  return k == DomainKind::Binary ? "binary" : "continuous";
}

inline DomainKind parse_domain_kind(std::string_view s) {
  if (s == "binary") return DomainKind::Binary;
  if (s == "continuous") return DomainKind::Continuous;
  throw std::invalid_argument("unknown domain kind: " + std::string(s));
}

enum class Metric { Hamming, Manhattan, Euclidean };

inline std::string_view to_string(Metric m) {
  switch (m) {
    case Metric::Hamming: return "hamming";
    case Metric::Manhattan: return "manhattan";
    case Metric::Euclidean: return "euclidean";
  }
  return "?";
}

inline Metric parse_metric(std::string_view s) {
  if (s == "hamming") return Metric::Hamming;
  if (s == "manhattan") return Metric::Manhattan;
  if (s == "euclidean") return Metric::Euclidean;
  throw std::invalid_argument("unknown metric: " + std::string(s));
}

// Hamming only on binary domains; Manhattan/Euclidean only on continuous ones.
inline bool compatible(Metric metric, const FeatureDomain& domain) {
  return (metric == Metric::Hamming) == (domain.kind == DomainKind::Binary);
}

inline void check_compatible(Metric metric, const FeatureDomain& domain) {
  if (!compatible(metric, domain))
    throw std::invalid_argument(std::string(to_string(metric)) + " metric is not defined on " +
                                std::string(to_string(domain.kind)) + " domains");
}

inline Metric default_metric(const FeatureDomain& domain) {
  return domain.kind == DomainKind::Binary ? Metric::Hamming : Metric::Manhattan;
}

inline double distance(const VectorRef& x, const VectorRef& y, Metric metric) {
  if (x.size() != y.size())
    throw std::invalid_argument("distance: dimension mismatch (" + std::to_string(x.size()) +
                                " vs " + std::to_string(y.size()) + ")");
  const Eigen::Index m = x.size();
  switch (metric) {
    case Metric::Hamming: {
      std::size_t count = 0;
      for (Eigen::Index i = 0; i < m; ++i) count += (x[i] != y[i]);
      return static_cast<double>(count);
    }
    case Metric::Manhattan: {
      double s = 0.0;
      for (Eigen::Index i = 0; i < m; ++i) s += std::abs(x[i] - y[i]);
      return s;
    }
    case Metric::Euclidean: {
      double s = 0.0;
      for (Eigen::Index i = 0; i < m; ++i) {
        double d = x[i] - y[i];
        s += d * d;
      }
      return std::sqrt(s);
    }
  }
  return 0.0;
}

inline double distance(const VectorRef& x, const VectorRef& y, Metric metric,
                       const FeatureDomain& domain) {
  check_compatible(metric, domain);
  domain.validate(x);
  domain.validate(y);
  return distance(x, y, metric);
}

// max_i |x_i - y_i|; the lower end of the conserving-metric sandwich.
inline double chebyshev(const VectorRef& x, const VectorRef& y) {
  if (x.size() != y.size()) throw std::invalid_argument("chebyshev: dimension mismatch");
  return (x - y).cwiseAbs().maxCoeff();
}

struct Nearest {
  double distance = std::numeric_limits<double>::infinity();
  std::size_t index = 0;
};

// Minimum distance from x to the columns of `set`; ties go to the lowest index.
inline Nearest distance_to_set(const VectorRef& x, const Matrix& set, Metric metric) {
  if (set.cols() == 0) throw std::invalid_argument("distance_to_set: empty set");
  if (set.rows() != x.size()) throw std::invalid_argument("distance_to_set: dimension mismatch");
  Nearest best;
  for (Eigen::Index j = 0; j < set.cols(); ++j) {
    double d = distance(x, set.col(j), metric);
    if (d < best.distance) {
      best.distance = d;
      best.index = static_cast<std::size_t>(j);
    }
  }
  return best;
}

// Repeated nearest-neighbour queries against one fixed set. Binary Hamming
// queries run on packed bit rows; results match distance_to_set exactly.
class NearestNeighborIndex {
 public:
  NearestNeighborIndex(const Matrix& set, Metric metric) : set_(&set), metric_(metric) {
    if (set.cols() == 0) throw std::invalid_argument("NearestNeighborIndex: empty set");
    if (metric == Metric::Hamming) {
      words_ = (static_cast<std::size_t>(set.rows()) + 63) / 64;
      packed_.assign(words_ * static_cast<std::size_t>(set.cols()), 0);
      for (Eigen::Index j = 0; j < set.cols(); ++j) pack(set.col(j), &packed_[words_ * j]);
    }
  }

  Metric metric() const { return metric_; }
  std::size_t size() const { return static_cast<std::size_t>(set_->cols()); }

  Nearest nearest(const VectorRef& x) const {
    if (x.size() != set_->rows()) throw std::invalid_argument("nearest: dimension mismatch");
    if (metric_ != Metric::Hamming) return scan(x);
    std::vector<std::uint64_t> q(words_);
    pack(x, q.data());
    Nearest best;
    std::size_t best_count = std::numeric_limits<std::size_t>::max();
    for (std::size_t j = 0; j < size(); ++j) {
      std::size_t c = hamming_words(q.data(), &packed_[words_ * j], best_count);
      if (c < best_count) {
        best_count = c;
        best.index = j;
        if (c == 0) break;
      }
    }
    best.distance = static_cast<double>(best_count);
    return best;
  }

  // Indices of every member within distance r of x, ascending.
  std::vector<std::size_t> within(const VectorRef& x, double r) const {
    std::vector<std::size_t> out;
    if (metric_ == Metric::Hamming) {
      std::vector<std::uint64_t> q(words_);
      pack(x, q.data());
      for (std::size_t j = 0; j < size(); ++j)
        if (static_cast<double>(hamming_words(q.data(), &packed_[words_ * j],
                                              std::numeric_limits<std::size_t>::max())) <= r)
          out.push_back(j);
    } else {
      for (std::size_t j = 0; j < size(); ++j)
        if (distance(x, set_->col(static_cast<Eigen::Index>(j)), metric_) <= r) out.push_back(j);
    }
    return out;
  }

 private:
  void pack(const VectorRef& x, std::uint64_t* out) const {
    std::fill(out, out + words_, 0);
    for (Eigen::Index i = 0; i < x.size(); ++i)
      if (x[i] != 0.0) out[i / 64] |= std::uint64_t{1} << (i % 64);
  }

  std::size_t hamming_words(const std::uint64_t* a, const std::uint64_t* b,
                            std::size_t bound) const {
    std::size_t c = 0;
    for (std::size_t w = 0; w < words_; ++w) {
      c += static_cast<std::size_t>(std::popcount(a[w] ^ b[w]));
      if (c > bound) return c;
    }
    return c;
  }

  Nearest scan(const VectorRef& x) const {
    Nearest best;
    const Eigen::Index m = x.size();
    for (Eigen::Index j = 0; j < set_->cols(); ++j) {
      double d;
      if (metric_ == Metric::Manhattan) {
        d = 0.0;
        for (Eigen::Index i = 0; i < m && d <= best.distance; ++i)
          d += std::abs(x[i] - (*set_)(i, j));
      } else {
        d = distance(x, set_->col(j), metric_);
      }
      if (d < best.distance) {
        best.distance = d;
        best.index = static_cast<std::size_t>(j);
      }
    }
    return best;
  }

  const Matrix* set_;
  Metric metric_;
  std::size_t words_ = 0;
  std::vector<std::uint64_t> packed_;
};

// ---------------------------------------------------------------------------
// Portions and siblings

// A feature vector with the entries in `unknown` masked out. Masked entries
// hold NaN in `values()`.
class Portion {
 public:
  const Vector& values() const { return values_; }
  const std::vector<std::size_t>& unknown() const { return unknown_; }
  std::size_t dimension() const { return static_cast<std::size_t>(values_.size()); }
  bool is_masked(std::size_t i) const { return std::isnan(values_[static_cast<Eigen::Index>(i)]); }

  // True when x agrees with every known entry.
  bool consistent_with(const VectorRef& x) const {
    if (x.size() != values_.size()) return false;
    for (Eigen::Index i = 0; i < x.size(); ++i)
      if (!std::isnan(values_[i]) && values_[i] != x[i]) return false;
    return true;
  }

 private:
  friend Portion make_portion(const VectorRef& x, std::vector<std::size_t> unknown);
  Vector values_;
  std::vector<std::size_t> unknown_;
};

inline Portion make_portion(const VectorRef& x, std::vector<std::size_t> unknown) {
  const auto m = static_cast<std::size_t>(x.size());
  std::sort(unknown.begin(), unknown.end());
  if (std::adjacent_find(unknown.begin(), unknown.end()) != unknown.end())
    throw std::invalid_argument("make_portion: duplicate unknown index");
  if (unknown.empty()) throw std::invalid_argument("make_portion: unknown set is empty");
  if (unknown.size() >= m)
    throw std::invalid_argument("make_portion: unknown set must leave a known feature");
  if (unknown.back() >= m) throw std::invalid_argument("make_portion: index out of range");
  Portion p;
  p.values_ = x;
  for (std::size_t i : unknown) p.values_[static_cast<Eigen::Index>(i)] = std::numeric_limits<double>::quiet_NaN();
  p.unknown_ = std::move(unknown);
  return p;
}

inline constexpr std::size_t kDefaultSiblingCap = std::size_t{1} << 20;

// Bin index of a value; binary values are their own bin. Continuous bins
// split [-1,1] into `bins` equal intervals.
inline std::size_t bin_of(double v, std::size_t bins, DomainKind kind) {
  if (kind == DomainKind::Binary) return v != 0.0 ? 1 : 0;
  auto b = static_cast<std::ptrdiff_t>(std::floor((v + 1.0) / 2.0 * static_cast<double>(bins)));
  return static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(b, 0, static_cast<std::ptrdiff_t>(bins) - 1));
}

inline std::vector<double> bin_representatives(std::size_t bins, DomainKind kind) {
  if (kind == DomainKind::Binary) {
    if (bins != 2) throw std::invalid_argument("binary siblings use exactly 2 bins");
    return {0.0, 1.0};
  }
  if (bins < 2 || bins > 10)
    throw std::invalid_argument("continuous siblings use between 2 and 10 bins");
  std::vector<double> reps(bins);
  for (std::size_t b = 0; b < bins; ++b)
    reps[b] = -1.0 + (2.0 * static_cast<double>(b) + 1.0) / static_cast<double>(bins);
  return reps;
}

// Every completion of a portion over the bin representatives. Candidate c
// assigns unknown feature j the digit (c / bins^(s-1-j)) % bins, so the
// first unknown index is the most significant digit.
class SiblingSet {
 public:
  const Portion& portion() const { return portion_; }
  DomainKind kind() const { return kind_; }
  std::size_t bins() const { return reps_.size(); }
  const std::vector<double>& representatives() const { return reps_; }
  std::size_t size() const { return static_cast<std::size_t>(candidates_.cols()); }
  // |S| x N values taken at the unknown indices.
  const Matrix& candidates() const { return candidates_; }

  Vector materialize(std::size_t c) const {
    Vector x = portion_.values();
    const auto& s = portion_.unknown();
    for (std::size_t j = 0; j < s.size(); ++j)
      x[static_cast<Eigen::Index>(s[j])] = candidates_(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(c));
    return x;
  }

  Matrix materialize_block(std::size_t start, std::size_t count) const {
    Matrix out(static_cast<Eigen::Index>(portion_.dimension()), static_cast<Eigen::Index>(count));
    for (std::size_t c = 0; c < count; ++c) out.col(static_cast<Eigen::Index>(c)) = materialize(start + c);
    return out;
  }

  // Candidate matching x bin-for-bin at the unknown indices (exact match on
  // binary domains). Empty when x disagrees with the portion elsewhere.
  std::optional<std::size_t> index_of(const VectorRef& x) const {
    const auto& s = portion_.unknown();
    for (Eigen::Index i = 0; i < x.size(); ++i)
      if (!portion_.is_masked(static_cast<std::size_t>(i)) && portion_.values()[i] != x[i])
        return std::nullopt;
    std::size_t c = 0;
    for (std::size_t j = 0; j < s.size(); ++j) {
      double v = x[static_cast<Eigen::Index>(s[j])];
      if (kind_ == DomainKind::Binary && v != 0.0 && v != 1.0) return std::nullopt;
      c = c * bins() + bin_of(v, bins(), kind_);
    }
    return c;
  }

  // Distance from candidate c to x, which must agree with the portion
  // outside the unknown indices.
  double distance_to(std::size_t c, const VectorRef& x, Metric metric) const {
    const auto& s = portion_.unknown();
    double acc = 0.0;
    for (std::size_t j = 0; j < s.size(); ++j) {
      double d = candidates_(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(c)) -
                 x[static_cast<Eigen::Index>(s[j])];
      switch (metric) {
        case Metric::Hamming: acc += (d != 0.0); break;
        case Metric::Manhattan: acc += std::abs(d); break;
        case Metric::Euclidean: acc += d * d; break;
      }
    }
    return metric == Metric::Euclidean ? std::sqrt(acc) : acc;
  }

 private:
  friend SiblingSet enumerate_siblings(const Portion&, DomainKind, std::size_t, std::size_t);
  Portion portion_;
  DomainKind kind_ = DomainKind::Binary;
  std::vector<double> reps_;
  Matrix candidates_;
};

inline SiblingSet enumerate_siblings(const Portion& portion, DomainKind kind, std::size_t bins,
                                     std::size_t cap = kDefaultSiblingCap) {
  SiblingSet set;
  set.reps_ = bin_representatives(bins, kind);
  const std::size_t s = portion.unknown().size();
  std::size_t total = 1;
  for (std::size_t j = 0; j < s; ++j) {
    if (total > cap / bins)
      throw Error("enumerate_siblings: " + std::to_string(bins) + "^" + std::to_string(s) +
                  " candidates exceed the cap of " + std::to_string(cap));
    total *= bins;
  }
  set.portion_ = portion;
  set.kind_ = kind;
  set.candidates_.resize(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(total));
  for (std::size_t c = 0; c < total; ++c) {
    std::size_t rest = c;
    for (std::size_t j = s; j-- > 0;) {
      set.candidates_(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(c)) = set.reps_[rest % bins];
      rest /= bins;
    }
  }
  return set;
}

inline SiblingSet enumerate_siblings(const Portion& portion, const FeatureDomain& domain,
                                     std::size_t bins, std::size_t cap = kDefaultSiblingCap) {
  if (portion.dimension() != domain.dimension)
    throw std::invalid_argument("enumerate_siblings: portion does not match domain");
  return enumerate_siblings(portion, domain.kind, bins, cap);
}

// Smallest r for which every sibling with i unknowns lies in B_d(x, r)
// ({0,1}^m for Hamming, [-1,1]^m otherwise).
inline double radius_for_unknowns(Metric metric, std::size_t i) {
  if (i == 0) throw std::invalid_argument("radius_for_unknowns: need at least one unknown");
  const double n = static_cast<double>(i);
  switch (metric) {
    case Metric::Hamming: return n;
    case Metric::Manhattan: return 2.0 * n;
    case Metric::Euclidean: return std::sqrt(4.0 * n);
  }
  return 0.0;
}

// Expected distance between x and a guess whose m' unknown coordinates are
// drawn uniformly from the domain: m'/2 bits, or 2m'/3 under Manhattan on [-1,1].
inline double expected_random_guess_distance(Metric metric, std::size_t unknowns) {
  if (unknowns == 0) throw std::invalid_argument("expected_random_guess_distance: m' must be >= 1");
  const double n = static_cast<double>(unknowns);
  switch (metric) {
    case Metric::Hamming: return n / 2.0;
    case Metric::Manhattan: return 2.0 * n / 3.0;
    case Metric::Euclidean: break;
  }
  throw std::invalid_argument("expected_random_guess_distance: unsupported metric euclidean");
}

}  // namespace infa
