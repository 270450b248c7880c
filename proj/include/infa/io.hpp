#pragma once

#include "infa/dataset.hpp"
#include "infa/kmeans.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

namespace infa {

// Per-column affine map [min, max] -> [-1, 1]. Constant columns map to 0.
struct Normalizer {
  std::vector<double> min;
  std::vector<double> max;

  double apply(std::size_t col, double v) const {
    const double span = max[col] - min[col];
    return span == 0.0 ? 0.0 : 2.0 * (v - min[col]) / span - 1.0;
  }

  double invert(std::size_t col, double v) const {
    const double span = max[col] - min[col];
    return span == 0.0 ? min[col] : (v + 1.0) * 0.5 * span + min[col];
  }

  Vector apply(const VectorRef& raw) const {
    Vector out(raw.size());
    for (Eigen::Index i = 0; i < raw.size(); ++i) out[i] = apply(static_cast<std::size_t>(i), raw[i]);
    return out;
  }

  Vector invert(const VectorRef& normalized) const {
    Vector out(normalized.size());
    for (Eigen::Index i = 0; i < normalized.size(); ++i) out[i] = invert(static_cast<std::size_t>(i), normalized[i]);
    return out;
  }

  static Normalizer fit(const Matrix& raw) {
    Normalizer n;
    for (Eigen::Index i = 0; i < raw.rows(); ++i) {
      n.min.push_back(raw.row(i).minCoeff());
      n.max.push_back(raw.row(i).maxCoeff());
    }
    return n;
  }
};

struct DatasetSpec {
  std::string path;
  std::string label_column = "label";  // or "derive:kmeans(k)"
  DomainKind kind = DomainKind::Binary;
  double train_fraction = 0.5;
  double test_fraction = 0.25;
  bool normalize = true;  // continuous columns only
  std::size_t kmeans_iters = 100;
  std::uint64_t seed = 0;
};

struct LoadedDataset {
  LabeledDataset data;
  SplitDataset split;
  std::vector<std::string> feature_names;
  std::vector<std::string> class_names;  // original label text of class j
  std::optional<Normalizer> normalizer;
};

namespace detail {

inline std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    auto comma = line.find(',', start);
    out.push_back(trim(std::string_view(line).substr(start, comma == std::string::npos ? std::string::npos : comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

inline std::optional<double> parse_number(const std::string& s) {
  double v = 0.0;
  const char* first = s.data();
  if (!s.empty() && s[0] == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

// "derive:kmeans(k)" -> k
inline std::optional<std::size_t> parse_kmeans_label(const std::string& spec) {
  const std::string prefix = "derive:kmeans(";
  if (spec.rfind(prefix, 0) != 0) return std::nullopt;
  if (spec.size() <= prefix.size() + 1 || spec.back() != ')')
    throw std::invalid_argument("malformed label rule: " + spec);
  auto k = parse_number(spec.substr(prefix.size(), spec.size() - prefix.size() - 1));
  if (!k || *k < 1 || *k != std::floor(*k)) throw std::invalid_argument("malformed label rule: " + spec);
  return static_cast<std::size_t>(*k);
}

}  // namespace detail

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

inline CsvTable read_csv(std::istream& is) {
  CsvTable t;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    auto cells = detail::split_csv_line(line);
    if (t.header.empty()) {
      t.header = std::move(cells);
      continue;
    }
    if (cells.size() != t.header.size())
      throw std::invalid_argument("csv line " + std::to_string(line_no) + ": expected " +
                                  std::to_string(t.header.size()) + " cells, found " + std::to_string(cells.size()));
    t.rows.push_back(std::move(cells));
  }
  if (t.header.empty()) throw std::invalid_argument("csv: missing header row");
  return t;
}

// Parses, validates, normalises and labels a CSV table, then splits it
// with the spec's seed.
inline LoadedDataset load_dataset(std::istream& is, const DatasetSpec& spec) {
  CsvTable t = read_csv(is);
  if (t.rows.empty()) throw std::invalid_argument("csv: no data rows");
  auto kmeans_k = detail::parse_kmeans_label(spec.label_column);
  std::optional<std::size_t> label_col;
  if (!kmeans_k) {
    auto it = std::find(t.header.begin(), t.header.end(), spec.label_column);
    if (it == t.header.end()) throw std::invalid_argument("csv: unknown label column '" + spec.label_column + "'");
    label_col = static_cast<std::size_t>(it - t.header.begin());
  }

  LoadedDataset out;
  for (std::size_t c = 0; c < t.header.size(); ++c)
    if (c != label_col) out.feature_names.push_back(t.header[c]);
  const std::size_t m = out.feature_names.size();
  if (m == 0) throw std::invalid_argument("csv: no feature columns");
  const std::size_t n = t.rows.size();
  Matrix raw(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n));
  for (std::size_t r = 0; r < n; ++r) {
    std::size_t f = 0;
    for (std::size_t c = 0; c < t.header.size(); ++c) {
      if (c == label_col) continue;
      auto v = detail::parse_number(t.rows[r][c]);
      if (!v || !std::isfinite(*v))
        throw std::invalid_argument("csv row " + std::to_string(r + 1) + ", column '" + t.header[c] +
                                    "': non-numeric cell '" + t.rows[r][c] + "'");
      raw(static_cast<Eigen::Index>(f++), static_cast<Eigen::Index>(r)) = *v;
    }
  }

  LabeledDataset& d = out.data;
  d.domain = FeatureDomain::make(spec.kind, m);
  if (spec.kind == DomainKind::Binary) {
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t f = 0; f < m; ++f) {
        double v = raw(static_cast<Eigen::Index>(f), static_cast<Eigen::Index>(r));
        if (v != 0.0 && v != 1.0)
          throw std::invalid_argument("csv row " + std::to_string(r + 1) + ", column '" + out.feature_names[f] +
                                      "': binary feature is not 0 or 1");
      }
    d.features = raw;
  } else if (spec.normalize) {
    out.normalizer = Normalizer::fit(raw);
    d.features.resize(raw.rows(), raw.cols());
    for (Eigen::Index j = 0; j < raw.cols(); ++j) d.features.col(j) = out.normalizer->apply(raw.col(j));
  } else {
    if ((raw.array() < -1.0).any() || (raw.array() > 1.0).any())
      throw std::invalid_argument("csv: continuous features outside [-1,1]; enable normalization");
    d.features = raw;
  }

  if (kmeans_k) {
    if (*kmeans_k > n) throw std::invalid_argument("csv: kmeans label rule asks for more clusters than rows");
    d.labels = kmeans_labels(d.features, *kmeans_k, spec.kmeans_iters, derive_seed(spec.seed, "kmeans-labels"));
    d.classes = *kmeans_k;
    for (std::size_t c = 0; c < d.classes; ++c) out.class_names.push_back(std::to_string(c));
  } else {
    std::vector<std::string> names;
    for (auto& row : t.rows) names.push_back(row[*label_col]);
    std::vector<std::string> distinct = names;
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    const bool numeric = std::all_of(distinct.begin(), distinct.end(),
                                     [](const std::string& s) { return detail::parse_number(s).has_value(); });
    if (numeric)
      std::stable_sort(distinct.begin(), distinct.end(), [](const std::string& a, const std::string& b) {
        return *detail::parse_number(a) < *detail::parse_number(b);
      });
    std::map<std::string, int> code;
    for (std::size_t c = 0; c < distinct.size(); ++c) code[distinct[c]] = static_cast<int>(c);
    for (auto& s : names) d.labels.push_back(code[s]);
    d.classes = distinct.size();
    out.class_names = distinct;
  }
  d.validate();
  out.split = split_dataset(d, spec.train_fraction, spec.test_fraction, derive_seed(spec.seed, "split"));
  return out;
}

inline LoadedDataset load_dataset(const DatasetSpec& spec) {
  std::ifstream is(spec.path);
  if (!is) throw std::invalid_argument("cannot open dataset " + spec.path);
  return load_dataset(is, spec);
}

inline void write_csv(std::ostream& os, const LabeledDataset& data) {
  for (std::size_t f = 0; f < data.dimension(); ++f) os << 'f' << f << ',';
  os << "label\n";
  char buf[32];
  for (std::size_t i = 0; i < data.size(); ++i) {
    for (std::size_t f = 0; f < data.dimension(); ++f) {
      double v = data.features(static_cast<Eigen::Index>(f), static_cast<Eigen::Index>(i));
      auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
      os.write(buf, p - buf) << ',';
    }
    os << data.labels[i] << '\n';
  }
}

enum class SynthKind { BinaryClusters, ContinuousClusters };

inline std::string_view to_string(SynthKind k) {
  return k == SynthKind::BinaryClusters ? "binary-clusters" : "continuous-clusters";
}

inline SynthKind parse_synth_kind(std::string_view s) {
  if (s == "binary-clusters") return SynthKind::BinaryClusters;
  if (s == "continuous-clusters") return SynthKind::ContinuousClusters;
  throw std::invalid_argument("unknown synthetic dataset kind: " + std::string(s));
}

// k random centres and balanced labels. Binary points copy their centre and
// flip each bit with probability `spread` (at most 0.5); continuous points
// add Gaussian noise of standard deviation `spread` and clip to [-1,1].
inline LabeledDataset synth_dataset(SynthKind kind, std::size_t m, std::size_t n, std::size_t k, double spread,
                                    std::uint64_t seed) {
  if (m == 0 || n == 0 || k == 0) throw std::invalid_argument("synth_dataset: m, n and k must be >= 1");
  if (k > n) throw std::invalid_argument("synth_dataset: more classes than points");
  if (!(spread >= 0.0) || (kind == SynthKind::BinaryClusters && spread > 0.5))
    throw std::invalid_argument("synth_dataset: spread must lie in [0, 0.5] for binary data and be >= 0 otherwise");
  const bool binary = kind == SynthKind::BinaryClusters;
  Rng crng(derive_seed(seed, "centres"));
  Matrix centres(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(k));
  for (Eigen::Index c = 0; c < centres.cols(); ++c)
    for (Eigen::Index i = 0; i < centres.rows(); ++i)
      centres(i, c) = binary ? (coin(crng) ? 1.0 : 0.0) : uniform_real(crng, -0.8, 0.8);

  LabeledDataset d;
  d.domain = binary ? FeatureDomain::binary(m) : FeatureDomain::continuous(m);
  d.classes = k;
  d.labels.resize(n);
  for (std::size_t i = 0; i < n; ++i) d.labels[i] = static_cast<int>(i % k);
  Rng rng(derive_seed(seed, "points"));
  std::shuffle(d.labels.begin(), d.labels.end(), rng);
  d.features.resize(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n));
  std::bernoulli_distribution flip(binary ? spread : 0.0);
  std::normal_distribution<double> noise(0.0, 1.0);
  for (std::size_t j = 0; j < n; ++j) {
    const auto col = static_cast<Eigen::Index>(j);
    for (Eigen::Index i = 0; i < d.features.rows(); ++i) {
      const double c = centres(i, d.labels[j]);
      d.features(i, col) = binary ? (flip(rng) ? 1.0 - c : c) : std::clamp(c + spread * noise(rng), -1.0, 1.0);
    }
  }
  return d;
}

}  // namespace infa
