#pragma once

#include "infa/dataset.hpp"

#include <cmath>
#include <fstream>
#include <optional>

namespace infa {

enum class Activation { Tanh, Relu };
enum class Optimizer { Sgd, Adam };
enum class OutputKind { Softmax, Sigmoid };

inline std::string_view to_string(Activation a) { return a == Activation::Tanh ? "tanh" : "relu"; }
inline std::string_view to_string(Optimizer o) { return o == Optimizer::Adam ? "adam" : "sgd"; }

inline Activation parse_activation(std::string_view s) {
  if (s == "tanh") return Activation::Tanh;
  if (s == "relu") return Activation::Relu;
  throw std::invalid_argument("unknown activation: " + std::string(s));
}

inline Optimizer parse_optimizer(std::string_view s) {
  if (s == "adam") return Optimizer::Adam;
  if (s == "sgd") return Optimizer::Sgd;
  throw std::invalid_argument("unknown optimizer: " + std::string(s));
}

struct MlpConfig {
  std::vector<std::size_t> hidden_layers{128};
  Activation activation = Activation::Tanh;
  std::size_t epochs = 100;
  std::size_t batch_size = 64;  // 0 trains full-batch
  double learning_rate = 1e-3;
  Optimizer optimizer = Optimizer::Adam;
  std::uint64_t seed = 0;

  void validate() const {
    for (auto w : hidden_layers)
      if (w == 0) throw std::invalid_argument("MlpConfig: hidden layer width must be >= 1");
    if (epochs == 0) throw std::invalid_argument("MlpConfig: epochs must be >= 1");
    if (!(learning_rate > 0.0)) throw std::invalid_argument("MlpConfig: learning_rate must be > 0");
  }
};

// Weights are (outputs x inputs); inputs and activations are column batches.
struct DenseLayer {
  Matrix weights;
  Vector bias;
};

struct Network {
  Activation activation = Activation::Tanh;
  OutputKind output = OutputKind::Softmax;
  std::vector<DenseLayer> layers;

  std::size_t input_dim() const { return static_cast<std::size_t>(layers.front().weights.cols()); }
  std::size_t output_dim() const { return static_cast<std::size_t>(layers.back().weights.rows()); }
};

class TrainingDiverged : public Error {
 public:
  explicit TrainingDiverged(std::size_t epoch)
      : Error("training diverged: non-finite loss in epoch " + std::to_string(epoch)), epoch(epoch) {}
  std::size_t epoch;
};

inline constexpr double kConfidenceFloor = 1e-12;

namespace detail {

// tanh through exp, which Eigen vectorises for doubles.
inline void tanh_inplace(Matrix& z) {
  z = 1.0 - 2.0 / ((2.0 * z.array().min(40.0).max(-40.0)).exp() + 1.0);
}

inline void hidden_activation(Matrix& z, Activation a) {
  if (a == Activation::Tanh)
    tanh_inplace(z);
  else
    z = z.cwiseMax(0.0);
}

inline void output_activation(Matrix& z, OutputKind kind) {
  if (kind == OutputKind::Sigmoid) {
    z = 1.0 / (1.0 + (-z.array().min(700.0).max(-700.0)).exp());
    return;
  }
  Eigen::RowVectorXd mx = z.colwise().maxCoeff();
  z.rowwise() -= mx;
  z = z.array().exp();
  Eigen::RowVectorXd sum = z.colwise().sum();
  z.array().rowwise() /= sum.array();
}

// Runs layers [first, end) on a pre-activation of layer `first`.
inline Matrix forward_from(const Network& net, std::size_t first, Matrix z) {
  const std::size_t last = net.layers.size() - 1;
  for (std::size_t l = first;; ++l) {
    if (l == last) {
      output_activation(z, net.output);
      return z;
    }
    hidden_activation(z, net.activation);
    const auto& next = net.layers[l + 1];
    Matrix zn = next.weights * z;
    zn.colwise() += next.bias;
    z = std::move(zn);
  }
}

}  // namespace detail

inline Matrix forward(const Network& net, const Matrix& x) {
  if (static_cast<std::size_t>(x.rows()) != net.input_dim())
    throw std::invalid_argument("forward: input dimension " + std::to_string(x.rows()) +
                                " does not match network input " + std::to_string(net.input_dim()));
  Matrix z = net.layers[0].weights * x;
  z.colwise() += net.layers[0].bias;
  return detail::forward_from(net, 0, std::move(z));
}

// Weights uniform in [-1/sqrt(fan_in), 1/sqrt(fan_in)], biases zero.
inline Network init_network(std::size_t inputs, const std::vector<std::size_t>& hidden,
                            std::size_t outputs, Activation activation, OutputKind output, Rng& rng) {
  Network net;
  net.activation = activation;
  net.output = output;
  std::size_t fan_in = inputs;
  auto add = [&](std::size_t out) {
    DenseLayer layer;
    layer.weights.resize(static_cast<Eigen::Index>(out), static_cast<Eigen::Index>(fan_in));
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    for (Eigen::Index r = 0; r < layer.weights.rows(); ++r)
      for (Eigen::Index c = 0; c < layer.weights.cols(); ++c)
        layer.weights(r, c) = uniform_real(rng, -bound, bound);
    layer.bias = Vector::Zero(static_cast<Eigen::Index>(out));
    net.layers.push_back(std::move(layer));
    fan_in = out;
  };
  for (auto w : hidden) add(w);
  add(outputs);
  return net;
}

struct Gradients {
  std::vector<Matrix> weights;
  std::vector<Vector> biases;
};

// Mean loss (softmax cross-entropy or sigmoid binary cross-entropy) of the
// batch x against targets (one-hot columns, or 0/1 for sigmoid). Fills
// `grads` with the exact gradient when non-null.
inline double loss_and_gradients(const Network& net, const Matrix& x, const Matrix& targets,
                                 Gradients* grads) {
  const std::size_t depth = net.layers.size();
  std::vector<Matrix> acts;
  acts.reserve(depth + 1);
  acts.push_back(x);
  for (std::size_t l = 0; l < depth; ++l) {
    Matrix z = net.layers[l].weights * acts.back();
    z.colwise() += net.layers[l].bias;
    if (l + 1 == depth)
      detail::output_activation(z, net.output);
    else
      detail::hidden_activation(z, net.activation);
    acts.push_back(std::move(z));
  }
  const Matrix& p = acts.back();
  const double n = static_cast<double>(x.cols());
  double loss;
  if (net.output == OutputKind::Softmax) {
    loss = -(targets.array() * p.array().max(kConfidenceFloor).log()).sum() / n;
  } else {
    loss = -(targets.array() * p.array().max(kConfidenceFloor).log() +
             (1.0 - targets.array()) * (1.0 - p.array()).max(kConfidenceFloor).log())
                .sum() / n;
  }
  if (!grads) return loss;

  grads->weights.resize(depth);
  grads->biases.resize(depth);
  Matrix delta = (p - targets) / n;
  for (std::size_t l = depth; l-- > 0;) {
    grads->weights[l] = delta * acts[l].transpose();
    grads->biases[l] = delta.rowwise().sum();
    if (l == 0) break;
    Matrix back = net.layers[l].weights.transpose() * delta;
    if (net.activation == Activation::Tanh)
      back.array() *= 1.0 - acts[l].array().square();
    else
      back.array() *= (acts[l].array() > 0.0).cast<double>();
    delta = std::move(back);
  }
  return loss;
}

inline Matrix one_hot(std::span<const int> labels, std::size_t classes) {
  Matrix y = Matrix::Zero(static_cast<Eigen::Index>(classes), static_cast<Eigen::Index>(labels.size()));
  for (std::size_t i = 0; i < labels.size(); ++i) y(labels[i], static_cast<Eigen::Index>(i)) = 1.0;
  return y;
}

// Minibatch training. Returns the mean batch loss of each epoch; on
// full-batch runs that is the loss before the epoch's single update.
inline std::vector<double> fit_network(Network& net, const Matrix& x, const Matrix& targets,
                                       const MlpConfig& cfg) {
  cfg.validate();
  const auto n = static_cast<std::size_t>(x.cols());
  if (n == 0) throw std::invalid_argument("fit_network: empty training set");
  const std::size_t batch = (cfg.batch_size == 0 || cfg.batch_size >= n) ? n : cfg.batch_size;
  const std::size_t depth = net.layers.size();
  constexpr double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;

  std::vector<Matrix> mw(depth), vw(depth);
  std::vector<Vector> mb(depth), vb(depth);
  for (std::size_t l = 0; l < depth; ++l) {
    mw[l] = vw[l] = Matrix::Zero(net.layers[l].weights.rows(), net.layers[l].weights.cols());
    mb[l] = vb[l] = Vector::Zero(net.layers[l].bias.size());
  }

  Rng rng(derive_seed(cfg.seed, "minibatch-order"));
  std::vector<double> epoch_losses;
  epoch_losses.reserve(cfg.epochs);
  Gradients g;
  std::size_t step = 0;
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    if (batch < n) std::shuffle(order.begin(), order.end(), rng);
    double total = 0.0;
    for (std::size_t start = 0; start < n; start += batch) {
      const std::size_t count = std::min(batch, n - start);
      double loss;
      if (count == n) {
        loss = loss_and_gradients(net, x, targets, &g);
      } else {
        std::vector<std::size_t> idx(order.begin() + static_cast<std::ptrdiff_t>(start),
                                     order.begin() + static_cast<std::ptrdiff_t>(start + count));
        loss = loss_and_gradients(net, select_columns(x, idx), select_columns(targets, idx), &g);
      }
      if (!std::isfinite(loss)) throw TrainingDiverged(epoch);
      total += loss * static_cast<double>(count);
      ++step;
      for (std::size_t l = 0; l < depth; ++l) {
        auto& layer = net.layers[l];
        if (cfg.optimizer == Optimizer::Sgd) {
          layer.weights -= cfg.learning_rate * g.weights[l];
          layer.bias -= cfg.learning_rate * g.biases[l];
          continue;
        }
        const double c1 = 1.0 - std::pow(beta1, static_cast<double>(step));
        const double c2 = 1.0 - std::pow(beta2, static_cast<double>(step));
        mw[l] = beta1 * mw[l] + (1.0 - beta1) * g.weights[l];
        vw[l] = beta2 * vw[l] + (1.0 - beta2) * g.weights[l].cwiseAbs2();
        mb[l] = beta1 * mb[l] + (1.0 - beta1) * g.biases[l];
        vb[l] = beta2 * vb[l] + (1.0 - beta2) * g.biases[l].cwiseAbs2();
        layer.weights.array() -=
            cfg.learning_rate * (mw[l].array() / c1) / ((vw[l].array() / c2).sqrt() + eps);
        layer.bias.array() -=
            cfg.learning_rate * (mb[l].array() / c1) / ((vb[l].array() / c2).sqrt() + eps);
      }
    }
    epoch_losses.push_back(total / static_cast<double>(n));
  }
  return epoch_losses;
}

// ---------------------------------------------------------------------------
// Target classifiers

struct TrainedModel {
  Network network;
  std::size_t classes = 0;
  double train_loss = 0.0;  // mean cross-entropy over the training set

  std::size_t input_dim() const { return network.input_dim(); }
};

struct TrainReport {
  double train_accuracy = 0.0;
  double train_loss = 0.0;
  std::optional<double> test_accuracy;
  std::optional<double> test_loss;
  std::optional<double> generalization_error;  // train_accuracy - test_accuracy
  std::size_t epochs_run = 0;
  std::uint64_t seed = 0;
};

struct TrainResult {
  TrainedModel model;
  TrainReport report;
  std::vector<double> epoch_losses;
};

inline Matrix predict_proba_columns(const TrainedModel& model, const Matrix& x) {
  return forward(model.network, x);
}

inline Vector predict_proba(const TrainedModel& model, const VectorRef& x) {
  if (static_cast<std::size_t>(x.size()) != model.input_dim())
    throw std::invalid_argument("predict_proba: dimension mismatch");
  Matrix col = x;
  return predict_proba_columns(model, col).col(0);
}

inline int argmax(const VectorRef& v) {
  Eigen::Index i;
  v.maxCoeff(&i);
  return static_cast<int>(i);
}

inline int predict_label(const TrainedModel& model, const VectorRef& x) {
  return argmax(predict_proba(model, x));
}

inline std::vector<int> predict_labels(const TrainedModel& model, const Matrix& x) {
  Matrix p = predict_proba_columns(model, x);
  std::vector<int> out(static_cast<std::size_t>(p.cols()));
  for (Eigen::Index j = 0; j < p.cols(); ++j) out[static_cast<std::size_t>(j)] = argmax(p.col(j));
  return out;
}

// Confidence vectors for every candidate of a sibling set (k x N). The first
// layer's pre-activation is shared across candidates, so only the columns of
// the unknown features are multiplied per candidate.
inline Matrix predict_proba_siblings(const TrainedModel& model, const SiblingSet& siblings,
                                     std::size_t chunk = 8192) {
  const Network& net = model.network;
  const Portion& portion = siblings.portion();
  if (portion.dimension() != net.input_dim())
    throw std::invalid_argument("predict_proba_siblings: dimension mismatch");
  const auto& unknown = portion.unknown();
  const auto& first = net.layers[0];
  Vector base = portion.values();
  Matrix w_unknown(first.weights.rows(), static_cast<Eigen::Index>(unknown.size()));
  for (std::size_t j = 0; j < unknown.size(); ++j) {
    base[static_cast<Eigen::Index>(unknown[j])] = 0.0;
    w_unknown.col(static_cast<Eigen::Index>(j)) = first.weights.col(static_cast<Eigen::Index>(unknown[j]));
  }
  Vector z_base = first.weights * base + first.bias;

  const std::size_t total = siblings.size();
  Matrix out(static_cast<Eigen::Index>(model.classes), static_cast<Eigen::Index>(total));
  for (std::size_t start = 0; start < total; start += chunk) {
    const auto count = static_cast<Eigen::Index>(std::min(chunk, total - start));
    Matrix z = w_unknown * siblings.candidates().middleCols(static_cast<Eigen::Index>(start), count);
    z.colwise() += z_base;
    out.middleCols(static_cast<Eigen::Index>(start), count) = detail::forward_from(net, 0, std::move(z));
  }
  return out;
}

// -log(confidence of the true label), floored at 1e-12 confidence.
inline double cross_entropy_loss(const VectorRef& confidences, int label) {
  if (label < 0 || label >= confidences.size())
    throw std::invalid_argument("cross_entropy_loss: label out of range");
  return -std::log(std::max(confidences[label], kConfidenceFloor));
}

struct Evaluation {
  double accuracy = 0.0;
  double loss = 0.0;  // mean cross-entropy
};

inline Evaluation evaluate(const TrainedModel& model, const LabeledDataset& data) {
  if (data.empty()) throw std::invalid_argument("evaluate: empty dataset");
  Matrix p = predict_proba_columns(model, data.features);
  Evaluation e;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    auto col = p.col(static_cast<Eigen::Index>(i));
    if (argmax(col) == data.labels[i]) ++correct;
    e.loss += cross_entropy_loss(col, data.labels[i]);
  }
  e.accuracy = static_cast<double>(correct) / static_cast<double>(data.size());
  e.loss /= static_cast<double>(data.size());
  return e;
}

struct GeneralizationError {
  double train_accuracy = 0.0;
  double test_accuracy = 0.0;
  double accuracy_gap = 0.0;     // train_accuracy - test_accuracy (headline value)
  double train_loss = 0.0;
  double test_loss = 0.0;
  double loss_difference = 0.0;  // train_loss - test_loss, cross-entropy
};

inline GeneralizationError generalization_error(const TrainedModel& model, const LabeledDataset& train,
                                                const LabeledDataset& test) {
  auto tr = evaluate(model, train);
  auto te = evaluate(model, test);
  return {tr.accuracy, te.accuracy, tr.accuracy - te.accuracy, tr.loss, te.loss, tr.loss - te.loss};
}

namespace detail {

inline void check_training_set(const LabeledDataset& train, std::size_t classes) {
  if (train.empty()) throw std::invalid_argument("training set is empty");
  if (classes < 2) throw std::invalid_argument("classification needs at least 2 classes");
  for (int y : train.labels)
    if (y < 0 || static_cast<std::size_t>(y) >= classes)
      throw std::invalid_argument("label " + std::to_string(y) + " out of range [0," +
                                  std::to_string(classes) + ")");
  for (std::size_t i = 0; i < train.size(); ++i) train.domain.validate(train.record(i));
}

inline TrainResult train_classifier(const LabeledDataset& train, std::size_t classes,
                                    const MlpConfig& cfg, const LabeledDataset* test) {
  cfg.validate();
  check_training_set(train, classes);
  Rng rng(derive_seed(cfg.seed, "weight-init"));
  TrainResult r;
  r.model.classes = classes;
  r.model.network = init_network(train.dimension(), cfg.hidden_layers, classes, cfg.activation,
                                 OutputKind::Softmax, rng);
  r.epoch_losses = fit_network(r.model.network, train.features, one_hot(train.labels, classes), cfg);
  auto tr = evaluate(r.model, train);
  r.model.train_loss = tr.loss;
  r.report.train_accuracy = tr.accuracy;
  r.report.train_loss = tr.loss;
  r.report.epochs_run = cfg.epochs;
  r.report.seed = cfg.seed;
  if (test && !test->empty()) {
    auto te = evaluate(r.model, *test);
    r.report.test_accuracy = te.accuracy;
    r.report.test_loss = te.loss;
    r.report.generalization_error = tr.accuracy - te.accuracy;
  }
  return r;
}

}  // namespace detail

inline TrainResult train_mlp(const LabeledDataset& train, std::size_t classes, const MlpConfig& cfg,
                             const LabeledDataset* test = nullptr) {
  return detail::train_classifier(train, classes, cfg, test);
}

// Multinomial logistic regression: the same loop with no hidden layers.
inline TrainResult train_logistic(const LabeledDataset& train, std::size_t classes, MlpConfig cfg,
                                  const LabeledDataset* test = nullptr) {
  cfg.hidden_layers.clear();
  return detail::train_classifier(train, classes, cfg, test);
}

// ---------------------------------------------------------------------------
// Checkpoints: "INFA1", u32 object kind, then little-endian dimensions and
// row-major f64 weight blocks (see README for the full layout).

inline constexpr char kCheckpointMagic[5] = {'I', 'N', 'F', 'A', '1'};
inline constexpr std::uint32_t kCheckpointClassifier = 0;
inline constexpr std::uint32_t kCheckpointShadowAttack = 1;

namespace detail {

inline void write_magic(std::ostream& os, std::uint32_t kind) {
  os.write(kCheckpointMagic, 5);
  write_u32(os, kind);
}

inline void read_magic(std::istream& is, std::uint32_t expected_kind) {
  char magic[5];
  if (!is.read(magic, 5) || !std::equal(magic, magic + 5, kCheckpointMagic))
    throw Error("checkpoint: bad magic bytes");
  if (read_u32(is) != expected_kind) throw Error("checkpoint: unexpected object kind");
}

inline void write_network(std::ostream& os, const Network& net) {
  write_u32(os, net.activation == Activation::Tanh ? 0 : 1);
  write_u32(os, net.output == OutputKind::Softmax ? 0 : 1);
  write_u32(os, static_cast<std::uint32_t>(net.layers.size()));
  for (const auto& layer : net.layers) {
    write_u32(os, static_cast<std::uint32_t>(layer.weights.rows()));
    write_u32(os, static_cast<std::uint32_t>(layer.weights.cols()));
    for (Eigen::Index r = 0; r < layer.weights.rows(); ++r)
      for (Eigen::Index c = 0; c < layer.weights.cols(); ++c) write_f64(os, layer.weights(r, c));
    for (Eigen::Index r = 0; r < layer.bias.size(); ++r) write_f64(os, layer.bias[r]);
  }
}

inline Network read_network(std::istream& is) {
  Network net;
  auto act = read_u32(is);
  auto out = read_u32(is);
  if (act > 1 || out > 1) throw Error("checkpoint: unknown activation or output kind");
  net.activation = act == 0 ? Activation::Tanh : Activation::Relu;
  net.output = out == 0 ? OutputKind::Softmax : OutputKind::Sigmoid;
  auto depth = read_u32(is);
  if (depth == 0) throw Error("checkpoint: network without layers");
  for (std::uint32_t l = 0; l < depth; ++l) {
    DenseLayer layer;
    auto rows = read_u32(is);
    auto cols = read_u32(is);
    if (!net.layers.empty() && cols != net.layers.back().weights.rows())
      throw Error("checkpoint: inconsistent layer dimensions");
    layer.weights.resize(rows, cols);
    for (Eigen::Index r = 0; r < layer.weights.rows(); ++r)
      for (Eigen::Index c = 0; c < layer.weights.cols(); ++c) layer.weights(r, c) = read_f64(is);
    layer.bias.resize(rows);
    for (Eigen::Index r = 0; r < layer.bias.size(); ++r) layer.bias[r] = read_f64(is);
    net.layers.push_back(std::move(layer));
  }
  return net;
}

}  // namespace detail

inline void save_model(std::ostream& os, const TrainedModel& model) {
  detail::write_magic(os, kCheckpointClassifier);
  detail::write_u32(os, static_cast<std::uint32_t>(model.classes));
  detail::write_f64(os, model.train_loss);
  detail::write_network(os, model.network);
}

inline TrainedModel load_model(std::istream& is) {
  detail::read_magic(is, kCheckpointClassifier);
  TrainedModel model;
  model.classes = detail::read_u32(is);
  model.train_loss = detail::read_f64(is);
  model.network = detail::read_network(is);
  if (model.network.output_dim() != model.classes)
    throw Error("checkpoint: output width does not match class count");
  return model;
}

inline void save_model(const std::string& path, const TrainedModel& model) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot open " + path + " for writing");
  save_model(os, model);
}

inline TrainedModel load_model(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("cannot open " + path);
  return load_model(is);
}

}  // namespace infa
