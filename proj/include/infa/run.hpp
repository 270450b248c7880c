#pragma once

#include "infa/io.hpp"
#include "infa/report.hpp"

#include <set>

namespace infa {

// Failure inside one pipeline stage ("data", "model", "attack", ...).
class StageError : public Error {
 public:
  StageError(std::string stage, const std::string& what)
      : Error("[" + stage + "] " + what), stage(std::move(stage)) {}
  std::string stage;
};

template <class F>
auto in_stage(const char* stage, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(stage, e.what());
  }
}

struct DataConfig {
  std::string source = "synth";  // "synth" or "csv"
  std::string path;
  std::string label_column = "label";
  std::string domain = "binary";
  bool normalize = true;
  std::string synth_kind = "binary-clusters";
  std::size_t m = 600;
  std::size_t n = 6000;
  std::size_t k = 20;
  double spread = 0.43;
  double train_fraction = 1.0 / 3.0;
  double test_fraction = 1.0 / 6.0;  // the rest is the shadow pool
};

struct RunConfig {
  std::string experiment = "mi";  // train mi smi ai aai sweep theorem1 synth dr
  DataConfig data;
  std::string model_kind = "mlp";  // or "logistic"
  MlpConfig model = [] {
    MlpConfig c;
    c.epochs = 50;
    return c;
  }();
  MlpConfig attack_model = [] {
    MlpConfig c;
    c.hidden_layers = {64};
    c.epochs = 30;
    c.batch_size = 128;
    return c;
  }();
  std::vector<std::string> attacks{"conf", "loss", "shadow"};
  std::size_t shadows = 2;
  std::string metric = "auto";

  std::size_t trials = 1000;
  std::size_t members = 1000;  // member sample for distance-stratified AUC
  bool synthetic = true;
  std::vector<std::size_t> distances{1, 2, 3, 4, 5, 6, 8, 10, 15, 20, 30, 50, 75, 100, 150, 200, 300, 400, 500, 599};
  double max_distance = 5.0;  // continuous synthetic groups
  double step = 0.05;
  std::size_t per_distance = 5;

  std::vector<double> radii{1, 2, 5, 10, 600};
  std::string sampler = "induced";  // or "synthetic"

  std::string unknown = "mrmr:15";  // or comma-separated indices
  std::string alpha = "random-guess";
  std::size_t bins = 2;
  std::size_t mrmr_bins = 10;
  std::size_t challenges = 500;

  std::vector<std::size_t> sweep_sizes{500, 1000, 2000, 4000};
  double sweep_test_ratio = 0.5;

  std::size_t code_m = 64;
  std::size_t code_n = 1000;
  std::size_t code_r = 1;
  std::size_t code_k = 4;
  std::size_t code_train = 100;
  bool include_code = false;

  std::size_t dr_samples = std::size_t{1} << 20;

  std::string model_in;
  std::string model_out;
  std::uint64_t seed = 0;
};

namespace detail {

inline Json mlp_to_json(const MlpConfig& c) {
  return {{"hidden_layers", c.hidden_layers}, {"activation", to_string(c.activation)}, {"epochs", c.epochs},
          {"batch_size", c.batch_size},       {"learning_rate", c.learning_rate},      {"optimizer", to_string(c.optimizer)}};
}

inline void check_keys(const Json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!j.is_object()) throw std::invalid_argument(where + ": expected an object");
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!ok.count(it.key())) throw std::invalid_argument(where + ": unknown key '" + it.key() + "'");
}

template <class T>
void read(const Json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

inline MlpConfig mlp_from_json(const Json& j, MlpConfig c, const std::string& where) {
  check_keys(j, {"hidden_layers", "activation", "epochs", "batch_size", "learning_rate", "optimizer"}, where);
  read(j, "hidden_layers", c.hidden_layers);
  if (j.contains("activation")) c.activation = parse_activation(j.at("activation").get<std::string>());
  read(j, "epochs", c.epochs);
  read(j, "batch_size", c.batch_size);
  read(j, "learning_rate", c.learning_rate);
  if (j.contains("optimizer")) c.optimizer = parse_optimizer(j.at("optimizer").get<std::string>());
  c.validate();
  return c;
}

}  // namespace detail

inline Json to_json(const RunConfig& c) {
  const auto& d = c.data;
  return {{"experiment", c.experiment},
          {"data",
           {{"source", d.source}, {"path", d.path}, {"label_column", d.label_column}, {"domain", d.domain},
            {"normalize", d.normalize}, {"synth_kind", d.synth_kind}, {"m", d.m}, {"n", d.n}, {"k", d.k},
            {"spread", d.spread}, {"train_fraction", d.train_fraction}, {"test_fraction", d.test_fraction}}},
          {"model_kind", c.model_kind},
          {"model", detail::mlp_to_json(c.model)},
          {"attack_model", detail::mlp_to_json(c.attack_model)},
          {"attacks", c.attacks},
          {"shadows", c.shadows},
          {"metric", c.metric},
          {"trials", c.trials},
          {"members", c.members},
          {"synthetic", c.synthetic},
          {"distances", c.distances},
          {"max_distance", c.max_distance},
          {"step", c.step},
          {"per_distance", c.per_distance},
          {"radii", c.radii},
          {"sampler", c.sampler},
          {"unknown", c.unknown},
          {"alpha", c.alpha},
          {"bins", c.bins},
          {"mrmr_bins", c.mrmr_bins},
          {"challenges", c.challenges},
          {"sweep_sizes", c.sweep_sizes},
          {"sweep_test_ratio", c.sweep_test_ratio},
          {"code_m", c.code_m},
          {"code_n", c.code_n},
          {"code_r", c.code_r},
          {"code_k", c.code_k},
          {"code_train", c.code_train},
          {"include_code", c.include_code},
          {"dr_samples", c.dr_samples},
          {"model_in", c.model_in},
          {"model_out", c.model_out},
          {"seed", c.seed}};
}

// Missing keys keep their defaults; unknown keys are rejected.
inline RunConfig run_config_from_json(const Json& j, RunConfig c = {}) {
  using detail::read;
  detail::check_keys(j,
                     {"experiment", "data", "model_kind", "model", "attack_model", "attacks", "shadows", "metric",
                      "trials", "members", "synthetic", "distances", "max_distance", "step", "per_distance", "radii",
                      "sampler", "unknown", "alpha", "bins", "mrmr_bins", "challenges", "sweep_sizes",
                      "sweep_test_ratio", "code_m", "code_n", "code_r", "code_k", "code_train", "include_code",
                      "dr_samples", "model_in", "model_out", "seed"},
                     "config");
  read(j, "experiment", c.experiment);
  if (j.contains("data")) {
    const Json& d = j.at("data");
    detail::check_keys(d, {"source", "path", "label_column", "domain", "normalize", "synth_kind", "m", "n", "k",
                           "spread", "train_fraction", "test_fraction"},
                       "config.data");
    read(d, "source", c.data.source);
    read(d, "path", c.data.path);
    read(d, "label_column", c.data.label_column);
    read(d, "domain", c.data.domain);
    read(d, "normalize", c.data.normalize);
    read(d, "synth_kind", c.data.synth_kind);
    read(d, "m", c.data.m);
    read(d, "n", c.data.n);
    read(d, "k", c.data.k);
    read(d, "spread", c.data.spread);
    read(d, "train_fraction", c.data.train_fraction);
    read(d, "test_fraction", c.data.test_fraction);
  }
  read(j, "model_kind", c.model_kind);
  if (j.contains("model")) c.model = detail::mlp_from_json(j.at("model"), c.model, "config.model");
  if (j.contains("attack_model"))
    c.attack_model = detail::mlp_from_json(j.at("attack_model"), c.attack_model, "config.attack_model");
  read(j, "attacks", c.attacks);
  read(j, "shadows", c.shadows);
  read(j, "metric", c.metric);
  read(j, "trials", c.trials);
  read(j, "members", c.members);
  read(j, "synthetic", c.synthetic);
  read(j, "distances", c.distances);
  read(j, "max_distance", c.max_distance);
  read(j, "step", c.step);
  read(j, "per_distance", c.per_distance);
  read(j, "radii", c.radii);
  read(j, "sampler", c.sampler);
  read(j, "unknown", c.unknown);
  read(j, "alpha", c.alpha);
  read(j, "bins", c.bins);
  read(j, "mrmr_bins", c.mrmr_bins);
  read(j, "challenges", c.challenges);
  read(j, "sweep_sizes", c.sweep_sizes);
  read(j, "sweep_test_ratio", c.sweep_test_ratio);
  read(j, "code_m", c.code_m);
  read(j, "code_n", c.code_n);
  read(j, "code_r", c.code_r);
  read(j, "code_k", c.code_k);
  read(j, "code_train", c.code_train);
  read(j, "include_code", c.include_code);
  read(j, "dr_samples", c.dr_samples);
  read(j, "model_in", c.model_in);
  read(j, "model_out", c.model_out);
  read(j, "seed", c.seed);
  return c;
}

inline RunConfig load_run_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::invalid_argument("cannot open config " + path);
  return run_config_from_json(Json::parse(is));
}

struct RunOutputs {
  std::string report_path;  // empty: report is only returned
  std::string plot_path;
};

struct RunResult {
  ExperimentReport report;
  std::vector<PlotSeries> plots;
};

namespace detail {

struct PreparedData {
  LabeledDataset all;
  SplitDataset split;
};

inline PreparedData prepare_data(const RunConfig& c) {
  PreparedData p;
  if (c.data.source == "synth") {
    p.all = synth_dataset(parse_synth_kind(c.data.synth_kind), c.data.m, c.data.n, c.data.k, c.data.spread,
                          derive_seed(c.seed, "dataset"));
    p.split = split_dataset(p.all, c.data.train_fraction, c.data.test_fraction, derive_seed(c.seed, "split"));
  } else if (c.data.source == "csv") {
    DatasetSpec spec;
    spec.path = c.data.path;
    spec.label_column = c.data.label_column;
    spec.kind = parse_domain_kind(c.data.domain);
    spec.train_fraction = c.data.train_fraction;
    spec.test_fraction = c.data.test_fraction;
    spec.normalize = c.data.normalize;
    spec.seed = c.seed;
    auto loaded = load_dataset(spec);
    p.all = std::move(loaded.data);
    p.split = std::move(loaded.split);
  } else {
    throw std::invalid_argument("unknown data source '" + c.data.source + "'");
  }
  if (p.split.train.empty() || p.split.test.empty()) throw std::invalid_argument("train or test split is empty");
  return p;
}

inline Metric resolve_metric(const RunConfig& c, const FeatureDomain& domain) {
  Metric m = c.metric == "auto" ? default_metric(domain) : parse_metric(c.metric);
  check_compatible(m, domain);
  return m;
}

inline TrainedModel obtain_model(const RunConfig& c, const PreparedData& d, Json& results) {
  TrainedModel model;
  if (!c.model_in.empty()) {
    model = load_model(c.model_in);
    if (model.input_dim() != d.all.dimension() || model.classes != d.all.classes)
      throw std::invalid_argument("checkpoint " + c.model_in + " does not match the dataset shape");
  } else {
    MlpConfig cfg = c.model;
    cfg.seed = derive_seed(c.seed, "target-model");
    if (c.model_kind == "mlp")
      model = train_mlp(d.split.train, d.all.classes, cfg, &d.split.test).model;
    else if (c.model_kind == "logistic")
      model = train_logistic(d.split.train, d.all.classes, cfg, &d.split.test).model;
    else
      throw std::invalid_argument("unknown model kind '" + c.model_kind + "'");
  }
  if (!c.model_out.empty()) save_model(c.model_out, model);
  results["target"] = to_json(generalization_error(model, d.split.train, d.split.test));
  return model;
}

inline std::unique_ptr<MembershipScorer> make_scorer(const RunConfig& c, const std::string& name,
                                                     const PreparedData& d, bool attribute_inference) {
  switch (parse_attack(name)) {
    case AttackKind::Conf: return std::make_unique<ConfidenceScorer>();
    case AttackKind::Loss:
      return std::make_unique<LossScorer>(attribute_inference ? LossScorer::Mode::TrainingLossProximity
                                                              : LossScorer::Mode::NegativeLoss);
    case AttackKind::Shadow: {
      MlpConfig target = c.model, attack = c.attack_model;
      attack.seed = derive_seed(c.seed, "attack-model");
      ShadowOptions opts;
      const std::size_t slots = 2 * std::max<std::size_t>(c.shadows, 1);
      opts.split_size = std::min(d.split.train.size(), d.split.reserve.size() / slots);
      auto trained = train_shadow_attack(d.split.reserve, c.shadows, target, attack, derive_seed(c.seed, "shadows"), opts);
      return std::make_unique<ShadowScorer>(std::make_shared<ShadowAttackModel>(std::move(trained.attack)));
    }
  }
  throw std::invalid_argument("unknown attack " + name);
}

inline std::vector<std::size_t> resolve_unknown(const RunConfig& c, const LabeledDataset& all) {
  const std::string prefix = "mrmr:";
  if (c.unknown.rfind(prefix, 0) == 0) {
    auto k = detail::parse_number(c.unknown.substr(prefix.size()));
    if (!k || *k < 1 || *k != std::floor(*k)) throw std::invalid_argument("malformed unknown rule '" + c.unknown + "'");
    return mrmr_select(all, static_cast<std::size_t>(*k), c.mrmr_bins);
  }
  std::vector<std::size_t> idx;
  std::stringstream ss(c.unknown);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    auto v = detail::parse_number(detail::trim(tok));
    if (!v || *v < 0 || *v != std::floor(*v)) throw std::invalid_argument("malformed unknown index '" + tok + "'");
    idx.push_back(static_cast<std::size_t>(*v));
  }
  if (idx.empty()) throw std::invalid_argument("empty unknown set");
  return idx;
}

inline double resolve_alpha(const RunConfig& c, Metric metric, std::size_t unknowns) {
  if (c.alpha == "random-guess") return expected_random_guess_distance(metric, unknowns);
  auto v = detail::parse_number(c.alpha);
  if (!v || *v < 0) throw std::invalid_argument("alpha must be 'random-guess' or a number >= 0");
  return *v;
}

inline std::vector<SyntheticNonMember> synthesize_candidates(const RunConfig& c, const LabeledDataset& train,
                                                             const LabeledDataset& members, Metric metric) {
  NonMemberFilter filter(train, metric);
  SynthesisOptions opts;
  opts.per_distance = c.per_distance;
  opts.strict = false;
  std::vector<SyntheticNonMember> out;
  for (std::size_t i = 0; i < members.size(); ++i) {
    const std::uint64_t s = derive_seed(derive_seed(c.seed, "synthetic"), i);
    auto v = train.domain.kind == DomainKind::Binary
                 ? synthesize_nonmembers_binary(members.record(i), members.labels[i], filter, c.distances, opts, s)
                 : synthesize_nonmembers_continuous(members.record(i), members.labels[i], filter, c.max_distance,
                                                    c.step, opts, s);
    out.insert(out.end(), std::make_move_iterator(v.begin()), std::make_move_iterator(v.end()));
  }
  return out;
}

inline LabeledDataset sample_members(const LabeledDataset& train, std::size_t count, std::uint64_t seed) {
  if (count == 0 || count >= train.size()) return train;
  Rng rng(seed);
  auto idx = sample_without_replacement(rng, train.size(), count);
  std::sort(idx.begin(), idx.end());
  return train.subset(idx);
}

inline std::span<const double> as_span(const Vector& v) { return {v.data(), static_cast<std::size_t>(v.size())}; }

}  // namespace detail

// Runs one configured experiment and writes the report (and plot table).
inline RunResult run(const RunConfig& c, const RunOutputs& outputs = {}) {
  RunResult out;
  ExperimentReport& rep = out.report;
  rep.experiment = c.experiment;
  rep.seed = c.seed;
  rep.config = to_json(c);
  Json& res = rep.results;
  static const std::set<std::string> kinds{"train", "mi", "smi", "ai", "aai", "sweep", "theorem1", "synth", "dr"};
  if (!kinds.count(c.experiment)) throw StageError("config", "unknown experiment '" + c.experiment + "'");

  if (c.experiment == "theorem1") {
    auto code = in_stage("construction", [&] {
      return sample_spread_codewords(c.code_m, c.code_n, c.code_r, c.code_k, derive_seed(c.seed, "spread-code"));
    });
    auto check = verify_spread_code(code);
    res["code"] = {{"m", code.m}, {"r", code.r}, {"k", code.k}, {"n_codewords", code.n_codewords},
                   {"min_codeword_distance", check.min_codeword_distance},
                   {"max_partner_distance", check.max_partner_distance}, {"unique_neighbors", check.unique_neighbors}};
    if (c.include_code) res["code"]["points"] = to_json(code);
    res["theorem1"] = in_stage("experiment", [&] {
      return to_json(theorem1_experiment(code, c.code_train, c.trials, derive_seed(c.seed, "theorem1")));
    });
  } else if (c.experiment == "synth") {
    auto d = in_stage("data", [&] { return detail::prepare_data(c); });
    res["dataset"] = {{"records", d.all.size()}, {"dimension", d.all.dimension()}, {"classes", d.all.classes},
                      {"class_counts", d.all.class_counts()}, {"domain", to_string(d.all.domain.kind)}};
    if (!outputs.report_path.empty()) {
      in_stage("report", [&] {
        std::ofstream os(outputs.report_path, std::ios::binary);
        if (!os) throw Error("cannot open " + outputs.report_path + " for writing");
        write_csv(os, d.all);
        return 0;
      });
    }
    return out;
  } else {
    auto d = in_stage("data", [&] { return detail::prepare_data(c); });
    const Metric metric = in_stage("config", [&] { return detail::resolve_metric(c, d.all.domain); });
    res["dataset"] = {{"records", d.all.size()}, {"dimension", d.all.dimension()}, {"classes", d.all.classes},
                      {"train", d.split.train.size()}, {"test", d.split.test.size()}, {"reserve", d.split.reserve.size()}};

    if (c.experiment == "sweep") {
      SweepConfig sc;
      sc.sizes = c.sweep_sizes;
      sc.test_ratio = c.sweep_test_ratio;
      sc.target = c.model;
      sc.target.seed = derive_seed(c.seed, "target-model");
      sc.attack = c.attack_model;
      sc.attack.seed = derive_seed(c.seed, "attack-model");
      sc.shadows = c.shadows;
      sc.attacks.clear();
      for (auto& a : c.attacks) sc.attacks.push_back(parse_attack(a));
      sc.bins = c.bins;
      sc.mrmr_bins = c.mrmr_bins;
      sc.challenges = c.challenges;
      sc.seed = derive_seed(c.seed, "sweep");
      if (c.unknown.rfind("mrmr:", 0) == 0) {
        auto k = detail::parse_number(c.unknown.substr(5));
        if (!k || *k < 1 || *k != std::floor(*k)) throw StageError("config", "malformed unknown rule '" + c.unknown + "'");
        sc.mrmr_features = static_cast<std::size_t>(*k);
      } else {
        sc.unknown = in_stage("config", [&] { return detail::resolve_unknown(c, d.all); });
      }
      if (c.alpha != "random-guess") sc.alpha = in_stage("config", [&] { return detail::resolve_alpha(c, metric, 1); });
      auto sweep = in_stage("experiment", [&] { return overfitting_sweep(d.all, sc); });
      res["sweep"] = to_json(sweep);
      PlotSeries gen{"generalization_error", {}};
      for (auto& row : sweep.rows) gen.points.emplace_back(static_cast<double>(row.size), row.generalization_error);
      out.plots.push_back(gen);
    } else {
      TrainedModel model = in_stage("model", [&] { return detail::obtain_model(c, d, res); });
      if (c.experiment == "train") {
        // Report only; the checkpoint was written by obtain_model when requested.
      } else if (c.experiment == "dr") {
        auto profile = in_stage("experiment", [&] {
          return decision_region_volumes(model, d.all.domain, c.dr_samples, derive_seed(c.seed, "dr"));
        });
        res["decision_regions"] = to_json(profile);
        if (c.synthetic && !c.attacks.empty()) {
          auto scorer = in_stage("attack", [&] { return detail::make_scorer(c, c.attacks.front(), d, false); });
          in_stage("experiment", [&] {
            auto members = detail::sample_members(d.split.train, c.members, derive_seed(c.seed, "members"));
            Vector ms = scorer->score_columns(model, members.features, members.labels);
            auto cands = detail::synthesize_candidates(c, d.split.train, members, metric);
            auto scored = score_candidates(model, *scorer, d.split.train, cands);
            auto per_class = per_class_stratified_auc(detail::as_span(ms), members.labels, scored,
                                                      Grouping::for_metric(metric), &profile);
            res["per_class"] = {{"attack", scorer->name()}, {"classes", to_json(per_class)}};
            return 0;
          });
        }
      } else if (c.experiment == "mi" || c.experiment == "smi") {
        Json attacks = Json::array();
        std::unique_ptr<NeighborSampler> sampler;
        if (c.experiment == "smi") {
          sampler = in_stage("config", [&]() -> std::unique_ptr<NeighborSampler> {
            if (c.sampler == "induced") return std::make_unique<InducedNeighborSampler>(d.split.test, d.split.train, metric);
            if (c.sampler == "synthetic") return std::make_unique<SyntheticNeighborSampler>(d.split.train, metric);
            throw std::invalid_argument("unknown sampler '" + c.sampler + "'");
          });
        }
        for (const auto& name : c.attacks) {
          auto scorer = in_stage("attack", [&] { return detail::make_scorer(c, name, d, false); });
          Json entry{{"attack", name}};
          in_stage("experiment", [&] {
            if (c.experiment == "mi") {
              entry["mi"] = to_json(mi_experiment(model, d.split.train, d.split.test, *scorer, c.trials,
                                                  derive_seed(c.seed, "mi-trials")));
              auto members = detail::sample_members(d.split.train, c.members, derive_seed(c.seed, "members"));
              Vector ms = scorer->score_columns(model, members.features, members.labels);
              const Grouping grouping = Grouping::for_metric(metric);
              auto original = distance_stratified_auc(
                  detail::as_span(ms), score_candidates(model, *scorer, d.split.train, as_candidates(d.split.test, d.split.train, metric)),
                  grouping);
              entry["original_distance_auc"] = to_json(original);
              out.plots.push_back(to_series(name + " original", original));
              if (c.synthetic) {
                auto cands = detail::synthesize_candidates(c, d.split.train, members, metric);
                auto synthetic = distance_stratified_auc(detail::as_span(ms),
                                                         score_candidates(model, *scorer, d.split.train, cands), grouping);
                entry["synthetic_distance_auc"] = to_json(synthetic);
                out.plots.push_back(to_series(name + " synthetic", synthetic));
              }
            } else {
              Json per_radius = Json::array();
              PlotSeries series{name + " smi", {}};
              for (double r : c.radii) {
                auto m = smi_experiment(model, d.split.train, r, *scorer, *sampler, c.trials,
                                        derive_seed(c.seed, "smi-trials"));
                per_radius.push_back({{"radius", r}, {"smi", to_json(m)}});
                if (m.auc) series.points.emplace_back(r, *m.auc);
              }
              entry["radii"] = per_radius;
              out.plots.push_back(series);
            }
            return 0;
          });
          attacks.push_back(std::move(entry));
        }
        res["attacks"] = attacks;
      } else {  // ai, aai
        auto unknown = in_stage("config", [&] { return detail::resolve_unknown(c, d.all); });
        const double alpha =
            c.experiment == "ai" ? 0.0 : in_stage("config", [&] { return detail::resolve_alpha(c, metric, unknown.size()); });
        std::vector<std::unique_ptr<MembershipScorer>> owned;
        std::vector<const MembershipScorer*> view;
        for (const auto& name : c.attacks) {
          owned.push_back(in_stage("attack", [&] { return detail::make_scorer(c, name, d, true); }));
          view.push_back(owned.back().get());
        }
        AiConfig ai;
        ai.unknown = unknown;
        ai.bins = c.bins;
        ai.alpha = alpha;
        ai.metric = metric;
        ai.challenges = c.challenges;
        ai.seed = derive_seed(c.seed, "ai-challenges");
        auto results = in_stage("experiment", [&] {
          return evaluate_attribute_inference(model, view, d.split.train, d.split.test, ai);
        });
        res["unknown"] = unknown;
        res["alpha"] = alpha;
        Json attacks = Json::array();
        for (auto& r : results) attacks.push_back(to_json(r));
        res["attacks"] = attacks;
      }
    }
  }

  in_stage("report", [&] {
    if (!outputs.report_path.empty()) write_text(outputs.report_path, rep.dump());
    if (!outputs.plot_path.empty()) write_text(outputs.plot_path, plot_table(out.plots));
    return 0;
  });
  return out;
}

}  // namespace infa
