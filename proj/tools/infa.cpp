// Command-line front end: one subcommand per experiment kind.
#include "infa/infa.hpp"

#include <CLI11.hpp>

#include <functional>
#include <iostream>

namespace {

using infa::RunConfig;

// Binds flags to a scratch config and copies only the flags the user gave
// onto the final config, so --config files and flags compose.
class Flags {
 public:
  Flags(CLI::App* app, RunConfig& scratch) : app_(app), scratch_(scratch) {}

  template <class Get>
  void add(const std::string& name, Get get, const std::string& help) {
    CLI::Option* opt = app_->add_option(name, get(scratch_), help);
    appliers_.push_back([opt, get, this](RunConfig& target) {
      if (opt->count() > 0) get(target) = get(scratch_);
    });
  }

  // Enum-valued MLP settings go through their parsers.
  template <class Get, class Parse>
  void add_parsed(const std::string& name, Get get, Parse parse, const std::string& help) {
    auto value = std::make_shared<std::string>();
    CLI::Option* opt = app_->add_option(name, *value, help);
    appliers_.push_back([opt, get, parse, value](RunConfig& target) {
      if (opt->count() > 0) get(target) = parse(*value);
    });
  }

  void apply(RunConfig& target) const {
    for (const auto& f : appliers_) f(target);
  }

 private:
  CLI::App* app_;
  RunConfig& scratch_;
  std::vector<std::function<void(RunConfig&)>> appliers_;
};

struct Command {
  CLI::App* app = nullptr;
  std::unique_ptr<Flags> flags;
  std::string config_path;
  std::string out;
  std::string plot_out;
};

void add_common(Command& cmd) {
  auto& f = *cmd.flags;
  cmd.app->add_option("--config", cmd.config_path, "JSON config file; flags override its values");
  cmd.app->add_option("--out", cmd.out, "report path (CSV for synth); stdout when omitted");
  cmd.app->add_option("--plot-out", cmd.plot_out, "plot table path");
  f.add("--seed", [](RunConfig& c) -> auto& { return c.seed; }, "master seed");
  f.add("--data-source", [](RunConfig& c) -> auto& { return c.data.source; }, "synth or csv");
  f.add("--data", [](RunConfig& c) -> auto& { return c.data.path; }, "CSV dataset path");
  f.add("--label-column", [](RunConfig& c) -> auto& { return c.data.label_column; },
        "label column name or derive:kmeans(k)");
  f.add("--domain", [](RunConfig& c) -> auto& { return c.data.domain; }, "binary or continuous");
  f.add("--normalize", [](RunConfig& c) -> auto& { return c.data.normalize; }, "min-max scale continuous features");
  f.add("--synth-kind", [](RunConfig& c) -> auto& { return c.data.synth_kind; },
        "binary-clusters or continuous-clusters");
  f.add("--features", [](RunConfig& c) -> auto& { return c.data.m; }, "synthetic feature count");
  f.add("--records", [](RunConfig& c) -> auto& { return c.data.n; }, "synthetic record count");
  f.add("--classes", [](RunConfig& c) -> auto& { return c.data.k; }, "synthetic class count");
  f.add("--spread", [](RunConfig& c) -> auto& { return c.data.spread; }, "synthetic cluster spread");
  f.add("--train-fraction", [](RunConfig& c) -> auto& { return c.data.train_fraction; }, "training split fraction");
  f.add("--test-fraction", [](RunConfig& c) -> auto& { return c.data.test_fraction; }, "test split fraction");
  f.add("--model-kind", [](RunConfig& c) -> auto& { return c.model_kind; }, "mlp or logistic");
  f.add("--hidden", [](RunConfig& c) -> auto& { return c.model.hidden_layers; }, "hidden layer widths");
  f.add_parsed("--activation", [](RunConfig& c) -> auto& { return c.model.activation; },
               [](const std::string& s) { return infa::parse_activation(s); }, "tanh or relu");
  f.add("--epochs", [](RunConfig& c) -> auto& { return c.model.epochs; }, "training epochs");
  f.add("--batch-size", [](RunConfig& c) -> auto& { return c.model.batch_size; }, "minibatch size, 0 for full batch");
  f.add("--lr", [](RunConfig& c) -> auto& { return c.model.learning_rate; }, "learning rate");
  f.add_parsed("--optimizer", [](RunConfig& c) -> auto& { return c.model.optimizer; },
               [](const std::string& s) { return infa::parse_optimizer(s); }, "sgd or adam");
  f.add("--attack-hidden", [](RunConfig& c) -> auto& { return c.attack_model.hidden_layers; },
        "attack model hidden widths");
  f.add("--attack-epochs", [](RunConfig& c) -> auto& { return c.attack_model.epochs; }, "attack model epochs");
  f.add("--attacks", [](RunConfig& c) -> auto& { return c.attacks; }, "conf, loss, shadow");
  f.add("--shadows", [](RunConfig& c) -> auto& { return c.shadows; }, "shadow model count");
  f.add("--metric", [](RunConfig& c) -> auto& { return c.metric; }, "auto, hamming, manhattan, euclidean");
  f.add("--trials", [](RunConfig& c) -> auto& { return c.trials; }, "membership game trials");
  f.add("--members", [](RunConfig& c) -> auto& { return c.members; }, "members used for stratified AUC");
  f.add("--synthetic", [](RunConfig& c) -> auto& { return c.synthetic; }, "also score synthetic non-members");
  f.add("--distances", [](RunConfig& c) -> auto& { return c.distances; }, "flip distances for binary synthesis");
  f.add("--max-distance", [](RunConfig& c) -> auto& { return c.max_distance; }, "continuous synthesis range");
  f.add("--step", [](RunConfig& c) -> auto& { return c.step; }, "continuous synthesis group width");
  f.add("--per-distance", [](RunConfig& c) -> auto& { return c.per_distance; }, "synthetic points per distance");
  f.add("--radii", [](RunConfig& c) -> auto& { return c.radii; }, "SMI neighbourhood radii");
  f.add("--sampler", [](RunConfig& c) -> auto& { return c.sampler; }, "induced or synthetic");
  f.add("--unknown", [](RunConfig& c) -> auto& { return c.unknown; }, "mrmr:k or comma-separated feature indices");
  f.add("--alpha", [](RunConfig& c) -> auto& { return c.alpha; }, "random-guess or a distance");
  f.add("--bins", [](RunConfig& c) -> auto& { return c.bins; }, "bins per unknown feature");
  f.add("--mrmr-bins", [](RunConfig& c) -> auto& { return c.mrmr_bins; }, "discretization bins for mRMR");
  f.add("--challenges", [](RunConfig& c) -> auto& { return c.challenges; }, "AI challenges per side");
  f.add("--sizes", [](RunConfig& c) -> auto& { return c.sweep_sizes; }, "sweep training sizes");
  f.add("--test-ratio", [](RunConfig& c) -> auto& { return c.sweep_test_ratio; }, "sweep test records per training record");
  f.add("--code-m", [](RunConfig& c) -> auto& { return c.code_m; }, "spread code dimension");
  f.add("--code-n", [](RunConfig& c) -> auto& { return c.code_n; }, "codeword count");
  f.add("--code-r", [](RunConfig& c) -> auto& { return c.code_r; }, "partner radius");
  f.add("--code-k", [](RunConfig& c) -> auto& { return c.code_k; }, "label count");
  f.add("--code-train", [](RunConfig& c) -> auto& { return c.code_train; }, "training draws");
  f.add("--include-code", [](RunConfig& c) -> auto& { return c.include_code; }, "embed codewords in the report");
  f.add("--dr-samples", [](RunConfig& c) -> auto& { return c.dr_samples; }, "decision-region samples");
  f.add("--model-in", [](RunConfig& c) -> auto& { return c.model_in; }, "load the target model checkpoint");
  f.add("--model-out", [](RunConfig& c) -> auto& { return c.model_out; }, "save the target model checkpoint");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"membership and attribute inference experiments"};
  app.require_subcommand(1);
  RunConfig scratch;
  const std::vector<std::pair<std::string, std::string>> kinds{
      {"train", "train a target model"},
      {"mi", "membership inference with distance-stratified AUC"},
      {"smi", "strong membership inference over radii"},
      {"ai", "attribute inference"},
      {"aai", "approximate attribute inference"},
      {"sweep", "attribute inference across training sizes"},
      {"theorem1", "MI/SMI separation on a spread code"},
      {"synth", "write a synthetic dataset as CSV"},
      {"dr", "decision-region volumes and per-class AUC"}};
  std::vector<Command> commands(kinds.size());
  for (std::size_t i = 0; i < kinds.size(); ++i) {
    commands[i].app = app.add_subcommand(kinds[i].first, kinds[i].second);
    commands[i].flags = std::make_unique<Flags>(commands[i].app, scratch);
    add_common(commands[i]);
  }
  CLI11_PARSE(app, argc, argv);

  for (std::size_t i = 0; i < kinds.size(); ++i) {
    Command& cmd = commands[i];
    if (!cmd.app->parsed()) continue;
    RunConfig cfg;
    try {
      if (!cmd.config_path.empty()) cfg = infa::load_run_config(cmd.config_path);
      cmd.flags->apply(cfg);
      cfg.experiment = kinds[i].first;
      cfg.model.validate();
      cfg.attack_model.validate();
    } catch (const std::exception& e) {
      std::cerr << "infa: error: [config] " << e.what() << "\n";
      return 2;
    }
    try {
      infa::RunOutputs outputs{cmd.out, cmd.plot_out};
      auto result = infa::run(cfg, outputs);
      if (cmd.out.empty() && cfg.experiment != "synth") std::cout << result.report.dump();
    } catch (const infa::StageError& e) {
      std::cerr << "infa: error: " << e.what() << "\n";
      return e.stage == "config" ? 2 : 1;
    } catch (const std::exception& e) {
      std::cerr << "infa: error: " << e.what() << "\n";
      return 1;
    }
  }
  return 0;
}
