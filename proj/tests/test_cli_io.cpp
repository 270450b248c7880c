#include "infa/run.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace infa;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

fs::path scratch_dir(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("infa-test-" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

// Runs the CLI, returning its exit status; stderr goes to `err`.
int cli(const std::string& args, const fs::path& err) {
  const std::string cmd = std::string(INFA_CLI_PATH) + " " + args + " > /dev/null 2> " + err.string();
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

const std::string kSmall =
    " --seed 3 --features 30 --records 600 --classes 3 --epochs 8 --hidden 16 --trials 200 --members 40"
    " --distances 1 2 5 --attacks conf loss";

}  // namespace

TEST(Csv, ParsesNamedLabelColumn) {
  std::istringstream in("a,b,label,c\n1,0,yes,1\n0,0,no,1\n\n1,1,yes,0\n0,1,no,0\n");
  DatasetSpec spec;
  auto d = load_dataset(in, spec);
  EXPECT_EQ(d.data.size(), 4u);
  EXPECT_EQ(d.data.dimension(), 3u);
  EXPECT_EQ(d.feature_names, (std::vector<std::string>{"a", "b", "c"}));
  EXPECT_EQ(d.class_names, (std::vector<std::string>{"no", "yes"}));
  EXPECT_EQ(d.data.labels, (std::vector<int>{1, 0, 1, 0}));
  EXPECT_EQ(d.data.features(2, 0), 1.0);
  EXPECT_EQ(d.split.train.size() + d.split.test.size() + d.split.reserve.size(), 4u);
}

TEST(Csv, NumericLabelsSortNumerically) {
  std::istringstream in("x,y\n1,10\n0,9\n1,2\n");
  DatasetSpec spec;
  spec.label_column = "y";
  auto d = load_dataset(in, spec);
  EXPECT_EQ(d.class_names, (std::vector<std::string>{"2", "9", "10"}));
  EXPECT_EQ(d.data.labels, (std::vector<int>{2, 1, 0}));
}

TEST(Csv, RejectsMalformedInput) {
  DatasetSpec spec;
  auto load = [&](const std::string& text) {
    std::istringstream in(text);
    return load_dataset(in, spec);
  };
  EXPECT_THROW(load("a,label\n1,0\n2,1\n"), std::invalid_argument);
  EXPECT_THROW(load("a,label\n1,0,3\n"), std::invalid_argument);
  EXPECT_THROW(load("a,label\nx,0\n"), std::invalid_argument);
  EXPECT_THROW(load("a,b\n1,0\n"), std::invalid_argument);
  EXPECT_THROW(load(""), std::invalid_argument);
  EXPECT_THROW(load("a,label\n"), std::invalid_argument);
  spec.label_column = "derive:kmeans(x)";
  EXPECT_THROW(load("a,b\n1,0\n"), std::invalid_argument);
  spec.path = "/nonexistent/file.csv";
  EXPECT_THROW(load_dataset(spec), std::invalid_argument);
}

TEST(Csv, NormalizationHitsEndpointsAndInverts) {
  std::istringstream in("u,v,label\n3,-5,0\n7,5,1\n4,0,0\n9,2.5,1\n");
  DatasetSpec spec;
  spec.kind = DomainKind::Continuous;
  auto d = load_dataset(in, spec);
  ASSERT_TRUE(d.normalizer);
  EXPECT_EQ(d.data.features.row(0).minCoeff(), -1.0);
  EXPECT_EQ(d.data.features.row(0).maxCoeff(), 1.0);
  EXPECT_EQ(d.data.features(1, 0), -1.0);
  EXPECT_EQ(d.data.features(1, 1), 1.0);
  EXPECT_EQ(d.data.features(1, 2), 0.0);
  Vector raw(2);
  raw << 4, 0;
  EXPECT_LE((d.normalizer->invert(d.data.record(2)) - raw).cwiseAbs().maxCoeff(), 1e-9);
  std::istringstream flat("u,label\n2,0\n2,1\n");
  auto f = load_dataset(flat, spec);
  EXPECT_EQ(f.data.features(0, 0), 0.0);
  EXPECT_EQ(f.normalizer->invert(0, 0.0), 2.0);
}

TEST(Csv, KmeansDerivedLabels) {
  std::ostringstream text;
  text << "a,b\n";
  for (int i = 0; i < 20; ++i) text << (i < 10 ? -5 : 5) + 0.01 * i << ',' << (i < 10 ? -5 : 5) << '\n';
  std::istringstream in(text.str());
  DatasetSpec spec;
  spec.kind = DomainKind::Continuous;
  spec.label_column = "derive:kmeans(2)";
  auto d = load_dataset(in, spec);
  EXPECT_EQ(d.data.classes, 2u);
  for (int i = 0; i < 20; ++i) EXPECT_EQ(d.data.labels[static_cast<std::size_t>(i)] == d.data.labels[0], i < 10);
}

TEST(Csv, WriteThenReadRoundTrips) {
  auto d = synth_dataset(SynthKind::ContinuousClusters, 4, 30, 3, 0.3, 5);
  std::stringstream ss;
  write_csv(ss, d);
  DatasetSpec spec;
  spec.kind = DomainKind::Continuous;
  spec.normalize = false;
  auto back = load_dataset(ss, spec);
  EXPECT_EQ(back.data.features, d.features);
  EXPECT_EQ(back.data.labels, d.labels);
}

TEST(Synth, ShapeLabelsAndDeterminism) {
  auto d = synth_dataset(SynthKind::BinaryClusters, 50, 1000, 4, 0.2, 9);
  EXPECT_EQ(d.size(), 1000u);
  EXPECT_EQ(d.dimension(), 50u);
  EXPECT_EQ(d.class_counts(), (std::vector<std::size_t>{250, 250, 250, 250}));
  EXPECT_TRUE(((d.features.array() == 0.0) || (d.features.array() == 1.0)).all());
  auto again = synth_dataset(SynthKind::BinaryClusters, 50, 1000, 4, 0.2, 9);
  EXPECT_EQ(again.features, d.features);
  EXPECT_EQ(again.labels, d.labels);
  EXPECT_NE(synth_dataset(SynthKind::BinaryClusters, 50, 1000, 4, 0.2, 10).features, d.features);
  EXPECT_THROW(synth_dataset(SynthKind::BinaryClusters, 5, 10, 2, 0.6, 1), std::invalid_argument);
  EXPECT_THROW(synth_dataset(SynthKind::BinaryClusters, 5, 3, 4, 0.1, 1), std::invalid_argument);
}

TEST(Synth, ZeroSpreadPointsSitOnCentres) {
  auto d = synth_dataset(SynthKind::ContinuousClusters, 6, 90, 3, 0.0, 4);
  for (std::size_t i = 0; i < d.size(); ++i)
    for (std::size_t j = 0; j < d.size(); ++j)
      if (d.labels[i] == d.labels[j]) {
        ASSERT_EQ(d.record(i), d.record(j));
      }
  EXPECT_EQ(parse_synth_kind(to_string(SynthKind::ContinuousClusters)), SynthKind::ContinuousClusters);
}

TEST(Config, JsonRoundTripAndUnknownKeys) {
  RunConfig c;
  c.experiment = "aai";
  c.seed = 77;
  c.distances = {1, 3};
  c.attack_model.hidden_layers = {8, 4};
  c.model.activation = Activation::Relu;
  c.alpha = "7.5";
  Json j = to_json(c);
  RunConfig back = run_config_from_json(j, RunConfig{});
  EXPECT_EQ(to_json(back).dump(), j.dump());
  Json bad = j;
  bad["no_such_key"] = 1;
  EXPECT_THROW(run_config_from_json(bad, RunConfig{}), std::exception);
  Json partial = {{"seed", 5}};
  EXPECT_EQ(run_config_from_json(partial, c).experiment, "aai");
  EXPECT_EQ(run_config_from_json(partial, c).seed, 5u);
}

TEST(Cli, MiReportSchemaAndByteIdenticalRepeat) {
  auto dir = scratch_dir("mi");
  ASSERT_EQ(cli("mi" + kSmall + " --out " + (dir / "a.json").string() + " --plot-out " + (dir / "a.tsv").string(),
                dir / "err"), 0)
      << slurp(dir / "err");
  ASSERT_EQ(cli("mi" + kSmall + " --out " + (dir / "b.json").string() + " --plot-out " + (dir / "b.tsv").string(),
                dir / "err"), 0);
  const std::string a = slurp(dir / "a.json");
  EXPECT_EQ(a, slurp(dir / "b.json"));
  EXPECT_EQ(slurp(dir / "a.tsv"), slurp(dir / "b.tsv"));
  Json r = Json::parse(a);
  EXPECT_EQ(r["format"], "infa-report");
  EXPECT_EQ(r["experiment"], "mi");
  EXPECT_EQ(r["seed"], 3);
  ASSERT_EQ(r["results"]["attacks"].size(), 2u);
  for (const auto& attack : r["results"]["attacks"]) {
    EXPECT_EQ(attack["mi"]["trials"], 200);
    EXPECT_TRUE(attack["mi"].contains("advantage"));
    EXPECT_TRUE(attack["mi"].contains("auc"));
    EXPECT_FALSE(attack["synthetic_distance_auc"].empty());
    for (const auto& g : attack["synthetic_distance_auc"]) {
      EXPECT_GE(g["auc"].get<double>(), 0.0);
      EXPECT_LE(g["auc"].get<double>(), 1.0);
    }
  }
  EXPECT_TRUE(r["results"].contains("target"));
}

TEST(Cli, AaiWithExplicitAlphaAndConfigFile) {
  auto dir = scratch_dir("aai");
  std::ofstream(dir / "cfg.json") << R"({"unknown": "0,1,2,3,4,5", "challenges": 30})";
  ASSERT_EQ(cli("aai" + kSmall + " --alpha 7.5 --config " + (dir / "cfg.json").string() + " --out " +
                    (dir / "r.json").string(),
                dir / "err"),
            0)
      << slurp(dir / "err");
  Json r = Json::parse(slurp(dir / "r.json"));
  EXPECT_EQ(r["config"]["alpha"], "7.5");
  EXPECT_EQ(r["config"]["challenges"], 30);
  for (const auto& a : r["results"]["attacks"]) {
    // alpha exceeds |S| = 6, so every challenge succeeds approximately.
    EXPECT_EQ(a["member_approx_rate"], 1.0);
    EXPECT_EQ(a["aai_advantage"], 0.0);
  }
}

TEST(Cli, FailuresCarryStageTags) {
  auto dir = scratch_dir("fail");
  EXPECT_EQ(cli("mi --data-source csv --data /nonexistent.csv", dir / "err"), 1);
  EXPECT_NE(slurp(dir / "err").find("[data]"), std::string::npos) << slurp(dir / "err");
  EXPECT_EQ(cli("mi" + kSmall + " --metric manhattan", dir / "err"), 2);
  EXPECT_NE(slurp(dir / "err").find("[config]"), std::string::npos) << slurp(dir / "err");
  EXPECT_NE(cli("mi --no-such-flag 1", dir / "err"), 0);
  std::ofstream(dir / "bad.json") << R"({"trails": 5})";
  EXPECT_EQ(cli("mi --config " + (dir / "bad.json").string(), dir / "err"), 2);
}

TEST(Cli, SynthWritesCsv) {
  auto dir = scratch_dir("synth");
  ASSERT_EQ(cli("synth --features 7 --records 50 --classes 2 --seed 1 --out " + (dir / "d.csv").string(), dir / "err"),
            0);
  DatasetSpec spec;
  spec.path = (dir / "d.csv").string();
  auto d = load_dataset(spec);
  EXPECT_EQ(d.data.size(), 50u);
  EXPECT_EQ(d.data.dimension(), 7u);
}
