#pragma once

#include "infa/separation.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>

namespace infa {

using Json = nlohmann::json;

inline constexpr int kReportVersion = 1;

inline Json to_json(const TrainReport& r) {
  Json j{{"train_accuracy", r.train_accuracy}, {"train_loss", r.train_loss}, {"epochs_run", r.epochs_run}, {"seed", r.seed}};
  if (r.test_accuracy) j["test_accuracy"] = *r.test_accuracy;
  if (r.test_loss) j["test_loss"] = *r.test_loss;
  if (r.generalization_error) j["generalization_error"] = *r.generalization_error;
  return j;
}

inline Json to_json(const GeneralizationError& g) {
  return {{"train_accuracy", g.train_accuracy}, {"test_accuracy", g.test_accuracy},
          {"generalization_error", g.accuracy_gap}, {"train_loss", g.train_loss},
          {"test_loss", g.test_loss}, {"loss_difference", g.loss_difference}};
}

inline Json to_json(const MembershipResult& r) {
  Json j{{"trials", r.trials},          {"member_trials", r.member_trials},
         {"nonmember_trials", r.nonmember_trials}, {"advantage", r.advantage},
         {"tpr", r.tpr},                {"fpr", r.fpr},
         {"threshold_source", r.threshold_source}, {"advantage_sigma", r.sigma}};
  if (r.threshold_source != "none") j["threshold"] = r.threshold;
  j["auc"] = r.auc ? Json(*r.auc) : Json(nullptr);
  return j;
}

inline Json to_json(const std::vector<GroupAuc>& groups) {
  Json a = Json::array();
  for (const auto& g : groups) a.push_back({{"key", g.key}, {"count", g.count}, {"auc", g.auc}});
  return a;
}

inline Json to_json(const DecisionRegionProfile& p) {
  return {{"counts", p.counts}, {"volumes", p.volumes}, {"samples", p.samples}, {"seed", p.seed},
          {"dominance_order", p.dominance_order()}};
}

inline Json to_json(const std::vector<ClassGroupAuc>& classes) {
  Json a = Json::array();
  for (const auto& c : classes) {
    Json j{{"class", c.cls}, {"groups", to_json(c.groups)}};
    if (c.volume) j["volume"] = *c.volume;
    if (c.dominance_rank) j["dominance_rank"] = *c.dominance_rank;
    a.push_back(std::move(j));
  }
  return a;
}

inline Json to_json(const AiScorerResult& r) {
  return {{"attack", r.scorer},
          {"members", r.members},
          {"nonmembers", r.nonmembers},
          {"member_exact_rate", r.member_exact_rate},
          {"nonmember_exact_rate", r.nonmember_exact_rate},
          {"ai_advantage", r.ai_advantage},
          {"member_approx_rate", r.member_approx_rate},
          {"nonmember_approx_rate", r.nonmember_approx_rate},
          {"aai_advantage", r.aai_advantage},
          {"ties", {{"mean_size", r.mean_tie_size}, {"max_size", r.max_tie_size}, {"tied_challenges", r.tied_challenges}}}};
}

inline Json to_json(const SweepResult& s) {
  Json rows = Json::array();
  for (const auto& r : s.rows) {
    Json attacks = Json::array();
    for (const auto& a : r.attacks) attacks.push_back(to_json(a));
    rows.push_back({{"size", r.size},
                    {"train_accuracy", r.train_accuracy},
                    {"test_accuracy", r.test_accuracy},
                    {"generalization_error", r.generalization_error},
                    {"loss_difference", r.loss_difference},
                    {"attacks", attacks}});
  }
  return {{"unknown", s.unknown}, {"alpha", s.alpha}, {"rows", rows}};
}

inline Json to_json(const Theorem1Result& r) {
  return {{"mi_advantage", r.mi_advantage}, {"smi_advantage", r.smi_advantage}, {"sigma", r.sigma},
          {"bound", r.bound}, {"expected_mi_advantage", r.expected_mi}, {"trials", r.trials}};
}

// Codewords and partners as bit strings, for audits.
inline Json to_json(const SpreadCode& code) {
  auto bits = [&](std::size_t col) {
    std::string s(code.m, '0');
    for (std::size_t i = 0; i < code.m; ++i)
      if (code.points(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(col)) != 0.0) s[i] = '1';
    return s;
  };
  Json words = Json::array();
  for (std::size_t i = 0; i < code.n_codewords; ++i)
    words.push_back({{"codeword", bits(i)}, {"partner", bits(i + code.n_codewords)}, {"label", code.labels[i]}});
  return {{"m", code.m}, {"r", code.r}, {"k", code.k}, {"n_codewords", code.n_codewords}, {"codewords", words}};
}

// One self-describing document per run. Object keys are sorted and no
// wall-clock data is recorded, so equal inputs give equal bytes.
struct ExperimentReport {
  std::string experiment;
  std::uint64_t seed = 0;
  Json config = Json::object();
  Json results = Json::object();

  Json to_json() const {
    return {{"format", "infa-report"}, {"version", kReportVersion}, {"experiment", experiment},
            {"seed", seed}, {"config", config}, {"results", results}};
  }

  std::string dump() const { return to_json().dump(2) + "\n"; }
};

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot open " + path + " for writing");
  os << text;
  if (!os) throw Error("failed writing " + path);
}

inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Plot data: "# title" lines start a series, followed by "key<TAB>value" rows.
struct PlotSeries {
  std::string title;
  std::vector<std::pair<double, double>> points;
};

inline std::string plot_table(const std::vector<PlotSeries>& series, const std::string& value_name = "auc") {
  std::string out;
  for (const auto& s : series) {
    out += "# " + s.title + "\n# key\t" + value_name + "\n";
    for (const auto& [k, v] : s.points) out += format_double(k) + "\t" + format_double(v) + "\n";
  }
  return out;
}

inline PlotSeries to_series(const std::string& title, const std::vector<GroupAuc>& groups) {
  PlotSeries s{title, {}};
  for (const auto& g : groups) s.points.emplace_back(g.key, g.auc);
  return s;
}

}  // namespace infa
