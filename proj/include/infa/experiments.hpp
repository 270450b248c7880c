#pragma once

#include "infa/attacks.hpp"
#include "infa/mrmr.hpp"
#include "infa/statistics.hpp"

#include <map>

namespace infa {

// ---------------------------------------------------------------------------
// Membership games

struct MembershipResult {
  std::size_t trials = 0;
  std::size_t member_trials = 0;
  std::size_t nonmember_trials = 0;
  double advantage = 0.0;
  double tpr = 0.0;
  double fpr = 0.0;
  double threshold = 0.0;
  std::string threshold_source;  // "scorer", "best" (fitted on these scores) or "none"
  std::optional<double> auc;     // empty when one branch never came up
  double sigma = 0.0;            // standard error of the advantage
  Vector member_scores;
  Vector nonmember_scores;
};

inline MembershipResult summarize_membership(Vector member_scores, Vector nonmember_scores,
                                             std::optional<double> threshold) {
  MembershipResult r;
  r.member_trials = static_cast<std::size_t>(member_scores.size());
  r.nonmember_trials = static_cast<std::size_t>(nonmember_scores.size());
  r.trials = r.member_trials + r.nonmember_trials;
  r.member_scores = std::move(member_scores);
  r.nonmember_scores = std::move(nonmember_scores);
  if (r.member_trials == 0 || r.nonmember_trials == 0) {
    r.threshold_source = "none";
    return r;
  }
  std::span<const double> pos(r.member_scores.data(), r.member_trials);
  std::span<const double> neg(r.nonmember_scores.data(), r.nonmember_trials);
  r.auc = auc(pos, neg);
  ThresholdAdvantage t;
  if (threshold) {
    t = advantage_at_threshold(pos, neg, *threshold);
    r.threshold_source = "scorer";
  } else {
    t = best_threshold_advantage(pos, neg);
    r.threshold_source = "best";
  }
  r.advantage = t.advantage;
  r.tpr = t.tpr;
  r.fpr = t.fpr;
  r.threshold = t.threshold;
  r.sigma = std::sqrt(t.tpr * (1.0 - t.tpr) / static_cast<double>(r.member_trials) +
                      t.fpr * (1.0 - t.fpr) / static_cast<double>(r.nonmember_trials));
  return r;
}

namespace detail {

struct Challenges {
  std::vector<Vector> members;
  std::vector<int> member_labels;
  std::vector<Vector> nonmembers;
  std::vector<int> nonmember_labels;
};

inline Matrix stack(const std::vector<Vector>& cols, std::size_t rows) {
  Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j) m.col(static_cast<Eigen::Index>(j)) = cols[j];
  return m;
}

inline MembershipResult score_challenges(const TrainedModel& model, const MembershipScorer& scorer,
                                         const Challenges& c) {
  auto run = [&](const std::vector<Vector>& xs, const std::vector<int>& ys) -> Vector {
    if (xs.empty()) return Vector();
    return scorer.score_columns(model, stack(xs, model.input_dim()), ys);
  };
  return summarize_membership(run(c.members, c.member_labels), run(c.nonmembers, c.nonmember_labels),
                              scorer.threshold(model));
}

}  // namespace detail

// MI game: each trial draws b uniformly, then a member uniformly from
// `train` (b = 1) or a non-member uniformly from `population` (b = 0).
inline MembershipResult mi_experiment(const TrainedModel& model, const LabeledDataset& train,
                                      const LabeledDataset& population, const MembershipScorer& scorer,
                                      std::size_t trials, std::uint64_t seed) {
  if (train.empty() || population.empty()) throw std::invalid_argument("mi_experiment: empty member or population set");
  if (trials == 0) throw std::invalid_argument("mi_experiment: trials must be >= 1");
  detail::Challenges c;
  for (std::size_t t = 0; t < trials; ++t) {
    Rng rng(derive_seed(seed, t));
    if (coin(rng)) {
      auto i = uniform_index(rng, train.size());
      c.members.push_back(train.record(i));
      c.member_labels.push_back(train.labels[i]);
    } else {
      auto i = uniform_index(rng, population.size());
      c.nonmembers.push_back(population.record(i));
      c.nonmember_labels.push_back(population.labels[i]);
    }
  }
  return detail::score_challenges(model, scorer, c);
}

// SMI game: a member x0 is drawn in every trial; b = 0 replaces it by a
// non-member from the sampler within distance r of x0.
inline MembershipResult smi_experiment(const TrainedModel& model, const LabeledDataset& train, double r,
                                       const MembershipScorer& scorer, const NeighborSampler& sampler,
                                       std::size_t trials, std::uint64_t seed) {
  if (train.empty()) throw std::invalid_argument("smi_experiment: empty training set");
  if (!(r > 0.0)) throw std::invalid_argument("smi_experiment: r must be > 0");
  if (trials == 0) throw std::invalid_argument("smi_experiment: trials must be >= 1");
  detail::Challenges c;
  for (std::size_t t = 0; t < trials; ++t) {
    Rng rng(derive_seed(seed, t));
    const bool b = coin(rng);
    auto i = uniform_index(rng, train.size());
    if (b) {
      c.members.push_back(train.record(i));
      c.member_labels.push_back(train.labels[i]);
    } else {
      Neighbor nb = sampler.sample(train.record(i), train.labels[i], r, rng);
      c.nonmembers.push_back(std::move(nb.x));
      c.nonmember_labels.push_back(nb.label);
    }
  }
  return detail::score_challenges(model, scorer, c);
}

// ---------------------------------------------------------------------------
// Distance-stratified analysis

// Hamming distances group by exact value; Manhattan distances by buckets of
// `width` (bucket b holds ((b-1)w, bw]).
struct Grouping {
  double width = 0.0;

  static Grouping exact() { return {0.0}; }
  static Grouping buckets(double w) {
    if (!(w > 0.0)) throw std::invalid_argument("Grouping: bucket width must be > 0");
    return {w};
  }
  static Grouping for_metric(Metric metric) { return metric == Metric::Hamming ? exact() : buckets(0.05); }

  std::int64_t bucket(double d) const {
    if (width == 0.0) return static_cast<std::int64_t>(std::llround(d));
    return static_cast<std::int64_t>(std::ceil(d / width - 1e-9));
  }
  double key(std::int64_t b) const { return width == 0.0 ? static_cast<double>(b) : static_cast<double>(b) * width; }
};

struct ScoredCandidate {
  double score = 0.0;
  double distance = 0.0;   // to the training set
  int nearest_label = 0;   // label of the nearest training vector
};

struct GroupAuc {
  double key = 0.0;
  std::size_t count = 0;
  double auc = 0.5;
};

inline std::vector<ScoredCandidate> score_candidates(const TrainedModel& model, const MembershipScorer& scorer,
                                                     const LabeledDataset& train,
                                                     const std::vector<SyntheticNonMember>& candidates) {
  std::vector<ScoredCandidate> out;
  out.reserve(candidates.size());
  constexpr std::size_t chunk = 8192;
  for (std::size_t start = 0; start < candidates.size(); start += chunk) {
    const std::size_t count = std::min(chunk, candidates.size() - start);
    Matrix x(static_cast<Eigen::Index>(model.input_dim()), static_cast<Eigen::Index>(count));
    std::vector<int> labels(count);
    for (std::size_t j = 0; j < count; ++j) {
      x.col(static_cast<Eigen::Index>(j)) = candidates[start + j].x;
      labels[j] = candidates[start + j].label;
    }
    Vector s = scorer.score_columns(model, x, labels);
    for (std::size_t j = 0; j < count; ++j) {
      const auto& c = candidates[start + j];
      out.push_back({s[static_cast<Eigen::Index>(j)], c.distance, train.labels[c.nearest]});
    }
  }
  return out;
}

// Original non-members as candidates, with their distance to the training set.
inline std::vector<SyntheticNonMember> as_candidates(const LabeledDataset& nonmembers, const LabeledDataset& train,
                                                     Metric metric) {
  NearestNeighborIndex index(train.features, metric);
  std::vector<SyntheticNonMember> out;
  out.reserve(nonmembers.size());
  for (std::size_t i = 0; i < nonmembers.size(); ++i) {
    Nearest n = index.nearest(nonmembers.record(i));
    out.push_back({nonmembers.record(i), nonmembers.labels[i], n.distance, n.index, 0.0});
  }
  return out;
}

// One AUC per non-empty distance group, members as the positive class.
// Candidates at distance 0 are members and never enter a group.
inline std::vector<GroupAuc> distance_stratified_auc(std::span<const double> member_scores,
                                                     std::span<const ScoredCandidate> candidates,
                                                     const Grouping& grouping) {
  std::map<std::int64_t, std::vector<double>> groups;
  for (const auto& c : candidates)
    if (c.distance > 0.0) groups[grouping.bucket(c.distance)].push_back(c.score);
  std::vector<GroupAuc> out;
  for (auto& [b, scores] : groups) out.push_back({grouping.key(b), scores.size(), auc(member_scores, scores)});
  return out;
}

struct DecisionRegionProfile {
  std::vector<std::size_t> counts;
  std::vector<double> volumes;  // sum to exactly 1
  std::size_t samples = 0;
  std::uint64_t seed = 0;

  // Classes by decreasing volume (ties to the lower index).
  std::vector<std::size_t> dominance_order() const {
    std::vector<std::size_t> order(counts.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return counts[a] > counts[b]; });
    return order;
  }
};

// Fractions counts/n rounded onto the grid 2^-52 by largest remainder, so
// the doubles add up to exactly 1 in any order.
inline std::vector<double> exact_fractions(const std::vector<std::size_t>& counts) {
  using u128 = unsigned __int128;
  const u128 scale = u128{1} << 52;
  const u128 n = std::accumulate(counts.begin(), counts.end(), u128{0});
  if (n == 0) throw std::invalid_argument("exact_fractions: all counts are zero");
  std::vector<u128> q(counts.size()), rem(counts.size());
  u128 assigned = 0;
  for (std::size_t j = 0; j < counts.size(); ++j) {
    q[j] = u128{counts[j]} * scale / n;
    rem[j] = u128{counts[j]} * scale % n;
    assigned += q[j];
  }
  std::vector<std::size_t> order(counts.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return rem[a] > rem[b]; });
  for (std::size_t t = 0; assigned < scale; ++t, ++assigned) ++q[order[t]];
  std::vector<double> out(counts.size());
  for (std::size_t j = 0; j < counts.size(); ++j) out[j] = std::ldexp(static_cast<double>(q[j]), -52);
  return out;
}

// Share of the feature space labelled j, from uniform samples of D^m.
inline DecisionRegionProfile decision_region_volumes(const TrainedModel& model, const FeatureDomain& domain,
                                                     std::size_t n_samples, std::uint64_t seed) {
  if (n_samples == 0) throw std::invalid_argument("decision_region_volumes: n_samples must be >= 1");
  if (domain.dimension != model.input_dim())
    throw std::invalid_argument("decision_region_volumes: domain does not match model input");
  DecisionRegionProfile p;
  p.counts.assign(model.classes, 0);
  p.samples = n_samples;
  p.seed = seed;
  Rng rng(derive_seed(seed, "decision-regions"));
  constexpr std::size_t chunk = 16384;
  const auto m = static_cast<Eigen::Index>(domain.dimension);
  for (std::size_t start = 0; start < n_samples; start += chunk) {
    const auto count = static_cast<Eigen::Index>(std::min(chunk, n_samples - start));
    Matrix x(m, count);
    for (Eigen::Index j = 0; j < count; ++j)
      for (Eigen::Index i = 0; i < m; ++i)
        x(i, j) = domain.kind == DomainKind::Binary ? (coin(rng) ? 1.0 : 0.0) : uniform_real(rng, -1.0, 1.0);
    for (int y : predict_labels(model, x)) ++p.counts[static_cast<std::size_t>(y)];
  }
  p.volumes = exact_fractions(p.counts);
  return p;
}

struct ClassGroupAuc {
  std::size_t cls = 0;
  std::optional<double> volume;             // decision-region share, when a profile was given
  std::optional<std::size_t> dominance_rank; // 0 = largest region
  std::vector<GroupAuc> groups;
};

// distance_stratified_auc within each class: members of class c against
// candidates whose nearest training vector has label c. Classes without
// members or candidates are omitted.
inline std::vector<ClassGroupAuc> per_class_stratified_auc(std::span<const double> member_scores,
                                                           std::span<const int> member_labels,
                                                           std::span<const ScoredCandidate> candidates,
                                                           const Grouping& grouping,
                                                           const DecisionRegionProfile* profile = nullptr) {
  if (member_scores.size() != member_labels.size())
    throw std::invalid_argument("per_class_stratified_auc: member score/label length mismatch");
  std::map<int, std::vector<double>> pos;
  std::map<int, std::vector<ScoredCandidate>> neg;
  for (std::size_t i = 0; i < member_scores.size(); ++i) pos[member_labels[i]].push_back(member_scores[i]);
  for (const auto& c : candidates) neg[c.nearest_label].push_back(c);
  std::vector<std::size_t> rank;
  if (profile) {
    auto order = profile->dominance_order();
    rank.resize(order.size());
    for (std::size_t r = 0; r < order.size(); ++r) rank[order[r]] = r;
  }
  std::vector<ClassGroupAuc> out;
  for (auto& [cls, scores] : pos) {
    auto it = neg.find(cls);
    if (it == neg.end()) continue;
    ClassGroupAuc g;
    g.cls = static_cast<std::size_t>(cls);
    g.groups = distance_stratified_auc(scores, it->second, grouping);
    if (g.groups.empty()) continue;
    if (profile && g.cls < rank.size()) {
      g.volume = profile->volumes[g.cls];
      g.dominance_rank = rank[g.cls];
    }
    out.push_back(std::move(g));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Attribute inference

struct AiJudgement {
  std::size_t tie_size = 0;
  bool truth_in_top = false;
  double exact_weight = 0.0;   // 1/t when the truth is among t tied top candidates
  double approx_weight = 0.0;  // share of tied top candidates within alpha of the truth
};

// Judges the top-score tie set of one challenge. A candidate counts as
// exact when it matches the truth bin-for-bin; it counts as approximate when
// exact or within alpha of the truth.
inline AiJudgement judge_ai(const Vector& scores, const SiblingSet& siblings, const VectorRef& truth, double alpha,
                            Metric metric, std::vector<std::size_t>* top_out = nullptr) {
  if (static_cast<std::size_t>(scores.size()) != siblings.size())
    throw std::invalid_argument("judge_ai: score count does not match sibling count");
  const double best = scores.maxCoeff();
  std::vector<std::size_t> top;
  for (Eigen::Index c = 0; c < scores.size(); ++c)
    if (scores[c] == best) top.push_back(static_cast<std::size_t>(c));
  const auto truth_index = siblings.index_of(truth);
  AiJudgement j;
  j.tie_size = top.size();
  std::size_t close = 0;
  for (std::size_t c : top) {
    const bool exact = truth_index && *truth_index == c;
    if (exact) j.truth_in_top = true;
    if (exact || siblings.distance_to(c, truth, metric) <= alpha) ++close;
  }
  const double t = static_cast<double>(top.size());
  j.exact_weight = j.truth_in_top ? 1.0 / t : 0.0;
  j.approx_weight = static_cast<double>(close) / t;
  if (top_out) *top_out = std::move(top);
  return j;
}

struct AiAttackResult {
  std::vector<std::size_t> top;  // indices into the sibling set
  double top_score = 0.0;
  AiJudgement judgement;
};

// Scores every sibling of the portion under the true label and returns the
// maximum-score set, judged against `truth`.
inline AiAttackResult ai_attack(const TrainedModel& model, const MembershipScorer& scorer, const Portion& portion,
                                DomainKind kind, std::size_t bins, int label, const VectorRef& truth,
                                double alpha = 0.0, Metric metric = Metric::Hamming,
                                std::size_t cap = kDefaultSiblingCap) {
  SiblingSet siblings = enumerate_siblings(portion, kind, bins, cap);
  Vector scores = scorer.score_siblings(model, siblings, label);
  AiAttackResult r;
  r.judgement = judge_ai(scores, siblings, truth, alpha, metric, &r.top);
  r.top_score = scores.maxCoeff();
  return r;
}

struct AiConfig {
  std::vector<std::size_t> unknown;  // S
  std::size_t bins = 2;
  double alpha = 0.0;
  Metric metric = Metric::Hamming;
  std::size_t challenges = 0;  // per side; 0 uses every record
  std::size_t cap = kDefaultSiblingCap;
  std::uint64_t seed = 0;
};

struct AiScorerResult {
  std::string scorer;
  std::size_t members = 0;
  std::size_t nonmembers = 0;
  double member_exact_rate = 0.0;
  double nonmember_exact_rate = 0.0;
  double ai_advantage = 0.0;
  double member_approx_rate = 0.0;
  double nonmember_approx_rate = 0.0;
  double aai_advantage = 0.0;
  double mean_tie_size = 0.0;
  std::size_t max_tie_size = 0;
  std::size_t tied_challenges = 0;  // challenges whose top set has more than one candidate
};

namespace detail {

inline std::vector<std::size_t> pick_challenges(std::size_t available, std::size_t wanted, std::uint64_t seed) {
  if (wanted == 0 || wanted >= available) {
    std::vector<std::size_t> all(available);
    std::iota(all.begin(), all.end(), std::size_t{0});
    return all;
  }
  Rng rng(seed);
  auto idx = sample_without_replacement(rng, available, wanted);
  std::sort(idx.begin(), idx.end());
  return idx;
}

}  // namespace detail

// Experiments 3 and 4 for several scorers on the same challenges. Output
// scorers share one confidence evaluation per sibling set.
inline std::vector<AiScorerResult> evaluate_attribute_inference(const TrainedModel& model,
                                                                std::span<const MembershipScorer* const> scorers,
                                                                const LabeledDataset& members,
                                                                const LabeledDataset& nonmembers,
                                                                const AiConfig& cfg) {
  if (scorers.empty()) throw std::invalid_argument("evaluate_attribute_inference: no scorers");
  if (members.empty() || nonmembers.empty())
    throw std::invalid_argument("evaluate_attribute_inference: empty member or non-member set");
  if (cfg.alpha < 0.0) throw std::invalid_argument("evaluate_attribute_inference: alpha must be >= 0");
  std::vector<AiScorerResult> out(scorers.size());
  std::vector<double> tie_total(scorers.size(), 0.0);
  for (std::size_t s = 0; s < scorers.size(); ++s) out[s].scorer = scorers[s]->name();
  std::vector<const OutputScorer*> output(scorers.size());
  bool all_output = true;
  for (std::size_t s = 0; s < scorers.size(); ++s) {
    output[s] = dynamic_cast<const OutputScorer*>(scorers[s]);
    all_output = all_output && output[s] != nullptr;
  }

  for (int side = 1; side >= 0; --side) {
    const LabeledDataset& data = side ? members : nonmembers;
    auto idx = detail::pick_challenges(data.size(), cfg.challenges, derive_seed(cfg.seed, side ? "ai-members" : "ai-nonmembers"));
    for (std::size_t i : idx) {
      const auto truth = data.record(i);
      SiblingSet siblings = enumerate_siblings(make_portion(truth, cfg.unknown), data.domain, cfg.bins, cfg.cap);
      const int label[1] = {data.labels[i]};
      Matrix probs;
      if (all_output) probs = predict_proba_siblings(model, siblings);
      for (std::size_t s = 0; s < scorers.size(); ++s) {
        Vector scores = all_output ? output[s]->score_confidences(model, probs, label)
                                   : scorers[s]->score_siblings(model, siblings, label[0]);
        AiJudgement j = judge_ai(scores, siblings, truth, cfg.alpha, cfg.metric);
        auto& r = out[s];
        (side ? r.member_exact_rate : r.nonmember_exact_rate) += j.exact_weight;
        (side ? r.member_approx_rate : r.nonmember_approx_rate) += j.approx_weight;
        (side ? r.members : r.nonmembers) += 1;
        tie_total[s] += static_cast<double>(j.tie_size);
        r.max_tie_size = std::max(r.max_tie_size, j.tie_size);
        if (j.tie_size > 1) ++r.tied_challenges;
      }
    }
  }
  for (std::size_t s = 0; s < scorers.size(); ++s) {
    auto& r = out[s];
    const double nm = static_cast<double>(r.members), nn = static_cast<double>(r.nonmembers);
    r.member_exact_rate /= nm;
    r.member_approx_rate /= nm;
    r.nonmember_exact_rate /= nn;
    r.nonmember_approx_rate /= nn;
    r.ai_advantage = r.member_exact_rate - r.nonmember_exact_rate;
    r.aai_advantage = r.member_approx_rate - r.nonmember_approx_rate;
    r.mean_tie_size = tie_total[s] / (nm + nn);
  }
  return out;
}

inline double ai_advantage(const TrainedModel& model, const MembershipScorer& scorer, const LabeledDataset& members,
                           const LabeledDataset& nonmembers, AiConfig cfg) {
  cfg.alpha = 0.0;
  const MembershipScorer* s[1] = {&scorer};
  return evaluate_attribute_inference(model, s, members, nonmembers, cfg)[0].ai_advantage;
}

inline double aai_advantage(const TrainedModel& model, const MembershipScorer& scorer, const LabeledDataset& members,
                            const LabeledDataset& nonmembers, const AiConfig& cfg) {
  const MembershipScorer* s[1] = {&scorer};
  return evaluate_attribute_inference(model, s, members, nonmembers, cfg)[0].aai_advantage;
}

// ---------------------------------------------------------------------------
// Overfitting sweep

enum class AttackKind { Conf, Loss, Shadow };

inline std::string_view to_string(AttackKind a) {
  switch (a) {
    case AttackKind::Conf: return "conf";
    case AttackKind::Loss: return "loss";
    case AttackKind::Shadow: return "shadow";
  }
  return "?";
}

inline AttackKind parse_attack(std::string_view s) {
  if (s == "conf") return AttackKind::Conf;
  if (s == "loss") return AttackKind::Loss;
  if (s == "shadow") return AttackKind::Shadow;
  throw std::invalid_argument("unknown attack: " + std::string(s));
}

struct SweepConfig {
  std::vector<std::size_t> sizes;
  double test_ratio = 0.5;  // test records per training record
  MlpConfig target;
  MlpConfig attack;
  std::size_t shadows = 2;
  std::vector<AttackKind> attacks{AttackKind::Conf, AttackKind::Loss, AttackKind::Shadow};
  std::vector<std::size_t> unknown;  // explicit S; empty selects by mRMR
  std::size_t mrmr_features = 15;
  std::size_t mrmr_bins = 10;
  std::size_t bins = 2;
  std::optional<double> alpha;       // empty: expected random-guess distance
  std::size_t challenges = 500;
  std::uint64_t seed = 0;
};

struct SweepRow {
  std::size_t size = 0;
  double train_accuracy = 0.0;
  double test_accuracy = 0.0;
  double generalization_error = 0.0;
  double loss_difference = 0.0;
  std::vector<AiScorerResult> attacks;
};

struct SweepResult {
  std::vector<std::size_t> unknown;
  double alpha = 0.0;
  std::vector<SweepRow> rows;
};

// Builds the AI scorers for a target; shadow attacks are trained on `pool`
// with shadow training sets as large as the target's.
struct AiScorerSet {
  std::vector<std::unique_ptr<MembershipScorer>> owned;
  std::vector<const MembershipScorer*> view;
};

inline AiScorerSet make_ai_scorers(std::span<const AttackKind> kinds, const LabeledDataset* shadow_pool,
                                   std::size_t shadow_size, std::size_t shadows, const MlpConfig& target,
                                   const MlpConfig& attack, std::uint64_t seed) {
  AiScorerSet set;
  for (AttackKind k : kinds) {
    switch (k) {
      case AttackKind::Conf: set.owned.push_back(std::make_unique<ConfidenceScorer>()); break;
      case AttackKind::Loss:
        set.owned.push_back(std::make_unique<LossScorer>(LossScorer::Mode::TrainingLossProximity));
        break;
      case AttackKind::Shadow: {
        if (!shadow_pool) throw std::invalid_argument("shadow attack needs a shadow pool");
        ShadowOptions opts;
        opts.split_size = shadow_size;
        auto trained = train_shadow_attack(*shadow_pool, shadows, target, attack, seed, opts);
        set.owned.push_back(std::make_unique<ShadowScorer>(std::make_shared<ShadowAttackModel>(std::move(trained.attack))));
        break;
      }
    }
  }
  for (auto& s : set.owned) set.view.push_back(s.get());
  return set;
}

// One target per training size. The pool is shuffled once into a training
// region (nested prefixes), a test region and a shadow region, so sizes
// differ only in how much training data the target sees.
inline SweepResult overfitting_sweep(const LabeledDataset& pool, const SweepConfig& cfg) {
  if (cfg.sizes.empty()) throw std::invalid_argument("overfitting_sweep: no sizes");
  if (!std::is_sorted(cfg.sizes.begin(), cfg.sizes.end()) ||
      std::adjacent_find(cfg.sizes.begin(), cfg.sizes.end()) != cfg.sizes.end())
    throw std::invalid_argument("overfitting_sweep: sizes must be strictly ascending");
  if (!(cfg.test_ratio > 0.0)) throw std::invalid_argument("overfitting_sweep: test_ratio must be > 0");
  const std::size_t largest = cfg.sizes.back();
  const auto test_size = [&](std::size_t n) { return std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(cfg.test_ratio * static_cast<double>(n)))); };
  const bool shadow = std::find(cfg.attacks.begin(), cfg.attacks.end(), AttackKind::Shadow) != cfg.attacks.end();
  const std::size_t shadow_need = shadow ? 2 * cfg.shadows * largest : 0;
  if (largest + test_size(largest) + shadow_need > pool.size())
    throw std::invalid_argument("overfitting_sweep: size " + std::to_string(largest) + " needs " +
                                std::to_string(largest + test_size(largest) + shadow_need) + " records, pool has " +
                                std::to_string(pool.size()));

  Rng rng(derive_seed(cfg.seed, "sweep-regions"));
  auto order = permutation(rng, pool.size());
  std::span<const std::size_t> all(order);
  LabeledDataset train_region = pool.subset(all.subspan(0, largest));
  LabeledDataset test_region = pool.subset(all.subspan(largest, test_size(largest)));
  LabeledDataset shadow_region = pool.subset(all.subspan(largest + test_size(largest)));

  SweepResult result;
  result.unknown = cfg.unknown.empty() ? mrmr_select(pool, cfg.mrmr_features, cfg.mrmr_bins) : cfg.unknown;
  const Metric metric = default_metric(pool.domain);
  result.alpha = cfg.alpha ? *cfg.alpha : expected_random_guess_distance(metric, result.unknown.size());

  for (std::size_t n : cfg.sizes) {
    LabeledDataset train = train_region.slice(0, n);
    LabeledDataset test = test_region.slice(0, test_size(n));
    auto trained = train_mlp(train, pool.classes, cfg.target, &test);
    auto gen = generalization_error(trained.model, train, test);
    SweepRow row;
    row.size = n;
    row.train_accuracy = gen.train_accuracy;
    row.test_accuracy = gen.test_accuracy;
    row.generalization_error = gen.accuracy_gap;
    row.loss_difference = gen.loss_difference;
    auto scorers = make_ai_scorers(cfg.attacks, &shadow_region, n, cfg.shadows, cfg.target, cfg.attack,
                                   derive_seed(cfg.seed, n));
    AiConfig ai;
    ai.unknown = result.unknown;
    ai.bins = cfg.bins;
    ai.alpha = result.alpha;
    ai.metric = metric;
    ai.challenges = cfg.challenges;
    ai.seed = derive_seed(cfg.seed, "sweep-challenges");
    row.attacks = evaluate_attribute_inference(trained.model, scorers.view, train, test, ai);
    result.rows.push_back(std::move(row));
  }
  return result;
}

}  // namespace infa
