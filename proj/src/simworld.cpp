#include "prmlab/simworld.hpp"

#include <cmath>
#include <random>

namespace prmlab {

ScoreDist ScoreDist::beta_dist(double a, double b) {
  ScoreDist d;
  d.kind = Kind::kBeta;
  d.alpha = a;
  d.beta = b;
  return d;
}

ScoreDist ScoreDist::point_mass(double v) {
  ScoreDist d;
  d.kind = Kind::kPoint;
  d.value = v;
  return d;
}

double ScoreDist::sample(RngStream& rng) const {
  if (kind == Kind::kPoint) return value;
  std::gamma_distribution<double> ga(alpha, 1.0);
  std::gamma_distribution<double> gb(beta, 1.0);
  double x = ga(rng);
  double y = gb(rng);
  if (x + y == 0.0) return 0.5;
  return x / (x + y);
}

void validate_score_dist(const ScoreDist& dist, const std::string& field) {
  if (dist.kind == ScoreDist::Kind::kBeta) {
    if (!(dist.alpha > 0.0) || !(dist.beta > 0.0) || !std::isfinite(dist.alpha) ||
        !std::isfinite(dist.beta)) {
      throw ConfigError(field + ": Beta parameters must be finite and > 0");
    }
  } else {
    if (!(dist.value >= 0.0 && dist.value <= 1.0)) {
      throw ConfigError(field + ": point mass must lie in [0, 1]");
    }
  }
}

void validate_world(const WorldConfig& cfg) {
  if (cfg.num_question_classes < 1) {
    throw ConfigError("world.num_question_classes must be >= 1");
  }
  if (cfg.answers_per_question < 2) {
    throw ConfigError("world.answers_per_question must be >= 2");
  }
  if (!(cfg.consensus_error_strength >= 0.0) || !std::isfinite(cfg.consensus_error_strength)) {
    throw ConfigError("world.consensus_error_strength must be finite and >= 0");
  }
  if (!(cfg.verifier_flip_prob >= 0.0 && cfg.verifier_flip_prob < 1.0)) {
    throw ConfigError("world.verifier_flip_prob must lie in [0, 1)");
  }
  validate_score_dist(cfg.correct_score_dist, "world.correct_score_dist");
  validate_score_dist(cfg.incorrect_score_dist, "world.incorrect_score_dist");
}

Question SimWorld::make_question(int q_class) const {
  Question q;
  q.id = "q" + std::to_string(q_class);
  q.answer_space = labels;
  q.ground_truth = labels[static_cast<std::size_t>(ground_truth[q_class])];
  return q;
}

SimWorld build_world(const WorldConfig& cfg, const RngStream& rng) {
  validate_world(cfg);
  const int k = cfg.answers_per_question;
  SimWorld world;
  world.config = cfg;
  world.labels = make_answer_labels(k);
  world.ground_truth.resize(static_cast<std::size_t>(cfg.num_question_classes));
  world.error_answer.resize(static_cast<std::size_t>(cfg.num_question_classes));
  for (int c = 0; c < cfg.num_question_classes; ++c) {
    RngStream gt_stream = rng.fork(static_cast<uint64_t>(c), 0);
    RngStream err_stream = rng.fork(static_cast<uint64_t>(c), 1);
    int gt = static_cast<int>(gt_stream.next_below(static_cast<uint64_t>(k)));
    int j = static_cast<int>(err_stream.next_below(static_cast<uint64_t>(k - 1)));
    world.ground_truth[static_cast<std::size_t>(c)] = gt;
    world.error_answer[static_cast<std::size_t>(c)] = j < gt ? j : j + 1;
  }
  return world;
}

CandidateSet sample_candidates(const SimWorld& world, int q_class, const PolicyParams& theta,
                               int M, const RngStream& rng) {
  const WorldConfig& cfg = world.config;
  if (M < 1) throw DataError("sample_candidates: M must be >= 1");
  if (q_class < 0 || q_class >= cfg.num_question_classes) {
    throw DataError("sample_candidates: q_class out of range");
  }
  if (theta.num_answers != cfg.answers_per_question || q_class >= theta.num_classes) {
    throw DataError("sample_candidates: policy shape does not match world");
  }
  const int gt = world.ground_truth[static_cast<std::size_t>(q_class)];
  const int err = world.error_answer[static_cast<std::size_t>(q_class)];

  std::vector<double> row(theta.logits.begin() +
                              static_cast<std::ptrdiff_t>(q_class) * theta.num_answers,
                          theta.logits.begin() +
                              static_cast<std::ptrdiff_t>(q_class + 1) * theta.num_answers);
  row[static_cast<std::size_t>(err)] += cfg.consensus_error_strength;
  std::vector<double> probs = softmax(row);

  Question question = world.make_question(q_class);
  std::vector<Trajectory> trajectories;
  trajectories.reserve(static_cast<std::size_t>(M));
  for (int i = 0; i < M; ++i) {
    RngStream sub = rng.fork(static_cast<uint64_t>(i));
    double u = sub.next_double();
    int answer = theta.num_answers - 1;
    double cum = 0.0;
    for (int a = 0; a < theta.num_answers; ++a) {
      cum += probs[static_cast<std::size_t>(a)];
      if (u < cum) {
        answer = a;
        break;
      }
    }
    int steps = kMinStepCount +
                static_cast<int>(sub.next_below(kMaxStepCount - kMinStepCount + 1));
    bool flip = sub.next_double() < cfg.verifier_flip_prob;
    bool use_correct = (answer == gt) != flip;
    const ScoreDist& dist = use_correct ? cfg.correct_score_dist : cfg.incorrect_score_dist;

    Trajectory t;
    t.question_id = question.id;
    t.candidate_index = i;
    t.answer = world.labels[static_cast<std::size_t>(answer)];
    t.steps.reserve(static_cast<std::size_t>(steps));
    t.step_scores.reserve(static_cast<std::size_t>(steps));
    for (int s = 0; s < steps; ++s) {
      t.steps.push_back("step-" + std::to_string(s + 1));
      t.step_scores.push_back(dist.sample(sub));
    }
    trajectories.push_back(std::move(t));
  }
  return build_candidate_set(question, std::move(trajectories));
}

double oracle_accuracy(std::span<const SelectionResult> selections, const SimWorld& world,
                       std::span<const int> q_classes) {
  if (selections.size() != q_classes.size()) {
    throw DataError("oracle_accuracy: selections and q_classes misaligned");
  }
  if (selections.empty()) throw DataError("oracle_accuracy: empty input");
  int hits = 0;
  for (std::size_t i = 0; i < selections.size(); ++i) {
    int c = q_classes[i];
    const AnswerId& truth = world.labels[static_cast<std::size_t>(world.ground_truth[c])];
    if (selections[i].chosen == truth) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(selections.size());
}

}  // namespace prmlab
