#pragma once

#include <span>
#include <vector>

#include "prmlab/core.hpp"
#include "prmlab/policy.hpp"
#include "prmlab/rng.hpp"
#include "prmlab/select.hpp"

namespace prmlab {

// Step-score generator. Beta keeps scores on [0, 1]; a point mass models a
// noiseless verifier (the degenerate Beta limit).
struct ScoreDist {
  enum class Kind { kBeta, kPoint };
  Kind kind = Kind::kBeta;
  double alpha = 8.0;  // Beta shape parameters, > 0
  double beta = 2.0;
  double value = 1.0;  // point-mass location, in [0, 1]

  static ScoreDist beta_dist(double a, double b);
  static ScoreDist point_mass(double v);
  double sample(RngStream& rng) const;
};

void validate_score_dist(const ScoreDist& dist, const std::string& field);

struct WorldConfig {
  int num_question_classes = 4;  // Q
  int answers_per_question = 4;  // K
  // Initial logit bias toward one designated wrong answer per class; models
  // correlated errors so the most frequent answer need not be correct.
  double consensus_error_strength = 0.0;
  ScoreDist correct_score_dist = ScoreDist::beta_dist(8.0, 2.0);
  ScoreDist incorrect_score_dist = ScoreDist::beta_dist(2.0, 8.0);
  // Probability a trajectory's score distribution is swapped (verifier noise).
  double verifier_flip_prob = 0.0;
  // Step counts are uniform over {3..9}.
};

void validate_world(const WorldConfig& cfg);

struct SimWorld {
  WorldConfig config;
  std::vector<AnswerId> labels;    // K shared answer labels
  std::vector<int> ground_truth;   // per class, index into labels
  std::vector<int> error_answer;   // per class, designated consensus-error answer

  Question make_question(int q_class) const;
};

// Deterministic in (cfg, stream key). Per class c: ground truth is draw
// fork(c, 0).next_below(K); the error answer is drawn without replacement as
// j = fork(c, 1).next_below(K - 1), skipping the ground-truth slot.
SimWorld build_world(const WorldConfig& cfg, const RngStream& rng);

// Samples M trajectories for one question of class q_class. Answers are iid
// from softmax(logits[q_class] + consensus bias); per candidate i the
// substream rng.fork(i) drives, in order: the answer draw, the step-count
// draw, the flip draw, then the per-step score draws. Every emitted
// trajectory passes validation by construction.
CandidateSet sample_candidates(const SimWorld& world, int q_class, const PolicyParams& theta,
                               int M, const RngStream& rng);

// Fraction of selections whose chosen answer equals the class ground truth.
double oracle_accuracy(std::span<const SelectionResult> selections, const SimWorld& world,
                       std::span<const int> q_classes);

}  // namespace prmlab
