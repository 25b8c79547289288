#pragma once

#include <optional>
#include <span>
#include <vector>

#include "prmlab/core.hpp"
#include "prmlab/policy.hpp"
#include "prmlab/rng.hpp"
#include "prmlab/simworld.hpp"
#include "prmlab/verify.hpp"

namespace prmlab {

enum class Updater { kReinforce, kGrpo };
enum class UpdateOrder { kStreamOrder };

struct TtrlConfig {
  double learning_rate = 0.05;  // documented default; >= 0, 0 is a no-op control
  Updater updater = Updater::kReinforce;
  double clip_ratio = 0.2;      // GRPO only, in (0, 1]
  double kl_coefficient = 0.0;  // GRPO only, >= 0
  double group_std_epsilon = 1e-8;
  UpdateOrder update_order = UpdateOrder::kStreamOrder;
};

void validate_ttrl(const TtrlConfig& cfg);

const char* to_string(Updater u);
Updater updater_from_string(const std::string& name);  // throws ConfigError

// Binary agreement rewards: values[i] = 1 iff answer i equals the pseudo-label.
// Throws DataError when the pseudo-label is outside the answer space.
std::vector<double> assign_rewards(const CandidateSet& cs, const AnswerId& pseudo_label);

// Group-normalized advantages (r - mean) / (population std + eps); exactly
// zero for every sample when the rewards have no variance.
std::vector<double> group_advantages(std::span<const double> rewards, const TtrlConfig& cfg);

// Exact score-function gradient over the q_class row:
// onehot(answer) - softmax(logits[q_class]). Other rows have zero gradient.
std::vector<double> policy_log_prob_grad(const PolicyParams& theta, int q_class, int answer);

// Gradient of one sample's clipped-surrogate contribution
// min(rho * A, clip(rho, 1-c, 1+c) * A) against a frozen reference
// distribution; zero when the clip branch is active.
std::vector<double> grpo_sample_grad(const PolicyParams& theta, int q_class, int answer,
                                     double advantage, std::span<const double> ref_probs,
                                     const TtrlConfig& cfg);

// One ascent step on the q_class row; every other row is returned
// bit-identical. GRPO uses the pre-step policy as its frozen reference and
// subtracts kl_coefficient times the gradient of KL(current || reference).
// Throws DivergenceError on non-finite parameters or gradients.
PolicyParams ttrl_step(const PolicyParams& theta, const CandidateSet& cs, int q_class,
                       std::span<const double> rewards, const TtrlConfig& cfg);

struct TtrlStepLog {
  int stream_index = 0;
  int q_class = 0;
  AnswerId pseudo_label;
  double mean_reward = 0.0;
  std::optional<bool> pseudo_label_correct;  // set when ground truth is known
};

struct TtrlRunResult {
  PolicyParams params;
  std::vector<TtrlStepLog> log;
  bool diverged = false;  // divergence aborts the stream, keeping the partial log
};

// Test-time adaptation over a question stream, in stream order: sample M
// candidates from the current policy, score them, pseudo-label via SC+RM,
// assign agreement rewards, and take one policy step per question.
TtrlRunResult ttrl_run(PolicyParams theta, std::span<const int> question_classes,
                       const SimWorld& world, const WeightingConfig& wcfg,
                       const TtrlConfig& tcfg, int M, const RngStream& rng);

}  // namespace prmlab
