#include "prmlab/ttrl.hpp"

#include <algorithm>
#include <cmath>

namespace prmlab {

void validate_ttrl(const TtrlConfig& cfg) {
  if (!(cfg.learning_rate >= 0.0) || !std::isfinite(cfg.learning_rate)) {
    throw ConfigError("ttrl.learning_rate must be finite and >= 0");
  }
  if (!(cfg.clip_ratio > 0.0 && cfg.clip_ratio <= 1.0)) {
    throw ConfigError("ttrl.clip_ratio must lie in (0, 1]");
  }
  if (!(cfg.kl_coefficient >= 0.0) || !std::isfinite(cfg.kl_coefficient)) {
    throw ConfigError("ttrl.kl_coefficient must be finite and >= 0");
  }
  if (!(cfg.group_std_epsilon > 0.0)) {
    throw ConfigError("ttrl.group_std_epsilon must be > 0");
  }
}

const char* to_string(Updater u) {
  switch (u) {
    case Updater::kReinforce: return "REINFORCE";
    case Updater::kGrpo: return "GRPO";
  }
  return "UNKNOWN";
}

Updater updater_from_string(const std::string& name) {
  if (name == "REINFORCE") return Updater::kReinforce;
  if (name == "GRPO") return Updater::kGrpo;
  throw ConfigError("unknown updater '" + name + "' (expected REINFORCE or GRPO)");
}

std::vector<double> assign_rewards(const CandidateSet& cs, const AnswerId& pseudo_label) {
  if (!cs.question.contains(pseudo_label)) {
    throw DataError("assign_rewards: pseudo-label '" + pseudo_label.label +
                    "' outside answer_space of question '" + cs.question.id + "'");
  }
  std::vector<double> r(cs.trajectories.size(), 0.0);
  for (std::size_t i = 0; i < cs.trajectories.size(); ++i) {
    if (cs.trajectories[i].answer == pseudo_label) r[i] = 1.0;
  }
  return r;
}

std::vector<double> group_advantages(std::span<const double> rewards, const TtrlConfig& cfg) {
  std::vector<double> a(rewards.size(), 0.0);
  if (rewards.empty()) return a;
  bool constant = true;
  for (double r : rewards) {
    if (r != rewards[0]) {
      constant = false;
      break;
    }
  }
  if (constant) return a;
  double mean = 0.0;
  for (double r : rewards) mean += r;
  mean /= static_cast<double>(rewards.size());
  double var = 0.0;
  for (double r : rewards) var += (r - mean) * (r - mean);
  var /= static_cast<double>(rewards.size());
  double denom = std::sqrt(var) + cfg.group_std_epsilon;
  for (std::size_t i = 0; i < rewards.size(); ++i) {
    a[i] = (rewards[i] - mean) / denom;
  }
  return a;
}

std::vector<double> policy_log_prob_grad(const PolicyParams& theta, int q_class, int answer) {
  if (q_class < 0 || q_class >= theta.num_classes) {
    throw DataError("policy_log_prob_grad: q_class out of range");
  }
  if (answer < 0 || answer >= theta.num_answers) {
    throw DataError("policy_log_prob_grad: answer out of range");
  }
  std::vector<double> g = theta.probs(q_class);
  for (double& v : g) v = -v;
  g[static_cast<std::size_t>(answer)] += 1.0;
  return g;
}

std::vector<double> grpo_sample_grad(const PolicyParams& theta, int q_class, int answer,
                                     double advantage, std::span<const double> ref_probs,
                                     const TtrlConfig& cfg) {
  if (q_class < 0 || q_class >= theta.num_classes) {
    throw DataError("grpo_sample_grad: q_class out of range");
  }
  if (answer < 0 || answer >= theta.num_answers) {
    throw DataError("grpo_sample_grad: answer out of range");
  }
  if (ref_probs.size() != static_cast<std::size_t>(theta.num_answers)) {
    throw DataError("grpo_sample_grad: ref_probs length mismatch");
  }
  std::vector<double> probs = theta.probs(q_class);
  double rho = probs[static_cast<std::size_t>(answer)] / ref_probs[static_cast<std::size_t>(answer)];
  double clipped = std::clamp(rho, 1.0 - cfg.clip_ratio, 1.0 + cfg.clip_ratio);
  std::vector<double> g(probs.size(), 0.0);
  // Subgradient of min(rho * A, clip(rho) * A): zero when the clipped branch
  // is strictly smaller, A * rho * grad(log pi) otherwise.
  if (rho * advantage <= clipped * advantage) {
    for (std::size_t j = 0; j < probs.size(); ++j) {
      double indicator = j == static_cast<std::size_t>(answer) ? 1.0 : 0.0;
      g[j] = advantage * rho * (indicator - probs[j]);
    }
  }
  return g;
}

namespace {

// d/dz KL(pi_z || ref) = pi (.) (log(pi/ref) - KL), exactly zero at pi == ref.
std::vector<double> kl_grad(const std::vector<double>& probs,
                            std::span<const double> ref_probs) {
  std::vector<double> logratio(probs.size());
  double kl = 0.0;
  for (std::size_t j = 0; j < probs.size(); ++j) {
    logratio[j] = std::log(probs[j]) - std::log(ref_probs[j]);
    kl += probs[j] * logratio[j];
  }
  std::vector<double> g(probs.size());
  for (std::size_t j = 0; j < probs.size(); ++j) {
    g[j] = probs[j] * (logratio[j] - kl);
  }
  return g;
}

int answer_index(const Question& q, const AnswerId& a) {
  for (std::size_t j = 0; j < q.answer_space.size(); ++j) {
    if (q.answer_space[j] == a) return static_cast<int>(j);
  }
  throw DataError("answer '" + a.label + "' outside answer_space of question '" + q.id + "'");
}

}  // namespace

PolicyParams ttrl_step(const PolicyParams& theta, const CandidateSet& cs, int q_class,
                       std::span<const double> rewards, const TtrlConfig& cfg) {
  validate_ttrl(cfg);
  if (q_class < 0 || q_class >= theta.num_classes) {
    throw DataError("ttrl_step: q_class out of range");
  }
  if (rewards.size() != cs.trajectories.size()) {
    throw DataError("ttrl_step: rewards length mismatch");
  }
  if (cs.question.answer_space.size() != static_cast<std::size_t>(theta.num_answers)) {
    throw DataError("ttrl_step: answer_space does not match policy width");
  }
  std::vector<double> adv = group_advantages(rewards, cfg);
  bool all_zero = std::all_of(adv.begin(), adv.end(), [](double a) { return a == 0.0; });
  if (all_zero) return theta;

  const std::size_t k = static_cast<std::size_t>(theta.num_answers);
  const double m = static_cast<double>(cs.trajectories.size());
  std::vector<double> probs = theta.probs(q_class);
  std::vector<double> grad(k, 0.0);
  if (cfg.updater == Updater::kReinforce) {
    for (std::size_t i = 0; i < cs.trajectories.size(); ++i) {
      std::size_t a = static_cast<std::size_t>(answer_index(cs.question, cs.trajectories[i].answer));
      for (std::size_t j = 0; j < k; ++j) {
        double indicator = j == a ? 1.0 : 0.0;
        grad[j] += adv[i] * (indicator - probs[j]);
      }
    }
  } else {
    // The reference policy is the pre-step theta itself, so each ratio is
    // exactly 1 here; the general clipped path is kept for off-policy reuse.
    const std::vector<double>& ref = probs;
    for (std::size_t i = 0; i < cs.trajectories.size(); ++i) {
      std::size_t a = static_cast<std::size_t>(answer_index(cs.question, cs.trajectories[i].answer));
      double rho = probs[a] / ref[a];
      double clipped = std::clamp(rho, 1.0 - cfg.clip_ratio, 1.0 + cfg.clip_ratio);
      if (rho * adv[i] <= clipped * adv[i]) {
        for (std::size_t j = 0; j < k; ++j) {
          double indicator = j == a ? 1.0 : 0.0;
          grad[j] += adv[i] * rho * (indicator - probs[j]);
        }
      }
    }
    if (cfg.kl_coefficient > 0.0) {
      std::vector<double> kg = kl_grad(probs, ref);
      for (std::size_t j = 0; j < k; ++j) grad[j] -= cfg.kl_coefficient * m * kg[j];
    }
  }

  PolicyParams out = theta;
  for (std::size_t j = 0; j < k; ++j) {
    double g = grad[j] / m;
    if (!std::isfinite(g)) throw DivergenceError("ttrl_step: non-finite gradient");
    double& z = out.logit(q_class, static_cast<int>(j));
    z += cfg.learning_rate * g;
    if (!std::isfinite(z)) throw DivergenceError("ttrl_step: non-finite parameter");
  }
  return out;
}

TtrlRunResult ttrl_run(PolicyParams theta, std::span<const int> question_classes,
                       const SimWorld& world, const WeightingConfig& wcfg,
                       const TtrlConfig& tcfg, int M, const RngStream& rng) {
  validate_ttrl(tcfg);
  validate_weighting(wcfg);
  if (question_classes.empty()) throw DataError("ttrl_run: empty question stream");
  if (M < 1) throw DataError("ttrl_run: M must be >= 1");

  TtrlRunResult result;
  result.params = std::move(theta);
  result.log.reserve(question_classes.size());
  for (std::size_t si = 0; si < question_classes.size(); ++si) {
    int c = question_classes[si];
    RngStream sub = rng.fork(si);
    CandidateSet cs = sample_candidates(world, c, result.params, M, sub);
    std::vector<ScoredCandidate> scored = score_candidate_set(cs, wcfg);
    std::vector<double> weights(scored.size());
    for (std::size_t i = 0; i < scored.size(); ++i) weights[i] = scored[i].weight;
    SelectionResult sel = sc_rm_select(cs, weights);
    std::vector<double> rewards = assign_rewards(cs, sel.chosen);

    TtrlStepLog entry;
    entry.stream_index = static_cast<int>(si);
    entry.q_class = c;
    entry.pseudo_label = sel.chosen;
    double sum = 0.0;
    for (double r : rewards) sum += r;
    entry.mean_reward = sum / static_cast<double>(rewards.size());
    const AnswerId& truth = world.labels[static_cast<std::size_t>(world.ground_truth[c])];
    entry.pseudo_label_correct = sel.chosen == truth;
    result.log.push_back(std::move(entry));

    try {
      result.params = ttrl_step(result.params, cs, c, rewards, tcfg);
    } catch (const DivergenceError&) {
      result.diverged = true;
      break;
    }
  }
  return result;
}

}  // namespace prmlab
