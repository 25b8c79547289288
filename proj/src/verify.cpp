#include "prmlab/verify.hpp"

#include <cmath>

namespace prmlab {

void validate_weighting(const WeightingConfig& cfg) {
  if (!(cfg.alpha > 0.0) || !std::isfinite(cfg.alpha)) {
    throw ConfigError("weighting.alpha must be finite and > 0");
  }
  if (!(cfg.beta >= 0.0 && cfg.beta <= 1.0)) {
    throw ConfigError("weighting.beta must lie in [0, 1]");
  }
}

double aggregate_worst_step(std::span<const double> scores) {
  if (scores.empty()) throw DataError("aggregate_worst_step: empty score sequence");
  double m = scores[0];
  for (double s : scores) m = std::min(m, s);
  return m;
}

double aggregate_steps(std::span<const double> scores, StepAggregator agg) {
  if (scores.empty()) throw DataError("aggregate_steps: empty score sequence");
  switch (agg) {
    case StepAggregator::kMin:
      return aggregate_worst_step(scores);
    case StepAggregator::kMean: {
      double sum = 0.0;
      for (double s : scores) sum += s;
      return sum / static_cast<double>(scores.size());
    }
    case StepAggregator::kProduct: {
      double prod = 1.0;
      for (double s : scores) prod *= s;
      return prod;
    }
    case StepAggregator::kLastStep:
      return scores.back();
  }
  throw DataError("aggregate_steps: unknown aggregator");
}

double map_weight(double confidence, const WeightingConfig& cfg) {
  if (!std::isfinite(confidence)) throw DataError("map_weight: non-finite confidence");
  double x = cfg.alpha * (confidence - cfg.beta);
  if (x >= 0.0) {
    return 1.0 / (1.0 + std::exp(-x));
  }
  double e = std::exp(x);
  return e / (1.0 + e);
}

std::vector<ScoredCandidate> score_candidate_set(const CandidateSet& cs,
                                                 const WeightingConfig& cfg,
                                                 StepAggregator agg) {
  validate_weighting(cfg);
  std::vector<ScoredCandidate> out;
  out.reserve(cs.trajectories.size());
  for (const Trajectory& t : cs.trajectories) {
    double s = aggregate_steps(t.step_scores, agg);
    out.push_back({s, map_weight(s, cfg)});
  }
  return out;
}

}  // namespace prmlab
