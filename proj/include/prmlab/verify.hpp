#pragma once

#include <span>
#include <vector>

#include "prmlab/core.hpp"

namespace prmlab {

// Sigmoid mapping from trajectory confidence to a soft weight. There is no
// canonical alpha/beta; these defaults are a documented, overridable choice
// that separates the shipped synthetic score distributions.
struct WeightingConfig {
  double alpha = 8.0;  // sharpness, > 0
  double beta = 0.55;  // midpoint, in [0, 1]
};

void validate_weighting(const WeightingConfig& cfg);

enum class StepAggregator { kMin, kMean, kProduct, kLastStep };

// Worst-step rule: trajectory confidence is the minimum step score.
// Throws DataError on an empty sequence.
double aggregate_worst_step(std::span<const double> scores);

// Alternative aggregators for ablation; kMin is the default everywhere.
double aggregate_steps(std::span<const double> scores, StepAggregator agg);

// logistic(alpha * (confidence - beta)), computed in branch form so large
// arguments never overflow. Result is in (0, 1).
double map_weight(double confidence, const WeightingConfig& cfg);

struct ScoredCandidate {
  double confidence = 0.0;  // aggregated step score
  double weight = 0.0;      // sigmoid-mapped
};

// Per-candidate (confidence, weight), aligned with candidate_index.
std::vector<ScoredCandidate> score_candidate_set(const CandidateSet& cs,
                                                 const WeightingConfig& cfg,
                                                 StepAggregator agg = StepAggregator::kMin);

}  // namespace prmlab
