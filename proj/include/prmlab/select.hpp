#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "prmlab/core.hpp"

namespace prmlab {

enum class Strategy { kPass1, kMajorityVote, kBestOfM, kScRm };

const char* to_string(Strategy s);                        // PASS1 / MV / BOM / SCRM
Strategy strategy_from_string(const std::string& name);   // throws ConfigError

struct SelectionResult {
  AnswerId chosen;
  Strategy strategy = Strategy::kMajorityVote;
  bool tie_broken = false;
  std::vector<int> supporting_indices;
};

// Per-answer sum of candidate weights, keyed by the answers that occur.
using GroupConfidence = std::map<AnswerId, double>;

// Answer of candidate 0.
SelectionResult pass_at_1(const CandidateSet& cs);

// Most frequent answer; ties broken toward the smallest AnswerId.
SelectionResult majority_vote(const CandidateSet& cs);

// Answer of the trajectory with the highest confidence; ties broken toward
// the lowest candidate_index. confidences must be aligned with the set.
SelectionResult best_of_m(const CandidateSet& cs, std::span<const double> confidences);

// Per-answer weight sums, compensated accumulation in candidate_index order.
GroupConfidence group_confidence(const CandidateSet& cs, std::span<const double> weights);

// Answer whose group has the highest summed weight; ties broken toward the
// smallest AnswerId. With constant weights this coincides with majority_vote.
SelectionResult sc_rm_select(const CandidateSet& cs, std::span<const double> weights);

}  // namespace prmlab
