#include "prmlab/select.hpp"

#include "prmlab/errors.hpp"

namespace prmlab {

const char* to_string(Strategy s) {
  switch (s) {
    case Strategy::kPass1: return "PASS1";
    case Strategy::kMajorityVote: return "MV";
    case Strategy::kBestOfM: return "BOM";
    case Strategy::kScRm: return "SCRM";
  }
  return "UNKNOWN";
}

Strategy strategy_from_string(const std::string& name) {
  if (name == "PASS1") return Strategy::kPass1;
  if (name == "MV") return Strategy::kMajorityVote;
  if (name == "BOM") return Strategy::kBestOfM;
  if (name == "SCRM") return Strategy::kScRm;
  throw ConfigError("unknown strategy '" + name + "' (expected PASS1, MV, BOM or SCRM)");
}

namespace {

std::vector<int> supporters(const CandidateSet& cs, const AnswerId& chosen) {
  std::vector<int> idx;
  for (const Trajectory& t : cs.trajectories) {
    if (t.answer == chosen) idx.push_back(t.candidate_index);
  }
  return idx;
}

}  // namespace

SelectionResult pass_at_1(const CandidateSet& cs) {
  const AnswerId& chosen = cs.trajectories.front().answer;
  return {chosen, Strategy::kPass1, false, supporters(cs, chosen)};
}

SelectionResult majority_vote(const CandidateSet& cs) {
  auto groups = group_by_answer(cs);
  const AnswerId* chosen = nullptr;
  std::size_t best = 0;
  int at_best = 0;
  for (const auto& [answer, members] : groups) {
    if (members.size() > best) {
      best = members.size();
      chosen = &answer;
      at_best = 1;
    } else if (members.size() == best) {
      ++at_best;
    }
  }
  return {*chosen, Strategy::kMajorityVote, at_best >= 2, groups[*chosen]};
}

SelectionResult best_of_m(const CandidateSet& cs, std::span<const double> confidences) {
  if (confidences.size() != cs.trajectories.size()) {
    throw DataError("best_of_m: confidences length mismatch");
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < confidences.size(); ++i) {
    if (confidences[i] > confidences[best]) best = i;
  }
  const AnswerId& chosen = cs.trajectories[best].answer;
  bool tie = false;
  for (std::size_t i = 0; i < confidences.size(); ++i) {
    if (confidences[i] == confidences[best] && cs.trajectories[i].answer != chosen) {
      tie = true;
      break;
    }
  }
  return {chosen, Strategy::kBestOfM, tie, supporters(cs, chosen)};
}

GroupConfidence group_confidence(const CandidateSet& cs, std::span<const double> weights) {
  if (weights.size() != cs.trajectories.size()) {
    throw DataError("group_confidence: weights length mismatch");
  }
  // Kahan accumulation per group, in candidate order. Equal weights summed
  // over equal-cardinality groups then give bitwise-equal totals, which keeps
  // constant-weight selection (incl. tie outcomes) identical to majority vote.
  GroupConfidence sums;
  std::map<AnswerId, double> comp;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const AnswerId& a = cs.trajectories[i].answer;
    double& sum = sums[a];
    double& c = comp[a];
    double y = weights[i] - c;
    double t = sum + y;
    c = (t - sum) - y;
    sum = t;
  }
  return sums;
}

SelectionResult sc_rm_select(const CandidateSet& cs, std::span<const double> weights) {
  GroupConfidence conf = group_confidence(cs, weights);
  const AnswerId* chosen = nullptr;
  double best = 0.0;
  int at_best = 0;
  for (const auto& [answer, value] : conf) {
    if (chosen == nullptr || value > best) {
      best = value;
      chosen = &answer;
      at_best = 1;
    } else if (value == best) {
      ++at_best;
    }
  }
  return {*chosen, Strategy::kScRm, at_best >= 2, supporters(cs, *chosen)};
}

}  // namespace prmlab
