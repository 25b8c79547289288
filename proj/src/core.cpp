#include "prmlab/core.hpp"

#include <algorithm>
#include <set>

namespace prmlab {

bool Question::contains(const AnswerId& a) const {
  return std::find(answer_space.begin(), answer_space.end(), a) != answer_space.end();
}

void validate_question(const Question& q) {
  std::set<AnswerId> distinct(q.answer_space.begin(), q.answer_space.end());
  if (distinct.size() < 2) {
    throw DataError("question '" + q.id + "': answer_space needs >= 2 distinct answers");
  }
  if (distinct.size() != q.answer_space.size()) {
    throw DataError("question '" + q.id + "': answer_space has duplicate answers");
  }
  if (q.ground_truth && !q.contains(*q.ground_truth)) {
    throw DataError("question '" + q.id + "': ground_truth outside answer_space");
  }
}

const char* to_string(RejectCode code) {
  switch (code) {
    case RejectCode::kTooShort: return "TOO_SHORT";
    case RejectCode::kTooLong: return "TOO_LONG";
    case RejectCode::kScoreRange: return "SCORE_RANGE";
  }
  return "UNKNOWN";
}

ValidationResult validate_trajectory(const Trajectory& t, StepPolicy policy) {
  if (t.step_scores.size() != t.steps.size()) {
    return {ValidationAction::kReject, RejectCode::kScoreRange};
  }
  for (double s : t.step_scores) {
    if (!(s >= 0.0 && s <= 1.0)) {
      return {ValidationAction::kReject, RejectCode::kScoreRange};
    }
  }
  if (t.step_count() < kMinStepCount) {
    ValidationAction act = policy == StepPolicy::kClampResample ? ValidationAction::kResample
                                                                : ValidationAction::kReject;
    return {act, RejectCode::kTooShort};
  }
  if (t.step_count() > kMaxStepCount) {
    ValidationAction act = policy == StepPolicy::kClampResample ? ValidationAction::kResample
                                                                : ValidationAction::kReject;
    return {act, RejectCode::kTooLong};
  }
  return {ValidationAction::kAccept, std::nullopt};
}

CandidateSet build_candidate_set(const Question& q, std::vector<Trajectory> trajectories) {
  validate_question(q);
  if (trajectories.empty()) {
    throw DataError("question '" + q.id + "': EMPTY_SET, need M >= 1 trajectories");
  }
  for (std::size_t i = 0; i < trajectories.size(); ++i) {
    Trajectory& t = trajectories[i];
    if (t.question_id != q.id) {
      throw DataError("question '" + q.id + "' candidate " + std::to_string(i) +
                      ": question_id mismatch '" + t.question_id + "'");
    }
    if (!q.contains(t.answer)) {
      throw DataError("question '" + q.id + "' candidate " + std::to_string(i) +
                      ": answer '" + t.answer.label + "' outside answer_space");
    }
    ValidationResult v = validate_trajectory(t, StepPolicy::kReject);
    if (!v.accepted()) {
      throw DataError("question '" + q.id + "' candidate " + std::to_string(i) +
                      ": rejected " + to_string(*v.code));
    }
    t.candidate_index = static_cast<int>(i);
  }
  return CandidateSet{q, std::move(trajectories)};
}

std::map<AnswerId, std::vector<int>> group_by_answer(const CandidateSet& cs) {
  std::map<AnswerId, std::vector<int>> groups;
  for (const Trajectory& t : cs.trajectories) {
    groups[t.answer].push_back(t.candidate_index);
  }
  return groups;
}

std::vector<AnswerId> make_answer_labels(int count) {
  std::vector<AnswerId> labels;
  labels.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    std::string label;
    int n = i;
    while (true) {
      label.insert(label.begin(), static_cast<char>('A' + n % 26));
      n = n / 26 - 1;
      if (n < 0) break;
    }
    labels.push_back(AnswerId{label});
  }
  return labels;
}

}  // namespace prmlab
