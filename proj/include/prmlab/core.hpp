#pragma once

#include <compare>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "prmlab/errors.hpp"

namespace prmlab {

// Final answer of a reasoning trajectory. The total order (lexicographic on
// the label bytes) exists solely for deterministic tie-breaking.
struct AnswerId {
  std::string label;
  auto operator<=>(const AnswerId&) const = default;
};

struct Question {
  std::string id;
  std::vector<AnswerId> answer_space;    // >= 2 distinct options
  std::optional<AnswerId> ground_truth;  // simulation / evaluation only
  bool contains(const AnswerId& a) const;
};

// Throws DataError unless answer_space holds >= 2 distinct entries and
// ground_truth, when present, is one of them.
void validate_question(const Question& q);

struct Trajectory {
  std::string question_id;
  int candidate_index = -1;
  std::vector<std::string> steps;    // opaque payloads
  AnswerId answer;
  std::vector<double> step_scores;   // aligned with steps, each in [0, 1]
  int step_count() const { return static_cast<int>(steps.size()); }
};

// The M trajectories sampled for one question. candidate_index runs 0..M-1.
struct CandidateSet {
  Question question;
  std::vector<Trajectory> trajectories;
  int size() const { return static_cast<int>(trajectories.size()); }
};

// Accepted step counts: 2 < T < 10, strict on both ends.
inline constexpr int kMinStepCount = 3;
inline constexpr int kMaxStepCount = 9;

enum class StepPolicy { kReject, kClampResample };
enum class RejectCode { kTooShort, kTooLong, kScoreRange };
enum class ValidationAction { kAccept, kReject, kResample };

struct ValidationResult {
  ValidationAction action = ValidationAction::kAccept;
  std::optional<RejectCode> code;
  bool accepted() const { return action == ValidationAction::kAccept; }
};

const char* to_string(RejectCode code);

// Step-count violations follow the configured policy (drop, or ask the caller
// to resample). A score outside [0, 1] is always a rejection.
ValidationResult validate_trajectory(const Trajectory& t, StepPolicy policy);

// Builds a CandidateSet with candidate_index assigned by input order.
// Throws DataError on an empty sequence, a question_id mismatch, an answer
// outside the answer space, or a trajectory failing validation.
CandidateSet build_candidate_set(const Question& q, std::vector<Trajectory> trajectories);

// Partition of candidate indices by final answer; per-answer lists ascending.
std::map<AnswerId, std::vector<int>> group_by_answer(const CandidateSet& cs);

// Spreadsheet-style labels A, B, ..., Z, AA, AB, ... for generated answer spaces.
std::vector<AnswerId> make_answer_labels(int count);

}  // namespace prmlab
