#pragma once

#include <vector>

namespace prmlab {

// Toy categorical policy: one row of answer logits per question class. Row c
// materializes to softmax(logits[c]), the sampling distribution over answers.
struct PolicyParams {
  int num_classes = 0;
  int num_answers = 0;
  std::vector<double> logits;  // row-major [num_classes x num_answers]

  double logit(int q_class, int answer) const;
  double& logit(int q_class, int answer);
  std::vector<double> probs(int q_class) const;  // softmax row, sums to 1
};

PolicyParams uniform_policy(int num_classes, int num_answers);

// Numerically stable softmax of an arbitrary real vector.
std::vector<double> softmax(const std::vector<double>& logits);

}  // namespace prmlab
