#include "prmlab/policy.hpp"

#include <algorithm>
#include <cmath>

namespace prmlab {

double PolicyParams::logit(int q_class, int answer) const {
  return logits[static_cast<std::size_t>(q_class) * num_answers + answer];
}

double& PolicyParams::logit(int q_class, int answer) {
  return logits[static_cast<std::size_t>(q_class) * num_answers + answer];
}

std::vector<double> PolicyParams::probs(int q_class) const {
  std::vector<double> row(logits.begin() + static_cast<std::ptrdiff_t>(q_class) * num_answers,
                          logits.begin() + static_cast<std::ptrdiff_t>(q_class + 1) * num_answers);
  return softmax(row);
}

PolicyParams uniform_policy(int num_classes, int num_answers) {
  PolicyParams p;
  p.num_classes = num_classes;
  p.num_answers = num_answers;
  p.logits.assign(static_cast<std::size_t>(num_classes) * num_answers, 0.0);
  return p;
}

std::vector<double> softmax(const std::vector<double>& logits) {
  double mx = *std::max_element(logits.begin(), logits.end());
  std::vector<double> out(logits.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp(logits[i] - mx);
    sum += out[i];
  }
  for (double& v : out) v /= sum;
  return out;
}

}  // namespace prmlab
