#pragma once

#include <random>
#include <string>
#include <vector>

#include "prmlab/core.hpp"

namespace testutil {

// Trajectory with one opaque step per score, valid by construction when the
// score count is in 3..9.
inline prmlab::Trajectory make_traj(const std::string& qid, const std::string& answer,
                                    std::vector<double> scores) {
  prmlab::Trajectory t;
  t.question_id = qid;
  t.answer = prmlab::AnswerId{answer};
  for (std::size_t i = 0; i < scores.size(); ++i) {
    t.steps.push_back("s" + std::to_string(i));
  }
  t.step_scores = std::move(scores);
  return t;
}

// Candidate set over answer space {A..} of size k with the given answers,
// each trajectory carrying three 0.5 scores.
inline prmlab::CandidateSet make_set(const std::vector<std::string>& answers, int k) {
  prmlab::Question q;
  q.id = "q";
  q.answer_space = prmlab::make_answer_labels(k);
  std::vector<prmlab::Trajectory> ts;
  for (const std::string& a : answers) {
    ts.push_back(make_traj("q", a, {0.5, 0.5, 0.5}));
  }
  return prmlab::build_candidate_set(q, std::move(ts));
}

// Random set: M in [1, m_max], K in [2, k_max], answers uniform over the
// space, step scores uniform in [0, 1] with 3..9 steps.
inline prmlab::CandidateSet random_set(std::mt19937_64& gen, int m_max = 64, int k_max = 6) {
  std::uniform_int_distribution<int> m_dist(1, m_max);
  std::uniform_int_distribution<int> k_dist(2, k_max);
  int m = m_dist(gen);
  int k = k_dist(gen);
  std::vector<prmlab::AnswerId> labels = prmlab::make_answer_labels(k);
  std::uniform_int_distribution<int> a_dist(0, k - 1);
  std::uniform_int_distribution<int> t_dist(3, 9);
  std::uniform_real_distribution<double> s_dist(0.0, 1.0);

  prmlab::Question q;
  q.id = "q";
  q.answer_space = labels;
  std::vector<prmlab::Trajectory> ts;
  for (int i = 0; i < m; ++i) {
    int steps = t_dist(gen);
    std::vector<double> scores;
    for (int s = 0; s < steps; ++s) scores.push_back(s_dist(gen));
    ts.push_back(make_traj("q", labels[a_dist(gen)].label, std::move(scores)));
  }
  return prmlab::build_candidate_set(q, std::move(ts));
}

inline std::vector<double> random_weights(std::mt19937_64& gen, std::size_t n) {
  std::uniform_real_distribution<double> w_dist(1e-6, 1.0 - 1e-6);
  std::vector<double> w(n);
  for (double& v : w) v = w_dist(gen);
  return w;
}

}  // namespace testutil
