#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "doctest.h"
#include "prmlab/simworld.hpp"
#include "prmlab/verify.hpp"

using prmlab::AnswerId;
using prmlab::CandidateSet;
using prmlab::ConfigError;
using prmlab::DataError;
using prmlab::PolicyParams;
using prmlab::RngStream;
using prmlab::ScoreDist;
using prmlab::SelectionResult;
using prmlab::SimWorld;
using prmlab::WorldConfig;

namespace {

// Independent re-implementation of the documented world draw: per class c,
// ground truth = fork(c, 0).next_below(K), error slot skips the truth.
uint64_t oracle_mix(uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

uint64_t oracle_fork(uint64_t key, uint64_t id) {
  return oracle_mix(key ^ oracle_mix(id ^ 0xA0761D6478BD642FULL));
}

uint64_t oracle_draw1_below(uint64_t key, uint64_t n) {
  uint64_t u = oracle_mix(key + 0x9E3779B97F4A7C15ULL);
  return static_cast<uint64_t>((static_cast<unsigned __int128>(u) * n) >> 64);
}

std::pair<int, int> oracle_world_class(uint64_t stream_key, int c, int k) {
  uint64_t gt_key = oracle_fork(oracle_fork(stream_key, static_cast<uint64_t>(c)), 0);
  uint64_t err_key = oracle_fork(oracle_fork(stream_key, static_cast<uint64_t>(c)), 1);
  int gt = static_cast<int>(oracle_draw1_below(gt_key, static_cast<uint64_t>(k)));
  int j = static_cast<int>(oracle_draw1_below(err_key, static_cast<uint64_t>(k - 1)));
  return {gt, j < gt ? j : j + 1};
}

}  // namespace

TEST_CASE("score distributions validate and sample in range") {
  CHECK_THROWS_AS(prmlab::validate_score_dist(ScoreDist::beta_dist(0.0, 2.0), "f"), ConfigError);
  CHECK_THROWS_AS(prmlab::validate_score_dist(ScoreDist::beta_dist(2.0, -1.0), "f"), ConfigError);
  CHECK_THROWS_AS(prmlab::validate_score_dist(ScoreDist::point_mass(1.5), "f"), ConfigError);
  CHECK_NOTHROW(prmlab::validate_score_dist(ScoreDist::point_mass(0.0), "f"));

  RngStream rng = RngStream::root(1).fork(10);
  ScoreDist point = ScoreDist::point_mass(0.7);
  for (int i = 0; i < 10; ++i) CHECK(point.sample(rng) == 0.7);

  ScoreDist beta = ScoreDist::beta_dist(8.0, 2.0);
  double sum = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    double s = beta.sample(rng);
    REQUIRE(s >= 0.0);
    REQUIRE(s <= 1.0);
    sum += s;
  }
  // Beta(8,2): mean 0.8, sd of the sample mean 0.1206/sqrt(n); 3 sigma bound.
  CHECK(std::abs(sum / n - 0.8) < 3.0 * 0.1206 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("world config validation") {
  WorldConfig bad;
  bad.num_question_classes = 0;
  CHECK_THROWS_AS(prmlab::validate_world(bad), ConfigError);
  bad = WorldConfig{};
  bad.answers_per_question = 1;
  CHECK_THROWS_AS(prmlab::validate_world(bad), ConfigError);
  bad = WorldConfig{};
  bad.consensus_error_strength = -0.5;
  CHECK_THROWS_AS(prmlab::validate_world(bad), ConfigError);
  bad = WorldConfig{};
  bad.verifier_flip_prob = 1.0;
  CHECK_THROWS_AS(prmlab::validate_world(bad), ConfigError);
  CHECK_NOTHROW(prmlab::validate_world(WorldConfig{}));
}

TEST_CASE("world building is deterministic and separates truth from error") {
  WorldConfig cfg;
  cfg.num_question_classes = 6;
  cfg.answers_per_question = 5;
  SimWorld w1 = prmlab::build_world(cfg, RngStream::root(42).fork(1));
  SimWorld w2 = prmlab::build_world(cfg, RngStream::root(42).fork(1));
  CHECK(w1.ground_truth == w2.ground_truth);
  CHECK(w1.error_answer == w2.error_answer);
  for (int c = 0; c < 6; ++c) {
    CHECK(w1.ground_truth[static_cast<std::size_t>(c)] !=
          w1.error_answer[static_cast<std::size_t>(c)]);
    CHECK(w1.ground_truth[static_cast<std::size_t>(c)] < 5);
    CHECK(w1.error_answer[static_cast<std::size_t>(c)] < 5);
  }
}

TEST_CASE("binary answer spaces force the unique wrong answer") {
  WorldConfig cfg;
  cfg.num_question_classes = 8;
  cfg.answers_per_question = 2;
  SimWorld w = prmlab::build_world(cfg, RngStream::root(7).fork(1));
  for (int c = 0; c < 8; ++c) {
    CHECK(w.error_answer[static_cast<std::size_t>(c)] ==
          1 - w.ground_truth[static_cast<std::size_t>(c)]);
  }
}

TEST_CASE("world draws match the documented trace") {
  WorldConfig cfg;
  cfg.num_question_classes = 4;
  cfg.answers_per_question = 4;
  for (uint64_t seed : {0ULL, 3ULL, 999ULL}) {
    RngStream stream = RngStream::root(seed).fork(1);
    SimWorld w = prmlab::build_world(cfg, stream);
    for (int c = 0; c < 4; ++c) {
      auto [gt, err] = oracle_world_class(stream.key(), c, 4);
      CHECK(w.ground_truth[static_cast<std::size_t>(c)] == gt);
      CHECK(w.error_answer[static_cast<std::size_t>(c)] == err);
    }
  }
}

TEST_CASE("generated questions carry the world ground truth") {
  WorldConfig cfg;
  SimWorld w = prmlab::build_world(cfg, RngStream::root(3).fork(1));
  for (int c = 0; c < cfg.num_question_classes; ++c) {
    prmlab::Question q = w.make_question(c);
    CHECK_NOTHROW(prmlab::validate_question(q));
    CHECK(q.answer_space.size() == 4);
    CHECK(*q.ground_truth == w.labels[static_cast<std::size_t>(w.ground_truth[c])]);
  }
}

TEST_CASE("sampled candidate sets are valid and deterministic") {
  WorldConfig cfg;
  cfg.consensus_error_strength = 1.0;
  cfg.verifier_flip_prob = 0.05;
  SimWorld w = prmlab::build_world(cfg, RngStream::root(11).fork(1));
  PolicyParams theta = prmlab::uniform_policy(4, 4);
  CandidateSet a = prmlab::sample_candidates(w, 2, theta, 32, RngStream::root(11).fork(2, 0));
  CandidateSet b = prmlab::sample_candidates(w, 2, theta, 32, RngStream::root(11).fork(2, 0));
  REQUIRE(a.size() == 32);
  for (int i = 0; i < 32; ++i) {
    const auto& ta = a.trajectories[static_cast<std::size_t>(i)];
    const auto& tb = b.trajectories[static_cast<std::size_t>(i)];
    CHECK(ta.candidate_index == i);
    CHECK(ta.step_count() >= 3);
    CHECK(ta.step_count() <= 9);
    for (double s : ta.step_scores) {
      CHECK(s >= 0.0);
      CHECK(s <= 1.0);
    }
    CHECK(ta.answer == tb.answer);
    CHECK(ta.step_scores == tb.step_scores);
  }
}

TEST_CASE("larger budgets extend the same candidate prefix") {
  WorldConfig cfg;
  cfg.consensus_error_strength = 0.8;
  SimWorld w = prmlab::build_world(cfg, RngStream::root(13).fork(1));
  PolicyParams theta = prmlab::uniform_policy(4, 4);
  RngStream eval = RngStream::root(13).fork(2, 7);
  CandidateSet small = prmlab::sample_candidates(w, 1, theta, 4, eval);
  CandidateSet big = prmlab::sample_candidates(w, 1, theta, 16, eval);
  for (int i = 0; i < 4; ++i) {
    CHECK(small.trajectories[static_cast<std::size_t>(i)].answer ==
          big.trajectories[static_cast<std::size_t>(i)].answer);
    CHECK(small.trajectories[static_cast<std::size_t>(i)].step_scores ==
          big.trajectories[static_cast<std::size_t>(i)].step_scores);
  }
}

TEST_CASE("answer frequencies fit the biased softmax distribution") {
  WorldConfig cfg;
  cfg.num_question_classes = 1;
  cfg.consensus_error_strength = 1.0;
  SimWorld w = prmlab::build_world(cfg, RngStream::root(17).fork(1));
  PolicyParams theta = prmlab::uniform_policy(1, 4);
  const int n = 100000;
  CandidateSet cs = prmlab::sample_candidates(w, 0, theta, n, RngStream::root(17).fork(2));

  int err = w.error_answer[0];
  double e1 = std::exp(1.0);
  std::vector<double> expected(4, static_cast<double>(n) / (3.0 + e1));
  expected[static_cast<std::size_t>(err)] = static_cast<double>(n) * e1 / (3.0 + e1);

  std::vector<int> observed(4, 0);
  for (const auto& t : cs.trajectories) {
    for (int a = 0; a < 4; ++a) {
      if (t.answer == w.labels[static_cast<std::size_t>(a)]) observed[static_cast<std::size_t>(a)] += 1;
    }
  }
  double chi2 = 0.0;
  for (int a = 0; a < 4; ++a) {
    double d = observed[static_cast<std::size_t>(a)] - expected[static_cast<std::size_t>(a)];
    chi2 += d * d / expected[static_cast<std::size_t>(a)];
  }
  // Critical value of chi-squared with 3 degrees of freedom at alpha = 0.01.
  CHECK(chi2 < 11.345);
}

TEST_CASE("strong bias concentrates every sample on the designated error") {
  WorldConfig cfg;
  cfg.num_question_classes = 1;
  cfg.consensus_error_strength = 10.0;
  SimWorld w = prmlab::build_world(cfg, RngStream::root(19).fork(1));
  PolicyParams theta = prmlab::uniform_policy(1, 4);

  double e10 = std::exp(10.0);
  double p_err = e10 / (3.0 + e10);
  CHECK(std::pow(p_err, 64) >= 0.99);

  CandidateSet cs = prmlab::sample_candidates(w, 0, theta, 64, RngStream::root(19).fork(2));
  const AnswerId& err_label = w.labels[static_cast<std::size_t>(w.error_answer[0])];
  for (const auto& t : cs.trajectories) CHECK(t.answer == err_label);
}

TEST_CASE("point-mass verifier separates correct from wrong perfectly") {
  WorldConfig cfg;
  cfg.num_question_classes = 1;
  cfg.correct_score_dist = ScoreDist::point_mass(1.0);
  cfg.incorrect_score_dist = ScoreDist::point_mass(0.0);
  SimWorld w = prmlab::build_world(cfg, RngStream::root(23).fork(1));
  PolicyParams theta = prmlab::uniform_policy(1, 4);
  CandidateSet cs = prmlab::sample_candidates(w, 0, theta, 64, RngStream::root(23).fork(2));
  const AnswerId& truth = w.labels[static_cast<std::size_t>(w.ground_truth[0])];
  for (const auto& t : cs.trajectories) {
    double s = prmlab::aggregate_worst_step(t.step_scores);
    CHECK(s == (t.answer == truth ? 1.0 : 0.0));
  }
}

TEST_CASE("beta verifier scores correct trajectories higher on average") {
  WorldConfig cfg;
  cfg.num_question_classes = 1;
  SimWorld w = prmlab::build_world(cfg, RngStream::root(29).fork(1));
  PolicyParams theta = prmlab::uniform_policy(1, 4);
  CandidateSet cs = prmlab::sample_candidates(w, 0, theta, 2000, RngStream::root(29).fork(2));
  const AnswerId& truth = w.labels[static_cast<std::size_t>(w.ground_truth[0])];
  double sum_c = 0.0;
  double sum_w = 0.0;
  int n_c = 0;
  int n_w = 0;
  for (const auto& t : cs.trajectories) {
    double s = prmlab::aggregate_worst_step(t.step_scores);
    if (t.answer == truth) {
      sum_c += s;
      n_c += 1;
    } else {
      sum_w += s;
      n_w += 1;
    }
  }
  REQUIRE(n_c > 100);
  REQUIRE(n_w > 100);
  CHECK(sum_c / n_c > sum_w / n_w + 0.3);
}

TEST_CASE("oracle accuracy counts ground-truth hits") {
  WorldConfig cfg;
  SimWorld w = prmlab::build_world(cfg, RngStream::root(31).fork(1));
  std::vector<int> classes{0, 1, 2, 3};
  std::vector<SelectionResult> all_right;
  std::vector<SelectionResult> all_wrong;
  for (int c : classes) {
    SelectionResult r;
    r.chosen = w.labels[static_cast<std::size_t>(w.ground_truth[static_cast<std::size_t>(c)])];
    all_right.push_back(r);
    SelectionResult b;
    b.chosen = w.labels[static_cast<std::size_t>(w.error_answer[static_cast<std::size_t>(c)])];
    all_wrong.push_back(b);
  }
  CHECK(prmlab::oracle_accuracy(all_right, w, classes) == 1.0);
  CHECK(prmlab::oracle_accuracy(all_wrong, w, classes) == 0.0);

  std::vector<int> short_classes{0};
  CHECK_THROWS_AS(prmlab::oracle_accuracy(all_right, w, short_classes), DataError);
}

TEST_CASE("random selections score near chance level") {
  WorldConfig cfg;
  cfg.num_question_classes = 1;
  SimWorld w = prmlab::build_world(cfg, RngStream::root(37).fork(1));
  std::mt19937_64 gen(61001);
  std::uniform_int_distribution<int> pick(0, 3);
  const int n = 10000;
  std::vector<SelectionResult> sels(n);
  std::vector<int> classes(n, 0);
  for (auto& s : sels) s.chosen = w.labels[static_cast<std::size_t>(pick(gen))];
  double acc = prmlab::oracle_accuracy(sels, w, classes);
  // 3 sigma binomial bound around 1/4 over 10^4 trials.
  CHECK(std::abs(acc - 0.25) < 3.0 * std::sqrt(0.25 * 0.75 / n));
}

TEST_CASE("sampling rejects bad arguments") {
  WorldConfig cfg;
  SimWorld w = prmlab::build_world(cfg, RngStream::root(1).fork(1));
  PolicyParams theta = prmlab::uniform_policy(4, 4);
  CHECK_THROWS_AS(prmlab::sample_candidates(w, 9, theta, 4, RngStream::root(1).fork(2)),
                  DataError);
  CHECK_THROWS_AS(prmlab::sample_candidates(w, 0, theta, 0, RngStream::root(1).fork(2)),
                  DataError);
  PolicyParams narrow = prmlab::uniform_policy(4, 3);
  CHECK_THROWS_AS(prmlab::sample_candidates(w, 0, narrow, 4, RngStream::root(1).fork(2)),
                  DataError);
}
