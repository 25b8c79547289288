#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "prmlab/core.hpp"
#include "prmlab/select.hpp"
#include "prmlab/simworld.hpp"
#include "prmlab/ttrl.hpp"
#include "prmlab/verify.hpp"

namespace prmlab {

enum class Phase { kBeforeTtrl, kAfterTtrl };

const char* to_string(Phase p);

struct ExperimentConfig {
  WorldConfig world;
  WeightingConfig weighting;
  TtrlConfig ttrl;
  bool ttrl_enabled = false;
  std::vector<int> m_values = {1, 2, 4, 8, 16, 32, 64};
  std::vector<std::uint64_t> seeds = {0};
  std::vector<Strategy> strategies = {Strategy::kPass1, Strategy::kMajorityVote,
                                      Strategy::kBestOfM, Strategy::kScRm};
  int questions_per_run = 200;
};

// Throws ConfigError naming the offending field.
void validate_experiment(const ExperimentConfig& cfg);

struct RunRecord {
  Strategy strategy = Strategy::kPass1;
  int m = 1;
  std::uint64_t seed = 0;
  Phase phase = Phase::kBeforeTtrl;
  double accuracy = 0.0;
  double mean_reward = 0.0;  // mean fraction of candidates agreeing with the chosen answer
  double tie_rate = 0.0;
};

// Canonical emission order: (strategy string, M, seed, phase).
bool record_less(const RunRecord& a, const RunRecord& b);

// One evaluation pass per (seed, M) cell: build the world for the seed,
// sample shared candidate sets per question, and score every configured
// strategy on them. Question q uses class q mod Q and its own RNG substream
// independent of M, so candidate sets at larger M extend the smaller ones.
// With TTRL enabled each cell records a BEFORE pass with the initial uniform
// policy, adapts on the same class stream, then records an AFTER pass reusing
// the per-question evaluation substreams. Records are appended to partial_out
// (when given) as they are produced so a divergence abort keeps the completed
// cells; divergence raises DivergenceError after the flush.
std::vector<RunRecord> run_experiment(const ExperimentConfig& cfg,
                                      std::vector<RunRecord>* partial_out = nullptr);

struct SweepPoint {
  Strategy strategy = Strategy::kPass1;
  Phase phase = Phase::kBeforeTtrl;
  int m = 1;
  double mean_accuracy = 0.0;
  double std_accuracy = 0.0;  // population std over seeds
};

// Aggregates run_experiment records over the M grid, one curve per
// (strategy, phase).
std::vector<SweepPoint> sweep_m(const ExperimentConfig& cfg,
                                std::vector<RunRecord>* partial_out = nullptr);
std::vector<SweepPoint> aggregate_sweep(std::span<const RunRecord> records);

enum class OutputFormat { kCsv, kJsonLines };
OutputFormat format_from_string(const std::string& name);  // throws ConfigError

// Results table: header strategy,M,seed,phase,accuracy,mean_reward,tie_rate;
// decimals printed with 6 fractional digits; rows in canonical order. The
// JSON-lines variant carries the same field names and the same 6-digit
// decimals so both formats parse back to equal records.
std::string format_results(std::span<const RunRecord> records, OutputFormat fmt);
void emit_results(std::span<const RunRecord> records, OutputFormat fmt, const std::string& path);
std::vector<RunRecord> parse_results(const std::string& text, OutputFormat fmt);

// Curve table: header strategy,phase,M,mean_accuracy,std_accuracy, sorted by
// (strategy string, phase, M).
std::string format_curves(std::span<const SweepPoint> points, OutputFormat fmt);
void emit_curves(std::span<const SweepPoint> points, OutputFormat fmt, const std::string& path);

// External candidate data: one JSON object per line with fields question_id
// (string), candidate_id (string), answer (string), steps (array of strings),
// step_scores (array of numbers in [0,1]).
struct IngestReport {
  int lines_total = 0;
  int records_accepted = 0;
  int lines_skipped = 0;
  int questions_skipped = 0;
  std::vector<std::string> warnings;  // one entry per skipped line/question, with line numbers
};

// Groups records by question_id, inferring each answer space from the
// observed answers. Invalid lines (parse errors, invariant violations) abort
// with DataError under strict, otherwise are skipped with a warning.
// Questions whose candidates are unanimous cannot form the required >= 2
// distinct-answer space and are skipped (or abort under strict) too.
std::map<std::string, CandidateSet> ingest_candidates(const std::string& path, bool strict,
                                                      IngestReport* report = nullptr);

// Inverse of ingest_candidates for round trips; candidate_id is the
// candidate_index rendered in decimal.
std::string format_candidates(std::span<const CandidateSet> sets);
void emit_candidates(std::span<const CandidateSet> sets, const std::string& path);

struct SelectionRow {
  std::string question_id;
  Strategy strategy = Strategy::kPass1;
  AnswerId chosen;
  bool tie_broken = false;
};

// Applies the configured strategies to ingested candidate sets; rows sorted
// by (question_id, strategy string). Header question_id,strategy,chosen,tie_broken.
std::vector<SelectionRow> select_on_ingested(const std::map<std::string, CandidateSet>& sets,
                                             std::span<const Strategy> strategies,
                                             const WeightingConfig& wcfg);
std::string format_selections(std::span<const SelectionRow> rows, OutputFormat fmt);

}  // namespace prmlab
