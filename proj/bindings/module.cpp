#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "prmlab/config.hpp"
#include "prmlab/harness.hpp"

namespace py = pybind11;

using namespace prmlab;

PYBIND11_MODULE(_core, m) {
  m.doc() = "Weighted candidate selection and test-time policy adaptation";
  m.attr("__version__") = "0.1.0";

  py::register_exception<ConfigError>(m, "ConfigError");
  py::register_exception<DataError>(m, "DataError");
  py::register_exception<DivergenceError>(m, "DivergenceError");

  py::class_<AnswerId>(m, "AnswerId")
      .def(py::init([](std::string label) { return AnswerId{std::move(label)}; }),
           py::arg("label"))
      .def_readwrite("label", &AnswerId::label)
      .def(py::self == py::self)
      .def(py::self != py::self)
      .def(py::self < py::self)
      .def("__hash__", [](const AnswerId& a) { return py::hash(py::str(a.label)); })
      .def("__repr__", [](const AnswerId& a) { return "AnswerId('" + a.label + "')"; });

  py::class_<Question>(m, "Question")
      .def(py::init<>())
      .def_readwrite("id", &Question::id)
      .def_readwrite("answer_space", &Question::answer_space)
      .def_readwrite("ground_truth", &Question::ground_truth)
      .def("contains", &Question::contains);

  py::class_<Trajectory>(m, "Trajectory")
      .def(py::init<>())
      .def_readwrite("question_id", &Trajectory::question_id)
      .def_readwrite("candidate_index", &Trajectory::candidate_index)
      .def_readwrite("steps", &Trajectory::steps)
      .def_readwrite("answer", &Trajectory::answer)
      .def_readwrite("step_scores", &Trajectory::step_scores)
      .def("step_count", &Trajectory::step_count);

  py::class_<CandidateSet>(m, "CandidateSet")
      .def(py::init<>())
      .def_readwrite("question", &CandidateSet::question)
      .def_readwrite("trajectories", &CandidateSet::trajectories)
      .def("size", &CandidateSet::size)
      .def("__len__", &CandidateSet::size);

  m.attr("MIN_STEP_COUNT") = kMinStepCount;
  m.attr("MAX_STEP_COUNT") = kMaxStepCount;

  py::enum_<StepPolicy>(m, "StepPolicy")
      .value("REJECT", StepPolicy::kReject)
      .value("CLAMP_RESAMPLE", StepPolicy::kClampResample);

  py::enum_<RejectCode>(m, "RejectCode")
      .value("TOO_SHORT", RejectCode::kTooShort)
      .value("TOO_LONG", RejectCode::kTooLong)
      .value("SCORE_RANGE", RejectCode::kScoreRange);

  py::enum_<ValidationAction>(m, "ValidationAction")
      .value("ACCEPT", ValidationAction::kAccept)
      .value("REJECT", ValidationAction::kReject)
      .value("RESAMPLE", ValidationAction::kResample);

  py::class_<ValidationResult>(m, "ValidationResult")
      .def_readonly("action", &ValidationResult::action)
      .def_readonly("code", &ValidationResult::code)
      .def("accepted", &ValidationResult::accepted);

  m.def("validate_question", &validate_question);
  m.def("validate_trajectory", &validate_trajectory, py::arg("trajectory"),
        py::arg("policy") = StepPolicy::kReject);
  m.def("build_candidate_set", &build_candidate_set, py::arg("question"),
        py::arg("trajectories"));
  m.def("group_by_answer", [](const CandidateSet& cs) {
    std::map<std::string, std::vector<int>> out;
    for (const auto& [answer, indices] : group_by_answer(cs)) out[answer.label] = indices;
    return out;
  });
  m.def("make_answer_labels", &make_answer_labels, py::arg("count"));

  py::class_<WeightingConfig>(m, "WeightingConfig")
      .def(py::init([](double alpha, double beta) {
             WeightingConfig cfg;
             cfg.alpha = alpha;
             cfg.beta = beta;
             return cfg;
           }),
           py::arg("alpha") = 8.0, py::arg("beta") = 0.55)
      .def_readwrite("alpha", &WeightingConfig::alpha)
      .def_readwrite("beta", &WeightingConfig::beta);

  m.def("validate_weighting", &validate_weighting);

  py::enum_<StepAggregator>(m, "StepAggregator")
      .value("MIN", StepAggregator::kMin)
      .value("MEAN", StepAggregator::kMean)
      .value("PRODUCT", StepAggregator::kProduct)
      .value("LAST_STEP", StepAggregator::kLastStep);

  m.def("aggregate_worst_step",
        [](const std::vector<double>& scores) { return aggregate_worst_step(scores); });
  m.def("aggregate_steps", [](const std::vector<double>& scores, StepAggregator agg) {
    return aggregate_steps(scores, agg);
  });
  m.def("map_weight", &map_weight, py::arg("confidence"), py::arg("config"));

  py::class_<ScoredCandidate>(m, "ScoredCandidate")
      .def_readonly("confidence", &ScoredCandidate::confidence)
      .def_readonly("weight", &ScoredCandidate::weight);

  m.def("score_candidate_set", &score_candidate_set, py::arg("candidates"), py::arg("config"),
        py::arg("aggregator") = StepAggregator::kMin);

  py::enum_<Strategy>(m, "Strategy")
      .value("PASS1", Strategy::kPass1)
      .value("MV", Strategy::kMajorityVote)
      .value("BOM", Strategy::kBestOfM)
      .value("SCRM", Strategy::kScRm);

  m.def("to_string", [](Strategy s) { return std::string(to_string(s)); });
  m.def("strategy_from_string", &strategy_from_string);

  py::class_<SelectionResult>(m, "SelectionResult")
      .def_readwrite("chosen", &SelectionResult::chosen)
      .def_readwrite("strategy", &SelectionResult::strategy)
      .def_readwrite("tie_broken", &SelectionResult::tie_broken)
      .def_readwrite("supporting_indices", &SelectionResult::supporting_indices);

  m.def("pass_at_1", &pass_at_1);
  m.def("majority_vote", &majority_vote);
  m.def("best_of_m", [](const CandidateSet& cs, const std::vector<double>& confidences) {
    return best_of_m(cs, confidences);
  });
  m.def("group_confidence", [](const CandidateSet& cs, const std::vector<double>& weights) {
    std::map<std::string, double> out;
    for (const auto& [answer, mass] : group_confidence(cs, weights)) out[answer.label] = mass;
    return out;
  });
  m.def("sc_rm_select", [](const CandidateSet& cs, const std::vector<double>& weights) {
    return sc_rm_select(cs, weights);
  });

  py::class_<PolicyParams>(m, "PolicyParams")
      .def(py::init<>())
      .def_readwrite("num_classes", &PolicyParams::num_classes)
      .def_readwrite("num_answers", &PolicyParams::num_answers)
      .def_readwrite("logits", &PolicyParams::logits)
      .def("logit",
           [](const PolicyParams& p, int q_class, int answer) { return p.logit(q_class, answer); })
      .def("set_logit",
           [](PolicyParams& p, int q_class, int answer, double v) { p.logit(q_class, answer) = v; })
      .def("probs", &PolicyParams::probs, py::arg("q_class"));

  m.def("uniform_policy", &uniform_policy, py::arg("num_classes"), py::arg("num_answers"));
  m.def("softmax", &softmax);

  py::class_<RngStream> rng(m, "RngStream");
  rng.def(py::init<uint64_t>(), py::arg("key"))
      .def_static("root", &RngStream::root, py::arg("seed"))
      .def("fork", py::overload_cast<uint64_t>(&RngStream::fork, py::const_))
      .def("fork", py::overload_cast<uint64_t, uint64_t>(&RngStream::fork, py::const_))
      .def("fork",
           py::overload_cast<uint64_t, uint64_t, uint64_t>(&RngStream::fork, py::const_))
      .def("key", &RngStream::key)
      .def("next_u64", &RngStream::next_u64)
      .def("next_double", &RngStream::next_double)
      .def("next_below", &RngStream::next_below, py::arg("n"));

  py::class_<ScoreDist> dist(m, "ScoreDist");
  py::enum_<ScoreDist::Kind>(dist, "Kind")
      .value("BETA", ScoreDist::Kind::kBeta)
      .value("POINT", ScoreDist::Kind::kPoint);
  dist.def(py::init<>())
      .def_readwrite("kind", &ScoreDist::kind)
      .def_readwrite("alpha", &ScoreDist::alpha)
      .def_readwrite("beta", &ScoreDist::beta)
      .def_readwrite("value", &ScoreDist::value)
      .def_static("beta_dist", &ScoreDist::beta_dist, py::arg("a"), py::arg("b"))
      .def_static("point_mass", &ScoreDist::point_mass, py::arg("v"))
      .def("sample", &ScoreDist::sample, py::arg("rng"));

  m.def("validate_score_dist", &validate_score_dist, py::arg("dist"), py::arg("field"));

  py::class_<WorldConfig>(m, "WorldConfig")
      .def(py::init<>())
      .def_readwrite("num_question_classes", &WorldConfig::num_question_classes)
      .def_readwrite("answers_per_question", &WorldConfig::answers_per_question)
      .def_readwrite("consensus_error_strength", &WorldConfig::consensus_error_strength)
      .def_readwrite("correct_score_dist", &WorldConfig::correct_score_dist)
      .def_readwrite("incorrect_score_dist", &WorldConfig::incorrect_score_dist)
      .def_readwrite("verifier_flip_prob", &WorldConfig::verifier_flip_prob);

  m.def("validate_world", &validate_world);

  py::class_<SimWorld>(m, "SimWorld")
      .def_readwrite("config", &SimWorld::config)
      .def_readwrite("labels", &SimWorld::labels)
      .def_readwrite("ground_truth", &SimWorld::ground_truth)
      .def_readwrite("error_answer", &SimWorld::error_answer)
      .def("make_question", &SimWorld::make_question, py::arg("q_class"));

  m.def("build_world", &build_world, py::arg("config"), py::arg("rng"));
  m.def("sample_candidates", &sample_candidates, py::arg("world"), py::arg("q_class"),
        py::arg("theta"), py::arg("m"), py::arg("rng"));
  m.def("oracle_accuracy",
        [](const std::vector<SelectionResult>& selections, const SimWorld& world,
           const std::vector<int>& q_classes) {
          return oracle_accuracy(selections, world, q_classes);
        });

  py::enum_<Updater>(m, "Updater")
      .value("REINFORCE", Updater::kReinforce)
      .value("GRPO", Updater::kGrpo);

  py::enum_<UpdateOrder>(m, "UpdateOrder").value("STREAM_ORDER", UpdateOrder::kStreamOrder);

  py::class_<TtrlConfig>(m, "TtrlConfig")
      .def(py::init<>())
      .def_readwrite("learning_rate", &TtrlConfig::learning_rate)
      .def_readwrite("updater", &TtrlConfig::updater)
      .def_readwrite("clip_ratio", &TtrlConfig::clip_ratio)
      .def_readwrite("kl_coefficient", &TtrlConfig::kl_coefficient)
      .def_readwrite("group_std_epsilon", &TtrlConfig::group_std_epsilon)
      .def_readwrite("update_order", &TtrlConfig::update_order);

  m.def("validate_ttrl", &validate_ttrl);
  m.def("to_string", [](Updater u) { return std::string(to_string(u)); });
  m.def("updater_from_string", &updater_from_string);

  m.def("assign_rewards", &assign_rewards, py::arg("candidates"), py::arg("pseudo_label"));
  m.def("group_advantages", [](const std::vector<double>& rewards, const TtrlConfig& cfg) {
    return group_advantages(rewards, cfg);
  });
  m.def("policy_log_prob_grad", &policy_log_prob_grad, py::arg("theta"), py::arg("q_class"),
        py::arg("answer"));
  m.def("grpo_sample_grad",
        [](const PolicyParams& theta, int q_class, int answer, double advantage,
           const std::vector<double>& ref_probs, const TtrlConfig& cfg) {
          return grpo_sample_grad(theta, q_class, answer, advantage, ref_probs, cfg);
        });
  m.def("ttrl_step", [](const PolicyParams& theta, const CandidateSet& cs, int q_class,
                        const std::vector<double>& rewards, const TtrlConfig& cfg) {
    return ttrl_step(theta, cs, q_class, rewards, cfg);
  });

  py::class_<TtrlStepLog>(m, "TtrlStepLog")
      .def_readonly("stream_index", &TtrlStepLog::stream_index)
      .def_readonly("q_class", &TtrlStepLog::q_class)
      .def_readonly("pseudo_label", &TtrlStepLog::pseudo_label)
      .def_readonly("mean_reward", &TtrlStepLog::mean_reward)
      .def_readonly("pseudo_label_correct", &TtrlStepLog::pseudo_label_correct);

  py::class_<TtrlRunResult>(m, "TtrlRunResult")
      .def_readonly("params", &TtrlRunResult::params)
      .def_readonly("log", &TtrlRunResult::log)
      .def_readonly("diverged", &TtrlRunResult::diverged);

  m.def("ttrl_run",
        [](PolicyParams theta, const std::vector<int>& question_classes, const SimWorld& world,
           const WeightingConfig& wcfg, const TtrlConfig& tcfg, int m_budget,
           const RngStream& rng) {
          return ttrl_run(std::move(theta), question_classes, world, wcfg, tcfg, m_budget, rng);
        },
        py::arg("theta"), py::arg("question_classes"), py::arg("world"), py::arg("weighting"),
        py::arg("ttrl"), py::arg("m"), py::arg("rng"));

  py::enum_<Phase>(m, "Phase")
      .value("BEFORE_TTRL", Phase::kBeforeTtrl)
      .value("AFTER_TTRL", Phase::kAfterTtrl);

  m.def("to_string", [](Phase p) { return std::string(to_string(p)); });

  py::class_<ExperimentConfig>(m, "ExperimentConfig")
      .def(py::init<>())
      .def_readwrite("world", &ExperimentConfig::world)
      .def_readwrite("weighting", &ExperimentConfig::weighting)
      .def_readwrite("ttrl", &ExperimentConfig::ttrl)
      .def_readwrite("ttrl_enabled", &ExperimentConfig::ttrl_enabled)
      .def_readwrite("m_values", &ExperimentConfig::m_values)
      .def_readwrite("seeds", &ExperimentConfig::seeds)
      .def_readwrite("strategies", &ExperimentConfig::strategies)
      .def_readwrite("questions_per_run", &ExperimentConfig::questions_per_run);

  m.def("validate_experiment", &validate_experiment);

  py::class_<RunRecord>(m, "RunRecord")
      .def(py::init<>())
      .def_readwrite("strategy", &RunRecord::strategy)
      .def_readwrite("m", &RunRecord::m)
      .def_readwrite("seed", &RunRecord::seed)
      .def_readwrite("phase", &RunRecord::phase)
      .def_readwrite("accuracy", &RunRecord::accuracy)
      .def_readwrite("mean_reward", &RunRecord::mean_reward)
      .def_readwrite("tie_rate", &RunRecord::tie_rate);

  py::class_<SweepPoint>(m, "SweepPoint")
      .def_readonly("strategy", &SweepPoint::strategy)
      .def_readonly("phase", &SweepPoint::phase)
      .def_readonly("m", &SweepPoint::m)
      .def_readonly("mean_accuracy", &SweepPoint::mean_accuracy)
      .def_readonly("std_accuracy", &SweepPoint::std_accuracy);

  m.def("run_experiment", [](const ExperimentConfig& cfg) { return run_experiment(cfg); });
  m.def("sweep_m", [](const ExperimentConfig& cfg) { return sweep_m(cfg); });
  m.def("aggregate_sweep",
        [](const std::vector<RunRecord>& records) { return aggregate_sweep(records); });

  py::enum_<OutputFormat>(m, "OutputFormat")
      .value("CSV", OutputFormat::kCsv)
      .value("JSONL", OutputFormat::kJsonLines);

  m.def("format_from_string", &format_from_string);
  m.def("format_results", [](const std::vector<RunRecord>& records, OutputFormat fmt) {
    return format_results(records, fmt);
  });
  m.def("emit_results",
        [](const std::vector<RunRecord>& records, OutputFormat fmt, const std::string& path) {
          emit_results(records, fmt, path);
        });
  m.def("parse_results", &parse_results, py::arg("text"), py::arg("format"));
  m.def("format_curves", [](const std::vector<SweepPoint>& points, OutputFormat fmt) {
    return format_curves(points, fmt);
  });
  m.def("emit_curves",
        [](const std::vector<SweepPoint>& points, OutputFormat fmt, const std::string& path) {
          emit_curves(points, fmt, path);
        });

  py::class_<IngestReport>(m, "IngestReport")
      .def_readonly("lines_total", &IngestReport::lines_total)
      .def_readonly("records_accepted", &IngestReport::records_accepted)
      .def_readonly("lines_skipped", &IngestReport::lines_skipped)
      .def_readonly("questions_skipped", &IngestReport::questions_skipped)
      .def_readonly("warnings", &IngestReport::warnings);

  m.def("ingest_candidates", [](const std::string& path, bool strict) {
    IngestReport report;
    auto sets = ingest_candidates(path, strict, &report);
    return py::make_tuple(std::move(sets), std::move(report));
  }, py::arg("path"), py::arg("strict") = false);

  m.def("format_candidates",
        [](const std::vector<CandidateSet>& sets) { return format_candidates(sets); });
  m.def("emit_candidates", [](const std::vector<CandidateSet>& sets, const std::string& path) {
    emit_candidates(sets, path);
  });

  py::class_<SelectionRow>(m, "SelectionRow")
      .def_readonly("question_id", &SelectionRow::question_id)
      .def_readonly("strategy", &SelectionRow::strategy)
      .def_readonly("chosen", &SelectionRow::chosen)
      .def_readonly("tie_broken", &SelectionRow::tie_broken);

  m.def("select_on_ingested",
        [](const std::map<std::string, CandidateSet>& sets,
           const std::vector<Strategy>& strategies, const WeightingConfig& wcfg) {
          return select_on_ingested(sets, strategies, wcfg);
        });
  m.def("format_selections", [](const std::vector<SelectionRow>& rows, OutputFormat fmt) {
    return format_selections(rows, fmt);
  });

  m.def("parse_experiment_config", &parse_experiment_config, py::arg("text"));
  m.def("load_experiment_config", &load_experiment_config, py::arg("path"));
}
