#include "prmlab/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <string_view>
#include <tuple>

#include "json.hpp"

namespace prmlab {

namespace {

// RNG path tags under root(seed). Evaluation substreams depend on the
// question index but not on M, so candidate sets at larger M extend smaller
// ones and the BEFORE/AFTER passes share per-question draws.
constexpr uint64_t kTagWorld = 1;
constexpr uint64_t kTagEval = 2;
constexpr uint64_t kTagAdapt = 3;

std::string fixed6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

Phase phase_from_string(const std::string& name) {
  if (name == "BEFORE_TTRL") return Phase::kBeforeTtrl;
  if (name == "AFTER_TTRL") return Phase::kAfterTtrl;
  throw DataError("unknown phase '" + name + "'");
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw DataError("cannot open '" + path + "' for writing");
  os << text;
  os.flush();
  if (!os.good()) throw DataError("failed writing '" + path + "'");
}

}  // namespace

const char* to_string(Phase p) {
  switch (p) {
    case Phase::kBeforeTtrl: return "BEFORE_TTRL";
    case Phase::kAfterTtrl: return "AFTER_TTRL";
  }
  return "UNKNOWN";
}

void validate_experiment(const ExperimentConfig& cfg) {
  validate_world(cfg.world);
  validate_weighting(cfg.weighting);
  validate_ttrl(cfg.ttrl);
  if (cfg.m_values.empty()) throw ConfigError("sweep.m_values must be non-empty");
  for (std::size_t i = 0; i < cfg.m_values.size(); ++i) {
    if (cfg.m_values[i] < 1) throw ConfigError("sweep.m_values entries must be >= 1");
    if (i > 0 && cfg.m_values[i] <= cfg.m_values[i - 1]) {
      throw ConfigError("sweep.m_values must be strictly ascending");
    }
  }
  if (cfg.seeds.empty()) throw ConfigError("sweep.seeds must be non-empty");
  if (cfg.strategies.empty()) throw ConfigError("sweep.strategies must be non-empty");
  std::set<Strategy> distinct(cfg.strategies.begin(), cfg.strategies.end());
  if (distinct.size() != cfg.strategies.size()) {
    throw ConfigError("sweep.strategies has duplicates");
  }
  if (cfg.questions_per_run < 1) throw ConfigError("sweep.questions_per_run must be >= 1");
}

bool record_less(const RunRecord& a, const RunRecord& b) {
  int sc = std::string_view(to_string(a.strategy)).compare(to_string(b.strategy));
  if (sc != 0) return sc < 0;
  if (a.m != b.m) return a.m < b.m;
  if (a.seed != b.seed) return a.seed < b.seed;
  return static_cast<int>(a.phase) < static_cast<int>(b.phase);
}

namespace {

void evaluate_pass(const ExperimentConfig& cfg, const SimWorld& world,
                   std::span<const int> classes, const PolicyParams& theta, int m,
                   uint64_t seed, Phase phase, std::vector<RunRecord>& out,
                   std::vector<RunRecord>* partial_out) {
  const std::size_t n_strategies = cfg.strategies.size();
  std::vector<std::vector<SelectionResult>> selections(n_strategies);
  std::vector<int> ties(n_strategies, 0);
  std::vector<double> agreement(n_strategies, 0.0);
  for (auto& v : selections) v.reserve(classes.size());

  RngStream root = RngStream::root(seed);
  for (std::size_t qi = 0; qi < classes.size(); ++qi) {
    RngStream eval_rng = root.fork(kTagEval, qi);
    CandidateSet cs = sample_candidates(world, classes[qi], theta, m, eval_rng);
    std::vector<ScoredCandidate> scored = score_candidate_set(cs, cfg.weighting);
    std::vector<double> confidences(scored.size());
    std::vector<double> weights(scored.size());
    for (std::size_t i = 0; i < scored.size(); ++i) {
      confidences[i] = scored[i].confidence;
      weights[i] = scored[i].weight;
    }
    for (std::size_t s = 0; s < n_strategies; ++s) {
      SelectionResult sel;
      switch (cfg.strategies[s]) {
        case Strategy::kPass1: sel = pass_at_1(cs); break;
        case Strategy::kMajorityVote: sel = majority_vote(cs); break;
        case Strategy::kBestOfM: sel = best_of_m(cs, confidences); break;
        case Strategy::kScRm: sel = sc_rm_select(cs, weights); break;
      }
      ties[s] += sel.tie_broken ? 1 : 0;
      agreement[s] += static_cast<double>(sel.supporting_indices.size()) /
                      static_cast<double>(cs.size());
      selections[s].push_back(std::move(sel));
    }
  }

  const double n_q = static_cast<double>(classes.size());
  for (std::size_t s = 0; s < n_strategies; ++s) {
    RunRecord rec;
    rec.strategy = cfg.strategies[s];
    rec.m = m;
    rec.seed = seed;
    rec.phase = phase;
    rec.accuracy = oracle_accuracy(selections[s], world, classes);
    rec.mean_reward = agreement[s] / n_q;
    rec.tie_rate = static_cast<double>(ties[s]) / n_q;
    out.push_back(rec);
    if (partial_out) partial_out->push_back(rec);
  }
}

}  // namespace

std::vector<RunRecord> run_experiment(const ExperimentConfig& cfg,
                                      std::vector<RunRecord>* partial_out) {
  validate_experiment(cfg);
  std::vector<RunRecord> out;
  std::vector<int> classes(static_cast<std::size_t>(cfg.questions_per_run));
  for (std::size_t qi = 0; qi < classes.size(); ++qi) {
    classes[qi] = static_cast<int>(qi) % cfg.world.num_question_classes;
  }
  const PolicyParams theta0 =
      uniform_policy(cfg.world.num_question_classes, cfg.world.answers_per_question);

  for (uint64_t seed : cfg.seeds) {
    RngStream root = RngStream::root(seed);
    SimWorld world = build_world(cfg.world, root.fork(kTagWorld));
    for (int m : cfg.m_values) {
      evaluate_pass(cfg, world, classes, theta0, m, seed, Phase::kBeforeTtrl, out, partial_out);
      if (!cfg.ttrl_enabled) continue;
      TtrlRunResult adapted = ttrl_run(theta0, classes, world, cfg.weighting, cfg.ttrl, m,
                                       root.fork(kTagAdapt, static_cast<uint64_t>(m)));
      if (adapted.diverged) {
        throw DivergenceError("adaptation diverged at seed " + std::to_string(seed) +
                              ", M " + std::to_string(m));
      }
      evaluate_pass(cfg, world, classes, adapted.params, m, seed, Phase::kAfterTtrl, out,
                    partial_out);
    }
  }
  std::sort(out.begin(), out.end(), record_less);
  return out;
}

std::vector<SweepPoint> aggregate_sweep(std::span<const RunRecord> records) {
  std::map<std::tuple<std::string, int, int>, std::vector<double>> cells;
  std::map<std::tuple<std::string, int, int>, std::pair<Strategy, Phase>> keys;
  for (const RunRecord& r : records) {
    auto key = std::make_tuple(std::string(to_string(r.strategy)),
                               static_cast<int>(r.phase), r.m);
    cells[key].push_back(r.accuracy);
    keys[key] = {r.strategy, r.phase};
  }
  std::vector<SweepPoint> out;
  out.reserve(cells.size());
  for (const auto& [key, accs] : cells) {
    SweepPoint p;
    p.strategy = keys[key].first;
    p.phase = keys[key].second;
    p.m = std::get<2>(key);
    double mean = 0.0;
    for (double a : accs) mean += a;
    mean /= static_cast<double>(accs.size());
    double var = 0.0;
    for (double a : accs) var += (a - mean) * (a - mean);
    var /= static_cast<double>(accs.size());
    p.mean_accuracy = mean;
    p.std_accuracy = std::sqrt(var);
    out.push_back(p);
  }
  return out;
}

std::vector<SweepPoint> sweep_m(const ExperimentConfig& cfg,
                                std::vector<RunRecord>* partial_out) {
  return aggregate_sweep(run_experiment(cfg, partial_out));
}

OutputFormat format_from_string(const std::string& name) {
  if (name == "csv") return OutputFormat::kCsv;
  if (name == "jsonl") return OutputFormat::kJsonLines;
  throw ConfigError("unknown format '" + name + "' (expected csv or jsonl)");
}

std::string format_results(std::span<const RunRecord> records, OutputFormat fmt) {
  std::vector<RunRecord> rows(records.begin(), records.end());
  std::sort(rows.begin(), rows.end(), record_less);
  std::ostringstream os;
  if (fmt == OutputFormat::kCsv) {
    os << "strategy,M,seed,phase,accuracy,mean_reward,tie_rate\n";
    for (const RunRecord& r : rows) {
      os << to_string(r.strategy) << ',' << r.m << ',' << r.seed << ',' << to_string(r.phase)
         << ',' << fixed6(r.accuracy) << ',' << fixed6(r.mean_reward) << ','
         << fixed6(r.tie_rate) << '\n';
    }
  } else {
    for (const RunRecord& r : rows) {
      os << "{\"strategy\":\"" << to_string(r.strategy) << "\",\"M\":" << r.m
         << ",\"seed\":" << r.seed << ",\"phase\":\"" << to_string(r.phase)
         << "\",\"accuracy\":" << fixed6(r.accuracy)
         << ",\"mean_reward\":" << fixed6(r.mean_reward)
         << ",\"tie_rate\":" << fixed6(r.tie_rate) << "}\n";
    }
  }
  return os.str();
}

void emit_results(std::span<const RunRecord> records, OutputFormat fmt, const std::string& path) {
  write_file(path, format_results(records, fmt));
}

std::vector<RunRecord> parse_results(const std::string& text, OutputFormat fmt) {
  std::vector<RunRecord> out;
  std::istringstream is(text);
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      RunRecord r;
      if (fmt == OutputFormat::kCsv) {
        if (line_no == 1) {
          if (line != "strategy,M,seed,phase,accuracy,mean_reward,tie_rate") {
            throw DataError("bad header");
          }
          continue;
        }
        std::vector<std::string> fields;
        std::string field;
        std::istringstream ls(line);
        while (std::getline(ls, field, ',')) fields.push_back(field);
        if (fields.size() != 7) throw DataError("expected 7 fields");
        r.strategy = strategy_from_string(fields[0]);
        r.m = std::stoi(fields[1]);
        r.seed = std::stoull(fields[2]);
        r.phase = phase_from_string(fields[3]);
        r.accuracy = std::stod(fields[4]);
        r.mean_reward = std::stod(fields[5]);
        r.tie_rate = std::stod(fields[6]);
      } else {
        nlohmann::json j = nlohmann::json::parse(line);
        r.strategy = strategy_from_string(j.at("strategy").get<std::string>());
        r.m = j.at("M").get<int>();
        r.seed = j.at("seed").get<uint64_t>();
        r.phase = phase_from_string(j.at("phase").get<std::string>());
        r.accuracy = j.at("accuracy").get<double>();
        r.mean_reward = j.at("mean_reward").get<double>();
        r.tie_rate = j.at("tie_rate").get<double>();
      }
      out.push_back(r);
    } catch (const std::exception& e) {
      throw DataError("results line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

std::string format_curves(std::span<const SweepPoint> points, OutputFormat fmt) {
  std::vector<SweepPoint> rows(points.begin(), points.end());
  std::sort(rows.begin(), rows.end(), [](const SweepPoint& a, const SweepPoint& b) {
    int sc = std::string_view(to_string(a.strategy)).compare(to_string(b.strategy));
    if (sc != 0) return sc < 0;
    if (a.phase != b.phase) return static_cast<int>(a.phase) < static_cast<int>(b.phase);
    return a.m < b.m;
  });
  std::ostringstream os;
  if (fmt == OutputFormat::kCsv) {
    os << "strategy,phase,M,mean_accuracy,std_accuracy\n";
    for (const SweepPoint& p : rows) {
      os << to_string(p.strategy) << ',' << to_string(p.phase) << ',' << p.m << ','
         << fixed6(p.mean_accuracy) << ',' << fixed6(p.std_accuracy) << '\n';
    }
  } else {
    for (const SweepPoint& p : rows) {
      os << "{\"strategy\":\"" << to_string(p.strategy) << "\",\"phase\":\""
         << to_string(p.phase) << "\",\"M\":" << p.m
         << ",\"mean_accuracy\":" << fixed6(p.mean_accuracy)
         << ",\"std_accuracy\":" << fixed6(p.std_accuracy) << "}\n";
    }
  }
  return os.str();
}

void emit_curves(std::span<const SweepPoint> points, OutputFormat fmt, const std::string& path) {
  write_file(path, format_curves(points, fmt));
}

namespace {

struct RawRecord {
  int line_no = 0;
  Trajectory trajectory;
};

}  // namespace

std::map<std::string, CandidateSet> ingest_candidates(const std::string& path, bool strict,
                                                      IngestReport* report) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw DataError("cannot open '" + path + "' for reading");

  IngestReport local;
  IngestReport& rep = report ? *report : local;
  rep = IngestReport{};

  auto line_problem = [&](int line_no, const std::string& what) {
    std::string msg = "line " + std::to_string(line_no) + ": " + what;
    if (strict) throw DataError(msg);
    rep.lines_skipped += 1;
    rep.warnings.push_back(msg);
  };

  std::map<std::string, std::vector<RawRecord>> by_question;
  std::vector<std::string> question_order;
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    rep.lines_total += 1;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const std::exception& e) {
      line_problem(line_no, std::string("JSON parse error: ") + e.what());
      continue;
    }
    try {
      RawRecord rec;
      rec.line_no = line_no;
      rec.trajectory.question_id = j.at("question_id").get<std::string>();
      (void)j.at("candidate_id").get<std::string>();
      rec.trajectory.answer = AnswerId{j.at("answer").get<std::string>()};
      rec.trajectory.steps = j.at("steps").get<std::vector<std::string>>();
      rec.trajectory.step_scores = j.at("step_scores").get<std::vector<double>>();
      ValidationResult v = validate_trajectory(rec.trajectory, StepPolicy::kReject);
      if (!v.accepted()) {
        line_problem(line_no, std::string("invalid trajectory: ") + to_string(*v.code));
        continue;
      }
      if (by_question.find(rec.trajectory.question_id) == by_question.end()) {
        question_order.push_back(rec.trajectory.question_id);
      }
      by_question[rec.trajectory.question_id].push_back(std::move(rec));
      rep.records_accepted += 1;
    } catch (const std::exception& e) {
      line_problem(line_no, std::string("bad record: ") + e.what());
      continue;
    }
  }

  std::map<std::string, CandidateSet> out;
  for (const std::string& qid : question_order) {
    std::vector<RawRecord>& recs = by_question[qid];
    std::set<AnswerId> distinct;
    for (const RawRecord& r : recs) distinct.insert(r.trajectory.answer);
    if (distinct.size() < 2) {
      std::string msg = "question '" + qid + "' (line " + std::to_string(recs[0].line_no) +
                        "): needs >= 2 distinct answers to infer an answer space";
      if (strict) throw DataError(msg);
      rep.questions_skipped += 1;
      rep.warnings.push_back(msg);
      continue;
    }
    Question q;
    q.id = qid;
    q.answer_space.assign(distinct.begin(), distinct.end());
    std::vector<Trajectory> ts;
    ts.reserve(recs.size());
    for (RawRecord& r : recs) ts.push_back(std::move(r.trajectory));
    out.emplace(qid, build_candidate_set(q, std::move(ts)));
  }
  return out;
}

std::string format_candidates(std::span<const CandidateSet> sets) {
  std::ostringstream os;
  for (const CandidateSet& cs : sets) {
    for (const Trajectory& t : cs.trajectories) {
      nlohmann::ordered_json j;
      j["question_id"] = t.question_id;
      j["candidate_id"] = std::to_string(t.candidate_index);
      j["answer"] = t.answer.label;
      j["steps"] = t.steps;
      j["step_scores"] = t.step_scores;
      os << j.dump() << '\n';
    }
  }
  return os.str();
}

void emit_candidates(std::span<const CandidateSet> sets, const std::string& path) {
  write_file(path, format_candidates(sets));
}

std::vector<SelectionRow> select_on_ingested(const std::map<std::string, CandidateSet>& sets,
                                             std::span<const Strategy> strategies,
                                             const WeightingConfig& wcfg) {
  std::vector<SelectionRow> rows;
  for (const auto& [qid, cs] : sets) {
    std::vector<ScoredCandidate> scored = score_candidate_set(cs, wcfg);
    std::vector<double> confidences(scored.size());
    std::vector<double> weights(scored.size());
    for (std::size_t i = 0; i < scored.size(); ++i) {
      confidences[i] = scored[i].confidence;
      weights[i] = scored[i].weight;
    }
    for (Strategy s : strategies) {
      SelectionResult sel;
      switch (s) {
        case Strategy::kPass1: sel = pass_at_1(cs); break;
        case Strategy::kMajorityVote: sel = majority_vote(cs); break;
        case Strategy::kBestOfM: sel = best_of_m(cs, confidences); break;
        case Strategy::kScRm: sel = sc_rm_select(cs, weights); break;
      }
      rows.push_back({qid, s, sel.chosen, sel.tie_broken});
    }
  }
  std::sort(rows.begin(), rows.end(), [](const SelectionRow& a, const SelectionRow& b) {
    if (a.question_id != b.question_id) return a.question_id < b.question_id;
    return std::string_view(to_string(a.strategy)).compare(to_string(b.strategy)) < 0;
  });
  return rows;
}

std::string format_selections(std::span<const SelectionRow> rows, OutputFormat fmt) {
  std::ostringstream os;
  if (fmt == OutputFormat::kCsv) {
    os << "question_id,strategy,chosen,tie_broken\n";
    for (const SelectionRow& r : rows) {
      os << r.question_id << ',' << to_string(r.strategy) << ',' << r.chosen.label << ','
         << (r.tie_broken ? "true" : "false") << '\n';
    }
  } else {
    for (const SelectionRow& r : rows) {
      nlohmann::ordered_json j;
      j["question_id"] = r.question_id;
      j["strategy"] = to_string(r.strategy);
      j["chosen"] = r.chosen.label;
      j["tie_broken"] = r.tie_broken;
      os << j.dump() << '\n';
    }
  }
  return os.str();
}

}  // namespace prmlab
