#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "prmlab/config.hpp"
#include "prmlab/harness.hpp"

namespace {

struct Options {
  std::string config_path;
  std::optional<uint64_t> seed;
  std::string out;
  std::string format = "csv";
  bool strict = false;
  std::string data_path;
};

void write_text(const std::string& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw prmlab::DataError("cannot open '" + path + "' for writing");
  os << text;
  os.flush();
  if (!os.good()) throw prmlab::DataError("failed writing '" + path + "'");
}

void deliver(const std::string& text, const std::string& out) {
  if (out.empty()) {
    std::cout << text;
  } else {
    write_text(out, text);
  }
}

prmlab::ExperimentConfig load_config(const Options& opt) {
  prmlab::ExperimentConfig cfg;
  if (!opt.config_path.empty()) {
    cfg = prmlab::load_experiment_config(opt.config_path);
  }
  if (opt.seed) cfg.seeds = {*opt.seed};
  return cfg;
}

// On divergence: flush whatever completed, leave a marker next to --out, and
// rethrow so the caller maps the failure to exit code 3.
void run_grid(const Options& opt, bool force_ttrl, bool curves) {
  prmlab::ExperimentConfig cfg = load_config(opt);
  if (force_ttrl) cfg.ttrl_enabled = true;
  prmlab::OutputFormat fmt = prmlab::format_from_string(opt.format);
  std::vector<prmlab::RunRecord> partial;
  try {
    std::vector<prmlab::RunRecord> records = prmlab::run_experiment(cfg, &partial);
    if (curves) {
      deliver(prmlab::format_curves(prmlab::aggregate_sweep(records), fmt), opt.out);
    } else {
      deliver(prmlab::format_results(records, fmt), opt.out);
    }
  } catch (const prmlab::DivergenceError& e) {
    if (curves) {
      deliver(prmlab::format_curves(prmlab::aggregate_sweep(partial), fmt), opt.out);
    } else {
      deliver(prmlab::format_results(partial, fmt), opt.out);
    }
    if (!opt.out.empty()) write_text(opt.out + ".FAILED", std::string(e.what()) + "\n");
    throw;
  }
}

void run_select(const Options& opt) {
  prmlab::ExperimentConfig cfg = load_config(opt);
  prmlab::OutputFormat fmt = prmlab::format_from_string(opt.format);
  prmlab::IngestReport report;
  auto sets = prmlab::ingest_candidates(opt.data_path, opt.strict, &report);
  for (const std::string& w : report.warnings) {
    std::cerr << "warning: " << w << "\n";
  }
  if (sets.empty()) {
    throw prmlab::DataError("no usable candidate sets in '" + opt.data_path + "'");
  }
  auto rows = prmlab::select_on_ingested(sets, cfg.strategies, cfg.weighting);
  deliver(prmlab::format_selections(rows, fmt), opt.out);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Weighted candidate selection and test-time policy adaptation"};
  app.fallthrough();
  app.require_subcommand(1);

  Options opt;
  app.add_option("--config", opt.config_path, "Config file ([world] [weighting] [ttrl] [sweep])");
  app.add_option("--seed", opt.seed, "Override the config seed list with one seed");
  app.add_option("--out", opt.out, "Output path (default: stdout)");
  app.add_option("--format", opt.format, "Output format: csv or jsonl")
      ->check(CLI::IsMember({"csv", "jsonl"}));
  app.add_flag("--strict", opt.strict, "Abort on the first bad data line instead of skipping");

  CLI::App* simulate =
      app.add_subcommand("simulate", "Run the (seed, M, strategy) grid and emit result rows");
  CLI::App* sweep =
      app.add_subcommand("sweep", "Run the grid and emit per-strategy accuracy curves over M");
  CLI::App* select =
      app.add_subcommand("select", "Apply selection strategies to candidate JSONL data");
  select->add_option("data", opt.data_path, "Candidate JSONL file")->required();
  CLI::App* ttrl =
      app.add_subcommand("ttrl", "Run the grid with test-time adaptation forced on");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (simulate->parsed()) {
      run_grid(opt, false, false);
    } else if (sweep->parsed()) {
      run_grid(opt, false, true);
    } else if (ttrl->parsed()) {
      run_grid(opt, true, false);
    } else if (select->parsed()) {
      run_select(opt);
    }
  } catch (const prmlab::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const prmlab::DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 2;
  } catch (const prmlab::DivergenceError& e) {
    std::cerr << "divergence: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
