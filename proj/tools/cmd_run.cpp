#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>

#include "blockdp/errors.hpp"
#include "blockdp/experiment.hpp"
#include "blockdp/serialization.hpp"
#include "commands.hpp"

namespace blockdp::cli {

namespace {

struct RunOpts {
  std::string config_path;
  std::string out_dir;
  int jobs = 1;
  int transcripts = 0;
  bool check = false;
};

nlohmann::json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("config: " + path + ": " + e.what());
  }
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
}

// Drops the header line so per-trial CSVs concatenate into one table.
std::string strip_header(const std::string& csv) {
  const std::size_t eol = csv.find('\n');
  return eol == std::string::npos ? std::string() : csv.substr(eol + 1);
}

int run_main(const RunOpts& opts) {
  const ExperimentConfig config = parse_experiment_config(load_json(opts.config_path));
  const ExperimentOutput output = run_experiment(config, opts.jobs);

  const std::filesystem::path dir(opts.out_dir);
  std::filesystem::create_directories(dir);
  write_file(dir / "summary.json", experiment_summary_json(config, output).dump(2) + "\n");
  write_file(dir / "results.csv", results_csv(output.results));

  if (opts.transcripts > 0) {
    const int count = std::min(opts.transcripts, config.trials);
    std::string transcripts;
    std::string rejections;
    for (int t = 0; t < count; ++t) {
      const TrialRecord record = run_trial(config, t);
      const std::string tc = transcript_csv(t, record);
      const std::string rc = rejections_csv(t, record.rejection_log);
      transcripts += t == 0 ? tc : strip_header(tc);
      rejections += t == 0 ? rc : strip_header(rc);
    }
    write_file(dir / "transcripts.csv", transcripts);
    write_file(dir / "rejections.csv", rejections);
  }

  const ExperimentSummary& s = output.summary;
  std::printf("theorem %s: alpha' = %.6g, beta' = %.6g%s\n",
              std::string(to_string(s.bound_report.theorem)).c_str(),
              s.bound_report.result.alpha_prime, s.bound_report.result.beta_prime,
              s.bound_report.feasible ? "" : " (infeasible target)");
  std::printf("distributional failures: %d/%d, wilson 95%% [%.6g, %.6g]\n",
              s.distributional_rate.failures, s.distributional_rate.trials,
              s.distributional_rate.wilson_lo, s.distributional_rate.wilson_hi);
  std::printf("check %s\n", s.check_passed ? "PASS" : "FAIL");
  if (opts.check && !s.check_passed) return 3;
  return 0;
}

}  // namespace

void register_run(CLI::App& app, int& rc) {
  auto opts = std::make_shared<RunOpts>();
  CLI::App* sub =
      app.add_subcommand("run", "run a seeded experiment and write summary.json + results.csv");
  sub->add_option("--config", opts->config_path, "experiment config JSON")
      ->required()
      ->check(CLI::ExistingFile);
  sub->add_option("--out", opts->out_dir, "output directory, created if missing")->required();
  sub->add_option("--jobs", opts->jobs, "worker threads")->check(CLI::PositiveNumber);
  sub->add_option("--transcripts", opts->transcripts,
                  "also export per-query transcripts for the first K trials")
      ->check(CLI::NonNegativeNumber);
  sub->add_flag("--check", opts->check,
                "exit 3 when the empirical failure rate is not covered by the bound");
  sub->callback([opts, &rc] { rc = run_main(*opts); });
}

}  // namespace blockdp::cli
