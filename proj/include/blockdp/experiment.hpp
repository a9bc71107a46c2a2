#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "blockdp/analyst.hpp"
#include "blockdp/bounds.hpp"
#include "blockdp/mechanism.hpp"
#include "blockdp/population.hpp"

namespace blockdp {

struct AnalystConfig {
  enum class Strategy { freedman, correlation_chaser, random };

  Strategy strategy = Strategy::freedman;

  // freedman
  int k_sel = 3;
  FreedmanAnalyst::Stat stat = FreedmanAnalyst::Stat::label_association;
  bool per_block = false;  // screen within the policy's block layout
  double baseline = 0.5;

  // correlation_chaser
  int width = 1;

  // correlation_chaser: proposal budget; random: query count
  int steps = 100;

  // random
  RandomAnalyst::Family family = RandomAnalyst::Family::threshold;
};

// How theory numbers are derived next to the experiment. The per-unit
// premise (eps, delta) comes from the mechanism caps; the sample-accuracy
// premise is (sample_alpha, beta) with beta either given or derived from the
// answerer's noise tail at sample_alpha times the per-unit quota.
struct BoundConfig {
  BoundTheorem theorem = BoundTheorem::full;
  double sample_alpha = 0.1;
  std::optional<double> sample_beta;
  double beta_target = 0.2;
  // Fixed slacks; when absent the optimizer picks them against beta_target.
  std::optional<double> slack_c;
  std::optional<double> slack_f;
};

struct ExperimentConfig {
  explicit ExperimentConfig(MechanismConfig mech) : mechanism(std::move(mech)) {}

  PopulationSpec population;
  MechanismConfig mechanism;
  AnalystConfig analyst;
  BoundConfig bound;

  int n = 1000;
  int trials = 200;
  int max_steps = 100000;
  std::uint64_t base_seed = 1;

  SpecOracle::Mode oracle_mode = SpecOracle::Mode::closed_form_with_fallback;
  long mc_samples = 200000;

  void validate() const;  // throws ConfigError
};

// One analyst instance per trial; freedman reads the block layout off the
// mechanism policy when per_block is set.
std::unique_ptr<Analyst> make_analyst(const AnalystConfig& config,
                                      const MechanismConfig& mechanism, int m_features,
                                      std::uint64_t seed);

struct TrialResult {
  int trial_id = 0;
  double max_sample_error = 0.0;
  double max_distributional_error = 0.0;
  int transcript_len = 0;
  // Indexed by RejectReason enumerator order.
  std::array<int, 5> rejections{};
  double max_eps_spent = 0.0;
  double max_delta_spent = 0.0;
};

struct RateEstimate {
  double rate = 0.0;
  double wilson_lo = 0.0;
  double wilson_hi = 1.0;
  int failures = 0;
  int trials = 0;
};

enum class ErrorKind { sample, distributional };

// Fraction of trials whose max error of the given kind strictly exceeds the
// threshold, with a Wilson 95% interval. Throws SpecError on empty results.
RateEstimate estimate_failure_rate(const std::vector<TrialResult>& results, double threshold,
                                   ErrorKind kind);

struct ExperimentSummary {
  // Theory side.
  double per_unit_eps = 0.0;
  double per_unit_delta = 0.0;
  double sample_alpha = 0.0;
  double sample_beta = 0.0;
  BoundReport bound_report;

  // Empirical side.
  RateEstimate sample_rate;          // threshold: sample_alpha
  RateEstimate distributional_rate;  // threshold: bound_report alpha'
  double median_sample_error = 0.0;
  double median_distributional_error = 0.0;
  double worst_sample_error = 0.0;
  double worst_distributional_error = 0.0;

  // One-sided comparison: Wilson upper bound of the distributional failure
  // rate within the theoretical beta'.
  bool check_passed = false;
};

struct ExperimentOutput {
  std::vector<TrialResult> results;
  ExperimentSummary summary;
};

// Runs config.trials seeded trials, jobs at a time. Every byte of the output
// is a function of (config, base_seed): trial t draws its dataset, analyst,
// and mechanism streams from mix_seed(base_seed, t, tag), and results are
// ordered by trial_id no matter which thread finished first.
ExperimentOutput run_experiment(const ExperimentConfig& config, int jobs = 1);

// Full record of one trial, for transcript export.
struct TrialRecord {
  TrialResult result;
  Transcript transcript;
  std::vector<RejectionRecord> rejection_log;
  std::vector<double> sample_values;      // per transcript entry
  std::vector<double> population_values;  // per transcript entry
};

TrialRecord run_trial(const ExperimentConfig& config, int trial_id);

}  // namespace blockdp
